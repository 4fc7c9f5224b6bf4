import math
import os
import random

import pytest

from beaconnav.errors import DuplicateIdError, LoadError, NotFoundError, SaveError
from beaconnav.store import BeaconRecord, Database


def rec(bid, x=0.0, y=0.0, z=0.0, yaw=0.0):
    return BeaconRecord(
        bid, x, y, z, 0.0, 0.0, math.sin(yaw / 2), math.cos(yaw / 2)
    )


def random_record(rng):
    yaw = rng.uniform(-math.pi, math.pi)
    return rec(
        f"{rng.randrange(16**8):08x}-{rng.randrange(10**6)}",
        rng.uniform(-10, 10),
        rng.uniform(-10, 10),
        0.0,
        yaw,
    )


def test_missing_file_is_empty(tmp_path):
    db = Database.load(tmp_path / "beacons.ndjson")
    assert len(db) == 0


def test_write_then_read_preserves_order(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    records = [rec("a", 1.0), rec("b", 2.0), rec("c", 3.0)]
    for r in records:
        db.add(r)
    again = Database.load(path)
    assert list(again.records) == records


def test_non_unit_quaternion_names_line(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    db.add(rec("a"))
    db.add(rec("b"))
    lines = path.read_text().splitlines()
    lines[1] = '{"id":"b","x":0,"y":0,"z":0,"qx":0,"qy":0,"qz":0,"qw":0.5}'
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(LoadError) as e:
        Database.load(path)
    assert e.value.line == 2


def test_malformed_json_names_line(tmp_path):
    path = tmp_path / "db.ndjson"
    path.write_text('{"id":"a","x":0,"y":0,"z":0,"qx":0,"qy":0,"qz":0,"qw":1}\n{oops\n')
    with pytest.raises(LoadError) as e:
        Database.load(path)
    assert e.value.line == 2


def test_add_duplicate_rejected(tmp_path):
    db = Database.load(tmp_path / "db.ndjson")
    db.add(rec("a"))
    with pytest.raises(DuplicateIdError):
        db.add(rec("a", 5.0))
    assert len(db) == 1


def test_add_many_reload_identical(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    rng = random.Random(3)
    records = []
    for _ in range(100):
        r = random_record(rng)
        records.append(r)
        db.add(r)
    assert list(Database.load(path).records) == records


def test_change_updates_pose(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    db.add(rec("a", 1.0))
    db.change(rec("a", 9.0, yaw=1.0))
    assert Database.load(path).get("a").x == 9.0
    with pytest.raises(NotFoundError):
        db.change(rec("nope"))


def test_change_to_same_pose_idempotent(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    db.add(rec("a", 1.25, 2.5, yaw=0.75))
    before = path.read_bytes()
    db.change(rec("a", 1.25, 2.5, yaw=0.75))
    assert path.read_bytes() == before


def test_delete(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    db.add(rec("a"))
    db.delete("a")
    assert path.read_bytes() == b""
    with pytest.raises(NotFoundError):
        db.delete("a")


def test_empty_save_writes_empty_file(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database(path)
    db.save()
    assert path.exists() and path.read_bytes() == b""


def test_large_db_round_trips_bit_identically(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    rng = random.Random(17)
    for _ in range(1000):
        db.add(random_record(rng))
    first = path.read_bytes()
    Database.load(path).save()
    assert path.read_bytes() == first


def test_model_based_random_ops(tmp_path):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    rng = random.Random(42)
    model = {}
    order = []
    for step in range(500):
        roll = rng.random()
        if roll < 0.5 or not model:
            r = random_record(rng)
            if r.id in model:
                continue
            db.add(r)
            model[r.id] = r
            order.append(r.id)
        elif roll < 0.75:
            bid = rng.choice(order)
            r = rec(bid, rng.uniform(-5, 5), rng.uniform(-5, 5))
            db.change(r)
            model[bid] = r
        else:
            bid = rng.choice(order)
            db.delete(bid)
            del model[bid]
            order.remove(bid)
        if step % 50 == 0:
            db = Database.load(path)  # interleaved reload
        assert {r.id: r for r in db.records} == model
        assert {r.id: r for r in Database.load(path).records} == model


def test_failed_save_leaves_file_and_memory_intact(tmp_path, monkeypatch):
    path = tmp_path / "db.ndjson"
    db = Database.load(path)
    db.add(rec("a", 1.0))
    before_file = path.read_bytes()
    before_records = db.records

    def boom(src, dst):
        raise OSError("simulated crash between temp write and rename")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(SaveError):
        db.add(rec("b", 2.0))
    monkeypatch.undo()

    assert path.read_bytes() == before_file
    assert db.records == before_records
    assert list(Database.load(path).records) == list(before_records)
