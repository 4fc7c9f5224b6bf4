"""Floor-beacon robot navigation: beacon lifecycle server, framed TCP robot
bridge, occupancy-grid robot simulator, and the experiment evaluation kit."""

__version__ = "0.1.0"
