from .app import Server
from .config import ServerConfig
from .core import AppCore, EventHub
from .experiment import ExperimentRun

__all__ = ["Server", "ServerConfig", "AppCore", "EventHub", "ExperimentRun"]
