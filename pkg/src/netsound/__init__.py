"""netsound: peripheral network awareness through a configurable soundscape."""

__version__ = "0.1.0"
