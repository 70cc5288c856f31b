"""Figure scripts consuming thermalprop's CSV exports (documented schemas
only; this package never imports the simulation code)."""

__version__ = "0.1.0"
