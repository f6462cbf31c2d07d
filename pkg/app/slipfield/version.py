__version__ = "1.0.1"
VERSION = __version__
