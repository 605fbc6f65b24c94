"""Values of Kähler differentials on plane branches."""

__version__ = "0.1.0"
