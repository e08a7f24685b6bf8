"""scistory: storyline analysis engine for scientific papers."""

__version__ = "0.1.0"
