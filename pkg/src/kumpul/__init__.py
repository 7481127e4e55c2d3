"""kumpul: multi-source text collection, preprocessing, and analysis platform."""

__version__ = "0.1.0"
