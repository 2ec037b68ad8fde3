"""stlsyn: automaton-guided control synthesis for non-nested STL."""

__version__ = "0.1.0"
