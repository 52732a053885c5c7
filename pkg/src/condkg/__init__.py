"""condkg: structure conditional statements in biomedical text into fact and
condition tuples and aggregate them into a queryable knowledge graph."""

__version__ = "0.1.0"
