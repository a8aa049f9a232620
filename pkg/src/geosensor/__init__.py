"""Tweets about disease research papers as a spatial sensor of disease burden.

Cleans free-text tweet locations against a gazetteer, aggregates burden and
publication counts per region, fits Poisson regressions of tweet counts, and
renders dot-overlaid choropleth maps.
"""

__version__ = "0.1.0"
