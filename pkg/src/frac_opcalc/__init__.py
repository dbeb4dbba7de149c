"""frac-opcalc: operational solutions of linear fractional differential equations."""

__version__ = "0.1.0"
