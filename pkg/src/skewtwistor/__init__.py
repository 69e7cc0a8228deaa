"""Integrability of almost complex structures on products of twistor spaces
of 4-manifolds carrying a metric connection with skew torsion."""

__version__ = "0.1.0"
