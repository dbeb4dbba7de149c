"""Numerical services."""
