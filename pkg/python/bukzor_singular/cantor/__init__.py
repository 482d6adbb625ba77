"""Nested ball trees for the singular-vector Cantor construction."""
