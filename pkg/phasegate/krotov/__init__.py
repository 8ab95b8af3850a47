"""Krotov optimization of control fields."""
