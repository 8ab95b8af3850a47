"""Shared utilities for units and result tables."""
