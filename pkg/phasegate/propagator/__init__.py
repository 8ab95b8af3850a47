"""Chebychev propagation and recorders."""
