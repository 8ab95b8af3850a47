"""Command line front end and experiment runners."""
