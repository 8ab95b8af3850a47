"""Channel models, Hamiltonians and gate targets."""
