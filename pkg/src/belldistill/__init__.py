"""Bell violation and bipartite distillability for N-qubit states."""
