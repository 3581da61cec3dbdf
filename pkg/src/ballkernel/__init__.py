"""Kernel subspaces of H_d^t, ball automorphisms and weighted Hardy spaces."""
