"""Finite-model verification of Hecke-correspondence combinatorics on symplectic
modules over Z/p and Z/p^2, Satake eigenvalue congruences and toy descent
identities."""

__version__ = "0.1.0"
