"""Divisor theory of twice-marked finite graphs: ranks, transmission
permutations, Demazure products and Brill--Noether style certifiers."""

__version__ = "0.1.0"
