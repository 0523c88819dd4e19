"""Cryptanalysis lab for finite semigroup and group actions."""
