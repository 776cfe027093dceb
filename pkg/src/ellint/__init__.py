"""Elliptic gamma functions, Sklyanin-algebra operators and integral solutions of the Yang-Baxter equation."""
