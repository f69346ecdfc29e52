"""Exact verification of higher symmetries for hyperbolic equations
u_xy = F(u_x, u_y, u), with a catalog of equations and symmetry flows,
transformation checks, and an independent numeric oracle."""

__version__ = "0.1.0"
