"""Riemann extensions of affine connections built from polynomial ODE systems."""
