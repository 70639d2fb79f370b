"""Inelastic bouncing of ultracold atoms on an evanescent-wave mirror.

Submodules: ``core`` (constants, kinematics), ``optics`` (evanescent
polarization), ``mirror`` (single bounce), ``montecarlo`` (ensemble and
optimizer), ``budget`` (dark-state scattering rates), ``config`` and
``cli``.
"""
__version__ = "0.1.0"
