"""
Secrecy analysis of a mixed RF-FSO decode-and-forward relay.

This package contains:
- config: Paths, environment overrides and numerical policy constants
- errors: Exception hierarchy
- specfun: Gamma, hypergeometric and Meijer G kernels
- rf_channel: alpha-kappa-mu shadowed S-R link
- fso_channel: Malaga R-D / R-E links with pointing error
- metrics: SOP lower bound, SPSC and IP (closed form, asymptotic, quadrature)
- montecarlo: Event-level simulation oracle
- scenario, presets, runner: Scenario files, built-in presets and CSV sweeps
"""

from .config import *
