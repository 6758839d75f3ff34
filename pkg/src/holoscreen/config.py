"""Shared numeric tolerances and global size caps.

Every comparison threshold used by the library lives in one record so that
tests, demos and the command-line runner agree on what counts as equal.
The environment variable ``HOLOSCREEN_TOL`` overrides the verdict-level
tolerances (spectral cutoffs keep their defaults).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

#: Dense joint dimension cap, 2**12.  Keeps every brute-force oracle affordable.
MAX_JOINT_DIM = 4096

#: Ground-set cap for exact joint enumeration (contexts, Markov blankets).
MAX_GROUND_VARS = 16


@dataclass(frozen=True)
class Tolerances:
    normalization: float = 1e-10    # state norm / density trace deviation
    hermiticity: float = 1e-10
    unitarity: float = 1e-10        # max |U^dag U - I|
    eigenvalue_floor: float = -1e-10  # density eigenvalues may dip this far below 0
    entropy_cutoff: float = 1e-12   # eigenvalues below this contribute 0 to entropy
    schmidt: float = 1e-10          # singular values above this count toward rank
    weight_sum: float = 1e-10       # interaction weights must sum to 1 this tightly
    axis_norm: float = 1e-10        # measurement axes must be unit vectors
    infomorphism: float = 1e-9      # commuting-square agreement
    feasibility: float = 1e-9       # LP marginal residual for a feasible verdict
    blanket: float = 1e-9           # conditional-independence factorization gap
    entropy_match: float = 1e-9     # S(A) vs S(B) agreement on pure joint states


def _from_env() -> Tolerances:
    raw = os.environ.get("HOLOSCREEN_TOL")
    if raw is None:
        return Tolerances()
    value = float(raw)
    if value <= 0:
        raise ValueError(f"HOLOSCREEN_TOL must be positive, got {raw!r}")
    return Tolerances(
        normalization=value,
        hermiticity=value,
        unitarity=value,
        weight_sum=value,
        axis_norm=value,
        infomorphism=value,
        feasibility=value,
        blanket=value,
        entropy_match=value,
    )


TOL = _from_env()


def refresh_tolerances() -> Tolerances:
    """Re-read ``HOLOSCREEN_TOL`` and swap the module-level record."""
    global TOL
    TOL = _from_env()
    return TOL
