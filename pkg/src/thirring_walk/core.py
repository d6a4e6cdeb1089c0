"""Shared numeric scaffolding: walk parameters, zone reduction, branch-fixed arccos."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

TOL_ENV = "THIRRING_WALK_TOL_SCALE"

UNITARY_TOL = 1e-12
ROOT_TOL = 1e-10


def tol_scale() -> float:
    """Multiplier applied to every default tolerance (read from the environment)."""
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1.0
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV} must be positive, got {raw!r}")
    return value


def unitary_tol() -> float:
    return UNITARY_TOL * tol_scale()


def root_tol() -> float:
    return ROOT_TOL * tol_scale()


def reduce_to_zone(x):
    """Map ``x`` into the Brillouin zone (-pi, pi], keeping ``x`` mod 2pi.

    Works on scalars and arrays.  ``-pi`` maps to ``pi``.
    """
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y <= -np.pi, y + 2 * np.pi, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def reduce_complex_momentum(k):
    """Reduce the real part of a complex momentum into (-pi, pi]."""
    k = np.asarray(k, dtype=complex)
    out = reduce_to_zone(k.real) + 1j * k.imag
    if np.ndim(out) == 0:
        return complex(out)
    return out


def principal_arccos(x):
    """Principal arccosine on the whole complex plane.

    Off the real cuts this is numpy's principal branch (Re in [0, pi]).  Points
    lying exactly on a cut are resolved as ``i*acosh(x)`` for ``x > 1`` and
    ``pi - i*acosh(-x)`` for ``x < -1``, so ``arccos(-x) = pi - arccos(x)`` also
    holds on the cuts.
    """
    z = np.asarray(x, dtype=complex)
    w = np.arccos(z)
    on_cut = (z.imag == 0) & (np.abs(z.real) > 1)
    if np.any(on_cut):
        re = z.real
        fixed = np.where(re > 1, 1j * np.arccosh(np.abs(re)), np.pi - 1j * np.arccosh(np.abs(re)))
        w = np.where(on_cut, fixed, w)
    if w.ndim == 0:
        return complex(w)
    return w


@dataclass(frozen=True)
class WalkParams:
    """Mass and coupling of the two-particle Thirring walk.

    ``m`` is the off-diagonal (mass) coupling ``mu`` of the Dirac coin; the
    hopping amplitude is ``nu = sqrt(1 - m**2)``.  ``chi`` is stored reduced to
    (-pi, pi].
    """

    m: float
    chi: float = 0.0
    mu: float = field(init=False)
    nu: float = field(init=False)

    def __post_init__(self):
        m = float(self.m)
        if not (0.0 < m < 1.0):
            raise ValueError(f"mass parameter must lie in (0, 1), got {m}")
        if not math.isfinite(float(self.chi)):
            raise ValueError("coupling chi must be finite")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "mu", m)
        object.__setattr__(self, "nu", math.sqrt(1.0 - m * m))
        object.__setattr__(self, "chi", reduce_to_zone(float(self.chi)))

    def with_chi(self, chi: float) -> "WalkParams":
        return WalkParams(self.m, chi)


def unitarity_error(mat) -> float:
    """Spectral-norm distance ``||U^dagger U - I||``."""
    mat = np.asarray(mat)
    eye = np.eye(mat.shape[-1])
    return float(np.linalg.norm(mat.conj().T @ mat - eye, ord=2))


def sign_value(s) -> int:
    """Accept +1/-1 or '+'/'-' and return the integer sign."""
    if s in (1, "+", "+1"):
        return 1
    if s in (-1, "-", "-1"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {s!r}")
