"""The Dirac walk on the line.

Momentum convention: ``|p> = (2 pi)^(-1/2) sum_x exp(-i p x) |x>``, so the
translation ``T|x> = |x+1>`` acts on ``|p>`` as ``exp(i p)``.  The momentum-space
matrix ``W(p)`` is treated as ground truth; the position-space stencil below is
its inverse transform::

    (W psi)_up(x)   = nu * psi_up(x - 1) - i mu * psi_dn(x)
    (W psi)_down(x) = -i mu * psi_up(x) + nu * psi_dn(x + 1)

i.e. ``nu T`` acts on the upper component and ``nu T^dagger`` on the lower one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WalkParams, principal_arccos, sign_value


class SupportError(RuntimeError):
    """Raised when a state on an open window would leave the window."""


def dispersion(p, params: WalkParams):
    """omega(p) = Arccos(nu cos p); real in [0, pi] for real p."""
    p = np.asarray(p)
    w = principal_arccos(params.nu * np.cos(p.astype(complex)))
    if np.isrealobj(p) or np.all(np.imag(p) == 0):
        w = np.real(w)
        return float(w) if np.ndim(w) == 0 else w
    return w


def g_s(p, s, params: WalkParams):
    """g_s(p) = -i (s sin omega(p) + nu sin p).

    For complex ``p`` far from the real axis one branch is a difference of two
    exponentially large terms.  Since ``g_+ g_- = mu^2`` exactly, the small
    branch is obtained from the large one instead of by subtraction.
    """
    s = sign_value(s)
    pc = np.asarray(p, dtype=complex)
    w = principal_arccos(params.nu * np.cos(pc))
    sin_w = np.sin(w)
    nu_sin = params.nu * np.sin(pc)
    h_same = s * sin_w + nu_sin
    h_other = -s * sin_w + nu_sin
    # h_same * h_other = -mu^2
    use_identity = np.abs(h_same) < np.abs(h_other)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(use_identity, -(params.mu**2) / h_other, h_same)
    out = -1j * h
    return complex(out) if np.ndim(out) == 0 else out


def walk_matrix(p, params: WalkParams) -> np.ndarray:
    """2x2 momentum-space walk matrix W(p)."""
    p = complex(p)
    nu, mu = params.nu, params.mu
    return np.array(
        [[nu * np.exp(1j * p), -1j * mu], [-1j * mu, nu * np.exp(-1j * p)]],
        dtype=complex,
    )


@dataclass(frozen=True)
class DiracEigenvector:
    s: int
    p: complex
    vec: np.ndarray

    def eigenvalue(self, params: WalkParams) -> complex:
        return complex(np.exp(-1j * self.s * principal_arccos(params.nu * np.cos(complex(self.p)))))


def norm_factor(p, s, params: WalkParams):
    """|N_s(p)| = sqrt(mu^2 + |g_s(p)|^2)."""
    return np.sqrt(params.mu**2 + np.abs(g_s(p, s, params)) ** 2)


def eigenvector(p, s, params: WalkParams) -> DiracEigenvector:
    s = sign_value(s)
    g = g_s(p, s, params)
    n = float(norm_factor(p, s, params))
    assert n > 0.0, "eigenvector normalisation vanished; mu must be positive"
    vec = np.array([-1j * params.mu, g], dtype=complex) / n
    return DiracEigenvector(s=s, p=complex(p), vec=vec)


def position_step(state: np.ndarray, params: WalkParams, periodic: bool = True) -> np.ndarray:
    """One step of the Dirac walk on a ``(2, L)`` array of amplitudes.

    On an open window the first and last sites must be empty, otherwise
    :class:`SupportError` is raised instead of silently truncating.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim != 2 or state.shape[0] != 2:
        raise ValueError("state must have shape (2, L)")
    up, dn = state
    nu, mu = params.nu, params.mu
    if periodic:
        up_in = np.roll(up, 1)
        dn_in = np.roll(dn, -1)
    else:
        if up[-1] != 0 or dn[0] != 0:
            raise SupportError("state would leave the open window")
        up_in = np.concatenate(([0.0], up[:-1]))
        dn_in = np.concatenate((dn[1:], [0.0]))
    out = np.empty_like(state)
    out[0] = nu * up_in - 1j * mu * dn
    out[1] = -1j * mu * up + nu * dn_in
    return out
