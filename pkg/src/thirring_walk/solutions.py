"""Closed-form eigensolutions of the interacting walk U2(chi, p).

Scattering states carry a unit-modulus transmission coefficient; bound states
come from the zeros of that coefficient at complex relative momentum; the
three-site molecule states exist when ``exp(i chi) = exp(+-2ip)``; at ``p = 0`` the
odd branch ``v_k^{+-}`` spans a stationary eigenspace.

Branch ``+1`` is built on the even pair ``(+, +)`` and ``-1`` on the odd pair
``(+, -)``.  All P-layout states use :class:`~thirring_walk.two_particle.FixedPState`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import WalkParams, principal_arccos, reduce_to_zone, root_tol, sign_value
from .single_particle import dispersion, g_s
from .two_particle import (
    FixedPState,
    antisymmetrize_y,
    omega_sr,
    projector_P,
    two_eigenvector,
)

K_MAX = 20.0
RESONANCE_TOL = 1e-14

# even/odd degeneracy families: (s, r, k-shift, k-sign) for v_k, v_{k-pi}, v_{-k}, v_{pi-k}
_FAMILIES = {
    1: ((1, 1, 0.0, 1), (-1, -1, -np.pi, 1), (1, 1, 0.0, -1), (-1, -1, np.pi, -1)),
    -1: ((1, -1, 0.0, 1), (-1, 1, -np.pi, 1), (-1, 1, 0.0, -1), (1, -1, np.pi, -1)),
}


class ResonanceWarning(RuntimeWarning):
    pass


class NoBoundStateError(RuntimeError):
    """No zero of T+- was found on any of the four lines; carries the scan data."""

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan


@dataclass(frozen=True)
class TransmissionCoefficient:
    sign: int
    value: complex
    p: float
    k: complex
    chi: float
    resonance: bool = False


def _numerator_denominator(p, k, chi, sign, params):
    r = sign_value(sign)
    a = g_s(p + k, 1, params)
    b = g_s(p - k, r, params)
    phase = np.exp(-1j * chi)
    return a + phase * b, b + phase * a


def transmission(p, k, chi, sign, params: WalkParams) -> TransmissionCoefficient:
    """T+ (sign=+1) or T- (sign=-1).

    A vanishing denominator is reported as a resonance (value nan) rather than
    raised.
    """
    sign = sign_value(sign)
    if reduce_to_zone(chi) == 0.0:
        # numerator and denominator coincide identically
        return TransmissionCoefficient(sign, 1.0 + 0.0j, float(p), complex(k), float(chi))
    if np.isreal(k) and np.isreal(p):
        # g_s is -i times a real number on the real axis, and then the
        # denominator is exp(-i chi) times the conjugate of the numerator
        h_a = float(np.real(1j * g_s(p + k, 1, params)))
        h_b = float(np.real(1j * g_s(p - k, sign, params)))
        num = h_a + np.exp(-1j * chi) * h_b
        if abs(num) < RESONANCE_TOL:
            return TransmissionCoefficient(sign, complex("nan"), float(p), complex(k), float(chi), True)
        value = np.exp(1j * chi) * num / np.conj(num)
        return TransmissionCoefficient(sign, complex(value), float(p), complex(k), float(chi))
    num, den = _numerator_denominator(p, k, chi, sign, params)
    if abs(den) < RESONANCE_TOL:
        return TransmissionCoefficient(sign, complex("nan"), float(p), complex(k), float(chi), True)
    return TransmissionCoefficient(sign, complex(num / den), float(p), complex(k), float(chi))


@dataclass
class EigenSolution:
    """An analytic eigenvector of U2(chi, p).

    ``state`` is the P-layout amplitude on a window (scattering, bound,
    localized).  Stationary solutions live partly outside the P-subspace and are
    stored on a y-ring in ``y_state`` instead.
    """

    kind: str
    p: float
    k: complex
    chi: float
    omega: float
    branch: int
    state: FixedPState | None = None
    y_state: np.ndarray | None = None
    transmission: complex | None = None
    params: WalkParams | None = None
    info: dict = field(default_factory=dict)

    @property
    def eigenvalue(self) -> complex:
        return complex(np.exp(-1j * self.omega))


# --------------------------------------------------------------------------
# scattering and bound states


def _family_vectors(p, k, sign, params):
    out = []
    for s, r, shift, ksign in _FAMILIES[sign]:
        out.append(two_eigenvector(p, ksign * k + shift, s, r, params).vec)
    return out


def _plane_wave_solution(p, k, chi, sign, t, params, Z) -> FixedPState:
    """Incoming-minus-reflected plane waves on z >= 0, antisymmetrized to z < 0.

    Scaled so that the incoming amplitude equals one (lambda = 1).
    """
    v_k, v_kpi, v_mk, v_pimk = _family_vectors(p, k, sign, params)
    inc_odd, out_odd = v_k + v_kpi, v_mk + v_pimk
    inc_even, out_even = v_k - v_kpi, v_mk - v_pimk
    z = np.arange(0, Z + 1)
    e_odd_in = np.exp(-1j * (2 * z + 1) * k)
    e_even_in = np.exp(-2j * z * k)
    if t == 0:
        # bound state: the outgoing waves grow and carry zero weight
        e_odd_out = e_even_out = np.zeros_like(e_odd_in)
    else:
        e_odd_out = np.exp(1j * (2 * z + 1) * k)
        e_even_out = np.exp(2j * z * k)

    amp = np.zeros((4, 2 * Z + 1), dtype=complex)
    right = slice(Z, 2 * Z + 1)
    for j in (0, 3):
        amp[j, right] = inc_odd[j] * e_odd_in - t * out_odd[j] * e_odd_out
    for j in (1, 2):
        amp[j, right] = inc_even[j] * e_even_in - t * out_even[j] * e_even_out
    amp[1, Z] *= np.exp(-1j * chi)
    amp *= 0.5

    # antisymmetry: psi^{1,4}(z) = -psi^{1,4}(-z-1), psi^2(z) = -psi^3(-z) for z < 0
    neg = np.arange(-Z, 0)
    for j in (0, 3):
        amp[j, neg + Z] = -amp[j, -neg - 1 + Z]
    amp[1, neg + Z] = -amp[2, -neg + Z]
    amp[2, neg + Z] = -amp[1, -neg + Z]
    return FixedPState(p=p, amp=amp, periodic=False)


def _is_degenerate_momentum(k) -> bool:
    kr = reduce_to_zone(k)
    return any(abs(kr - c) < 1e-12 for c in (0.0, np.pi / 2, -np.pi / 2, np.pi, -np.pi))


def _is_special_total_momentum(p) -> bool:
    q = math.remainder(float(p), np.pi / 2)
    return abs(q) < 1e-12


def scattering_state(p, k, chi, branch, params: WalkParams, Z: int = 64) -> EigenSolution:
    """Generalized eigenvector with real relative momentum ``k``.

    Eigenvalue ``exp(-i omega_{+,branch}(p, k))``.
    """
    branch = sign_value(branch)
    k = float(k)
    if _is_special_total_momentum(p):
        raise ValueError("p in {0, pi/2} (mod pi/2): use stationary_solutions")
    if _is_degenerate_momentum(k):
        raise ValueError(f"k = {k} collapses the degeneracy class (k in {{0, +-pi/2, pi}})")
    tc = transmission(p, k, chi, branch, params)
    if tc.resonance:
        raise ValueError(f"transmission coefficient has a pole at p={p}, k={k}, chi={chi}")
    state = _plane_wave_solution(p, k, chi, branch, tc.value, params, Z)
    omega = reduce_to_zone(float(np.real(omega_sr(p, k, 1, branch, params))))
    return EigenSolution(
        kind="scattering", p=float(p), k=complex(k), chi=float(chi), omega=omega,
        branch=branch, state=state, transmission=tc.value, params=params,
    )


# the two branches only give unit-modulus eigenvalues on these lines
_LINES = {1: (0, 2), -1: (1, -1)}


def _line_indicator(p, chi, sign, line, params):
    """Real function of kappa whose zeros are the zeros of T_sign on k = line*pi/2 + i kappa.

    On these lines ``exp(i chi/2) * numerator`` is purely imaginary (branch +)
    or purely real (branch -), so one real part carries all the information.
    """
    kr = line * np.pi / 2
    rot = np.exp(0.5j * chi)

    def f(kappa):
        num, _ = _numerator_denominator(p, kr + 1j * np.asarray(kappa), chi, sign, params)
        u = rot * num
        return np.imag(u) if sign == 1 else np.real(u)

    return f


def _kappa_grid(k_max: float, n: int = 2400) -> np.ndarray:
    return -np.geomspace(1e-9, k_max, n)[::-1]


def scan_bound_roots(p, chi, params: WalkParams, k_max: float = K_MAX, n_grid: int = 2400) -> list[dict]:
    """All zeros of T+ on Gamma_0, Gamma_2 and of T- on Gamma_{+-1} with kappa < 0."""
    roots = []
    kap = _kappa_grid(k_max, n_grid)
    for sign, lines in _LINES.items():
        for line in lines:
            f = _line_indicator(p, chi, sign, line, params)
            vals = f(kap)
            flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
            exact = np.nonzero(vals == 0)[0]
            for i in flips:
                kappa = brentq(f, kap[i], kap[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
                roots.append({"sign": sign, "line": line, "kappa": float(kappa)})
            for i in exact:
                roots.append({"sign": sign, "line": line, "kappa": float(kap[i])})
    for root in roots:
        k = root["line"] * np.pi / 2 + 1j * root["kappa"]
        root["k"] = complex(k)
        num, den = _numerator_denominator(p, k, chi, root["sign"], params)
        root["abs_T"] = float(abs(num / den))
        root["omega"] = complex(omega_sr(p, k, 1, root["sign"], params))
    return roots


def off_line_minimum(p, chi, params: WalkParams, k_max: float = K_MAX, n_grid: int = 2400) -> float:
    """Smallest relative |numerator| of T+ on Gamma_{+-1} and T- on Gamma_{0,2}.

    These lines cannot host bound states (the eigenvalue would not be unimodular);
    a value bounded away from zero confirms it numerically.
    """
    kap = _kappa_grid(k_max, n_grid)
    best = np.inf
    for sign, lines in ((1, (1, -1)), (-1, (0, 2))):
        for line in lines:
            k = line * np.pi / 2 + 1j * kap
            num, _ = _numerator_denominator(p, k, chi, sign, params)
            scale = np.abs(g_s(p + k, 1, params)) + np.abs(g_s(p - k, sign, params))
            best = min(best, float(np.min(np.abs(num) / scale)))
    return best


def _check_interacting(chi):
    if abs(math.sin(chi)) < 1e-12:
        kind = "1" if math.cos(chi) > 0 else "-1"
        raise ValueError(f"interaction trivial for bound states: e^{{i chi}} = {kind}")


def bound_state_momentum(p, chi, params: WalkParams, k_max: float = K_MAX) -> tuple[complex, int]:
    """Unique complex momentum with Im k < 0 at which T+ or T- vanishes."""
    _check_interacting(chi)
    if _is_special_total_momentum(p):
        raise ValueError("p in {0, pi/2} (mod pi/2): the lines meet a branch cut; use stationary_solutions")
    roots = scan_bound_roots(p, chi, params, k_max=k_max)
    good = [r for r in roots if r["abs_T"] <= root_tol() and abs(r["omega"].imag) <= 1e-9]
    if not good:
        raise NoBoundStateError(f"no bound state found for p={p}, chi={chi}", scan=roots)
    if len(good) > 1:
        warnings.warn(f"{len(good)} roots found for p={p}, chi={chi}; taking the most decaying")
        good.sort(key=lambda r: r["kappa"])
    return good[0]["k"], good[0]["sign"]


def bound_state(p, chi, params: WalkParams, Z: int = 64) -> EigenSolution:
    """Normalized molecule state decaying like exp(2 Im(k) z)."""
    k, branch = bound_state_momentum(p, chi, params)
    state = _plane_wave_solution(p, k, chi, branch, 0.0, params, Z).normalized()
    omega = reduce_to_zone(float(np.real(omega_sr(p, k, 1, branch, params))))
    return EigenSolution(
        kind="bound", p=float(p), k=k, chi=float(chi), omega=omega, branch=branch,
        state=state, transmission=0.0, params=params,
        info={"decay_rate": float(-2 * k.imag), "line": int(round(k.real / (np.pi / 2)))},
    )


# --------------------------------------------------------------------------
# localized molecule states


def localized_state(p, chi, params: WalkParams, Z: int = 2) -> EigenSolution:
    """Three-site eigenvector with eigenvalue exp(+-2ip); needs exp(i chi) = exp(+-2ip).

    Supported on y in {-1, 0, 1}: components 1, 4 at y = +-1 and 2, 3 at y = 0.
    """
    if Z < 1:
        raise ValueError("window must contain z in {-1, 0}")
    plus = abs(np.exp(1j * chi) - np.exp(2j * p)) < 1e-12
    minus = abs(np.exp(1j * chi) - np.exp(-2j * p)) < 1e-12
    if not (plus or minus):
        raise ValueError(
            "localized states need exp(i chi) = exp(+-2ip); "
            f"got chi={chi}, 2p={2 * p}"
        )
    sign = 1 if plus else -1
    mu, nu = params.mu, params.nu
    edge = 1j * np.exp(sign * 1j * p)
    # sign +1 uses component 1, sign -1 component 4
    comp = 0 if sign == 1 else 3
    amp = np.zeros((4, 2 * Z + 1), dtype=complex)
    # y = 1 is z = 0 (odd components); y = -1 is z = -1
    amp[comp, Z] = -edge
    amp[comp, Z - 1] = edge
    amp[1, Z] = mu / nu
    amp[2, Z] = -mu / nu
    state = FixedPState(p=p, amp=amp, periodic=False)
    return EigenSolution(
        kind="localized", p=float(p), k=complex(np.nan), chi=float(chi),
        omega=float(reduce_to_zone(-2 * sign * p)), branch=sign, state=state, params=params,
    )


# --------------------------------------------------------------------------
# p = 0 stationary subspace


def _fermionic_plane_wave(k, ny, params, s=1, r=-1):
    from .two_particle import plane_wave_y

    v = two_eigenvector(0.0, k, s, r, params).vec
    return antisymmetrize_y(plane_wave_y(v, k, ny))


def stationary_solutions(params: WalkParams, k: float, ny: int = 64) -> tuple[EigenSolution, EigenSolution]:
    """Eigenvalue-1 Fermionic eigenvectors of U2(chi, 0) built from v_k^{+-}.

    Returns ``(outside_P, inside_P)`` on a y-ring of ``ny`` sites:

    * the (I - P) part of the antisymmetrized v_k^{+-} plane wave, which never
      meets the interaction;
    * a combination of the k and -k waves inside the P-subspace whose
      opposite-spin amplitude at y = 0 cancels.

    Both are fixed by U2(chi, 0) for every chi.  ``k`` is snapped to the ring
    grid 2 pi j / ny.
    """
    if ny % 2:
        raise ValueError("ny must be even")
    j = int(round(k * ny / (2 * np.pi)))
    k = reduce_to_zone(2 * np.pi * j / ny)
    wave = _fermionic_plane_wave(k, ny, params)
    outside = wave - projector_P(wave)
    inside_k = projector_P(wave)
    inside_mk = projector_P(_fermionic_plane_wave(-k, ny, params))
    c_k, c_mk = inside_k[1, 0], inside_mk[1, 0]
    inside = c_mk * inside_k - c_k * inside_mk
    sols = []
    for label, psi in (("outside_P", outside), ("inside_P", inside)):
        n = np.linalg.norm(psi)
        if n < 1e-12:
            raise ValueError(f"stationary combination {label} vanishes at k={k}")
        sols.append(
            EigenSolution(
                kind="stationary", p=0.0, k=complex(k), chi=float("nan"), omega=0.0,
                branch=-1, y_state=psi / n, params=params, info={"sector": label},
            )
        )
    return sols[0], sols[1]


def stationary_profiles(params: WalkParams, y_max: int = 40, n_nodes: int = 2048) -> dict:
    """Quadrature of int dk (v_k^{+-} -+ v_k^{-+}) exp(-i y k) over the zone at p = 0.

    Uniform trapezoid rule on (-pi, pi]; returns y, the two amplitude arrays
    (shape (4, ny)) and their spin-summed probabilities normalized over the
    y-window.
    """
    if n_nodes < 2048:
        raise ValueError("use at least 2048 quadrature nodes")
    ks = -np.pi + 2 * np.pi * (np.arange(n_nodes) + 1) / n_nodes
    y = np.arange(-y_max, y_max + 1)
    v_pm = np.array([two_eigenvector(0.0, k, 1, -1, params).vec for k in ks])
    v_mp = np.array([two_eigenvector(0.0, k, -1, 1, params).vec for k in ks])
    kernel = np.exp(-1j * np.outer(ks, y)) * (2 * np.pi / n_nodes)
    out = {"y": y}
    for label, vec in (("minus", v_pm - v_mp), ("plus", v_pm + v_mp)):
        amp = vec.T @ kernel
        prob = np.sum(np.abs(amp) ** 2, axis=0)
        out[label] = amp
        out[f"{label}_prob"] = prob / prob.sum()
    return out


# --------------------------------------------------------------------------
# continuous spectrum


def continuous_bands(p, params: WalkParams) -> dict:
    """Band edges of the continuous spectrum at total momentum p.

    ``pair_edge`` = 2 omega(p): the (+,+)/(-,-) band is |omega| >= pair_edge.
    ``odd_edge`` = pi - 2 Arccos(nu |sin p|): the (+,-) band is |omega| <= odd_edge.
    Gaps are the two intervals odd_edge < |omega| < pair_edge.
    """
    nu = params.nu
    pair_edge = 2 * float(np.real(principal_arccos(nu * abs(math.cos(p)))))
    odd_edge = math.pi - 2 * float(np.real(principal_arccos(nu * abs(math.sin(p)))))
    return {
        "p": float(p),
        "edges": (pair_edge, -pair_edge, odd_edge, -odd_edge),
        "pair_edge": pair_edge,
        "odd_edge": odd_edge,
        "gaps": ((odd_edge, pair_edge), (-pair_edge, -odd_edge)),
    }


def gap_distance(omega, p, params: WalkParams) -> float:
    """Signed distance of |omega| from the nearest band edge; positive inside a gap."""
    bands = continuous_bands(p, params)
    a = abs(reduce_to_zone(float(omega)))
    return min(a - bands["odd_edge"], bands["pair_edge"] - a)


def degeneracy_scan(p, omega, params: WalkParams, n_grid: int = 4096) -> dict:
    """All real (s, r, k) with exp(-i omega_{sr}(p, k)) = exp(-i omega)."""
    ks = -np.pi + 2 * np.pi * (np.arange(n_grid) + 1) / n_grid
    ks = np.concatenate(([ks[-1] - 2 * np.pi], ks))
    found = []
    for s in (1, -1):
        for r in (1, -1):

            def f(k, s=s, r=r):
                return reduce_to_zone(np.real(omega_sr(p, k, s, r, params)) - omega)

            vals = f(ks)
            for i in range(len(ks) - 1):
                a, b = vals[i], vals[i + 1]
                if abs(a - b) > np.pi:
                    continue
                if a == 0.0 and i > 0:
                    found.append((s, r, float(reduce_to_zone(ks[i]))))
                elif a * b < 0:
                    k = brentq(f, ks[i], ks[i + 1], xtol=1e-15)
                    found.append((s, r, float(reduce_to_zone(k))))
    result = {"p": float(p), "omega": float(omega), "solutions": found, "warning": None}
    if len(found) != 4:
        result["warning"] = f"{len(found)} solutions (band edge or outside the continuous spectrum)"
    return result
