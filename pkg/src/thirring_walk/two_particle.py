"""Two-particle operators of the Thirring walk.

Coin components are ordered ``(up up, up down, down up, down down)`` and
indexed 0..3 in arrays.  ``y = x1 - x2`` and ``w = x1 + x2``; at fixed half
total momentum ``p`` the centre-of-mass dependence is ``exp(-i p w)``.

Three representations are used:

* momentum form ``W2(p, k) = W(p + k) (x) W(p - k)``;
* the y-lattice at fixed ``p``: arrays of shape ``(4, Ny)``;
* the P-layout at fixed ``p`` (:class:`FixedPState`): components 0 and 3 live on
  ``y = 2z + 1`` and components 1 and 2 on ``y = 2z``, stored per ``z``.

The P-layout step is the component recurrence written out by hand; the
y-lattice step is assembled from the single-particle stencil.  Tests compare
the two.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import WalkParams, sign_value
from .single_particle import SupportError, dispersion, g_s, norm_factor, walk_matrix

EXCHANGE = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# W = sum_n A_n T^n for the single-particle walk
_A = {
    1: lambda prm: np.array([[prm.nu, 0], [0, 0]], dtype=complex),
    0: lambda prm: np.array([[0, -1j * prm.mu], [-1j * prm.mu, 0]], dtype=complex),
    -1: lambda prm: np.array([[0, 0], [0, prm.nu]], dtype=complex),
}


# --------------------------------------------------------------------------
# momentum form


def omega_sr(p, k, s, r, params: WalkParams):
    """Two-particle dispersion s*omega(p+k) + r*omega(p-k)."""
    s, r = sign_value(s), sign_value(r)
    k = np.asarray(k)
    return s * dispersion(p + k, params) + r * dispersion(p - k, params)


def w2_momentum(p, k, params: WalkParams) -> np.ndarray:
    return np.kron(walk_matrix(p + k, params), walk_matrix(p - k, params))


@dataclass(frozen=True)
class TwoPEigenvector:
    s: int
    r: int
    p: float
    k: complex
    vec: np.ndarray

    def eigenvalue(self, params: WalkParams) -> complex:
        return complex(np.exp(-1j * omega_sr(self.p, self.k, self.s, self.r, params)))


def two_eigenvector(p, k, s, r, params: WalkParams) -> TwoPEigenvector:
    """v_k^{sr} = v_{p+k}^s (x) v_{p-k}^r in closed form."""
    s, r = sign_value(s), sign_value(r)
    mu = params.mu
    gs = g_s(p + k, s, params)
    gr = g_s(p - k, r, params)
    n = float(norm_factor(p + k, s, params) * norm_factor(p - k, r, params))
    vec = np.array([-(mu**2), -1j * mu * gr, -1j * mu * gs, gs * gr], dtype=complex) / n
    return TwoPEigenvector(s=s, r=r, p=float(p), k=complex(k), vec=vec)


# --------------------------------------------------------------------------
# y-lattice form at fixed p


def y_stencil(p, params: WalkParams) -> dict[int, np.ndarray]:
    """Coefficients C_d with ``(W2(p) psi)(y) = sum_d C_d psi(y - d)``."""
    coeffs: dict[int, np.ndarray] = {}
    for n1, a1 in _A.items():
        for n2, a2 in _A.items():
            d = n1 - n2
            term = np.exp(1j * p * (n1 + n2)) * np.kron(a1(params), a2(params))
            coeffs[d] = coeffs.get(d, 0) + term
    return coeffs


def apply_w2_y(psi: np.ndarray, p, params: WalkParams) -> np.ndarray:
    """Free two-particle step on a periodic y-ring, ``psi`` of shape (4, Ny)."""
    out = np.zeros_like(psi, dtype=complex)
    for d, c in y_stencil(p, params).items():
        out += c @ np.roll(psi, d, axis=1)
    return out


def interaction_y(psi: np.ndarray, chi: float) -> np.ndarray:
    """V(chi): phase exp(i chi) on opposite-spin components at y = 0 (index 0)."""
    out = np.array(psi, dtype=complex, copy=True)
    out[1:3, 0] *= np.exp(1j * chi)
    return out


def apply_u2_y(psi: np.ndarray, p, chi, params: WalkParams) -> np.ndarray:
    return apply_w2_y(interaction_y(psi, chi), p, params)


def y_values(ny: int) -> np.ndarray:
    """Signed y labels of ring indices 0..ny-1 (index 0 is y = 0)."""
    idx = np.arange(ny)
    return np.where(idx <= ny // 2, idx, idx - ny)


def projector_P(psi: np.ndarray) -> np.ndarray:
    """Keep components 0, 3 on odd y and 1, 2 on even y."""
    ny = psi.shape[1]
    if ny % 2:
        raise ValueError("y-ring size must be even")
    odd = (np.arange(ny) % 2).astype(bool)
    out = np.zeros_like(psi, dtype=complex)
    out[[0, 3]] = np.where(odd, psi[[0, 3]], 0)
    out[[1, 2]] = np.where(~odd, psi[[1, 2]], 0)
    return out


def exchange_y(psi: np.ndarray) -> np.ndarray:
    """Particle exchange: (X psi)(y) = E psi(-y)."""
    reflected = np.roll(psi[:, ::-1], 1, axis=1)
    return EXCHANGE @ reflected


def antisymmetrize_y(psi: np.ndarray) -> np.ndarray:
    return 0.5 * (psi - exchange_y(psi))


def plane_wave_y(vec: np.ndarray, k, ny: int) -> np.ndarray:
    """vec * exp(-i k y) on a ring of ny sites."""
    y = np.arange(ny)
    return np.outer(vec, np.exp(-1j * k * y))


# --------------------------------------------------------------------------
# P-layout


@dataclass
class FixedPState:
    """Two-particle state at fixed p on the P-subspace.

    ``amp[j, i]`` is component ``j`` at ``z = i - Z``.  With ``periodic=True`` the
    z-window is a ring of ``2Z + 1`` sites (a y-ring of ``4Z + 2`` sites).
    """

    p: float
    amp: np.ndarray
    periodic: bool = True

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=complex)
        if self.amp.ndim != 2 or self.amp.shape[0] != 4 or self.amp.shape[1] % 2 == 0:
            raise ValueError("amp must have shape (4, 2Z+1)")

    @property
    def Z(self) -> int:
        return (self.amp.shape[1] - 1) // 2

    @property
    def z(self) -> np.ndarray:
        return np.arange(-self.Z, self.Z + 1)

    def index(self, z: int) -> int:
        return z + self.Z

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def normalized(self) -> "FixedPState":
        return replace(self, amp=self.amp / self.norm())

    def copy(self) -> "FixedPState":
        return replace(self, amp=self.amp.copy())

    @classmethod
    def zeros(cls, p, Z: int, periodic: bool = True) -> "FixedPState":
        return cls(p=p, amp=np.zeros((4, 2 * Z + 1), dtype=complex), periodic=periodic)

    def antisymmetry_error(self) -> float:
        """max deviation from psi^{1,4}(-z) = -psi^{1,4}(z-1), psi^2(-z) = -psi^3(z)."""
        a = self.amp
        # comps 0,3: index of -z-1 for z in [-Z, Z-1] is reversal of the first 2Z sites
        e14 = np.abs(a[[0, 3], :-1] + a[[0, 3], :-1][:, ::-1]).max(initial=0.0)
        e23 = np.abs(a[1] + a[2][::-1]).max(initial=0.0)
        err = max(e14, e23)
        if self.periodic:
            err = max(err, float(np.abs(a[[0, 3], -1]).max()))
        return float(err)

    def antisymmetrized(self) -> "FixedPState":
        a = self.amp
        out = np.zeros_like(a)
        out[[0, 3], :-1] = 0.5 * (a[[0, 3], :-1] - a[[0, 3], :-1][:, ::-1])
        if not self.periodic:
            out[[0, 3], -1] = a[[0, 3], -1]
        out[1] = 0.5 * (a[1] - a[2][::-1])
        out[2] = 0.5 * (a[2] - a[1][::-1])
        return replace(self, amp=out)

    def to_y(self) -> tuple[np.ndarray, np.ndarray]:
        """Full y-lattice form: (y labels, array of shape (4, 4Z + 2)).

        y runs over ``-2Z .. 2Z + 1``.  For a periodic state the array is a ring
        with index ``y mod (4Z + 2)``.
        """
        Z = self.Z
        ny = 4 * Z + 2
        if self.periodic:
            psi = np.zeros((4, ny), dtype=complex)
            y_odd = (2 * self.z + 1) % ny
            y_even = (2 * self.z) % ny
            psi[0, y_odd] = self.amp[0]
            psi[3, y_odd] = self.amp[3]
            psi[1, y_even] = self.amp[1]
            psi[2, y_even] = self.amp[2]
            return y_values(ny), psi
        ys = np.arange(-2 * Z, 2 * Z + 2)
        psi = np.zeros((4, ny), dtype=complex)
        psi[0, 2 * self.z + 1 + 2 * Z] = self.amp[0]
        psi[3, 2 * self.z + 1 + 2 * Z] = self.amp[3]
        psi[1, 2 * self.z + 2 * Z] = self.amp[1]
        psi[2, 2 * self.z + 2 * Z] = self.amp[2]
        return ys, psi

    @classmethod
    def from_y_ring(cls, p, psi: np.ndarray) -> "FixedPState":
        """Inverse of :meth:`to_y` for a periodic ring of 4Z + 2 sites."""
        ny = psi.shape[1]
        if ny % 4 != 2:
            raise ValueError("y-ring size must be 4Z + 2")
        Z = (ny - 2) // 4
        z = np.arange(-Z, Z + 1)
        amp = np.empty((4, 2 * Z + 1), dtype=complex)
        amp[0] = psi[0, (2 * z + 1) % ny]
        amp[3] = psi[3, (2 * z + 1) % ny]
        amp[1] = psi[1, (2 * z) % ny]
        amp[2] = psi[2, (2 * z) % ny]
        return cls(p=p, amp=amp, periodic=True)


def _neighbour(a: np.ndarray, offset: int, periodic: bool) -> np.ndarray:
    """Array whose entry at z is a[z + offset]; zero-filled off an open window."""
    if periodic:
        return np.roll(a, -offset, axis=-1)
    out = np.zeros_like(a)
    if offset > 0:
        out[..., :-offset] = a[..., offset:]
    elif offset < 0:
        out[..., -offset:] = a[..., :offset]
    else:
        out[...] = a
    return out


def interaction_fixed_p(state: FixedPState, chi: float) -> FixedPState:
    """Multiply psi^2(0) and psi^3(0) by exp(i chi)."""
    amp = state.amp.copy()
    i0 = state.index(0)
    amp[1:3, i0] *= np.exp(1j * chi)
    return replace(state, amp=amp)


def _check_support(amp: np.ndarray, edge_tol: float):
    lost = max(np.abs(amp[[0, 1, 3], -1]).max(), np.abs(amp[2, 0]))
    if lost > edge_tol:
        raise SupportError(f"amplitude {lost:.3g} would leave the open z-window")


def _recurrence_rhs(phi: np.ndarray, p, params: WalkParams, periodic: bool) -> np.ndarray:
    nu, mu = params.nu, params.mu
    hop_p = -1j * mu * nu * np.exp(1j * p)
    hop_m = -1j * mu * nu * np.exp(-1j * p)
    f1, f2, f3, f4 = phi
    f3_next = _neighbour(f3, 1, periodic)
    prev = _neighbour(phi[[0, 1, 3]], -1, periodic)
    f1_prev, f2_prev, f4_prev = prev
    out = np.empty_like(phi)
    out[0] = nu**2 * np.exp(2j * p) * f1 + hop_p * f2 + hop_p * f3_next - mu**2 * f4
    out[1] = hop_p * f1_prev + nu**2 * f2_prev - mu**2 * f3 + hop_m * f4_prev
    out[2] = hop_p * f1 - mu**2 * f2 + nu**2 * f3_next + hop_m * f4
    out[3] = -(mu**2) * f1 + hop_m * f2 + hop_m * f3_next + nu**2 * np.exp(-2j * p) * f4
    return out


def w2_fixed_p(state: FixedPState, params: WalkParams, edge_tol: float = 0.0) -> FixedPState:
    """Free step W2(p) on the P-layout (ring, or open window with support guard)."""
    if not state.periodic:
        _check_support(state.amp, edge_tol)
    return replace(state, amp=_recurrence_rhs(state.amp, state.p, params, state.periodic))


def u2_step(state: FixedPState, chi: float, params: WalkParams, edge_tol: float = 0.0) -> FixedPState:
    """U2(chi, p) = W2(p) V(chi): interaction first, then the free step."""
    return w2_fixed_p(interaction_fixed_p(state, chi), params, edge_tol=edge_tol)


def u2_unguarded(state: FixedPState, chi: float, params: WalkParams) -> np.ndarray:
    """U2 applied with zero fill outside an open window; only interior sites are exact."""
    phi = interaction_fixed_p(state, chi).amp
    return _recurrence_rhs(phi, state.p, params, state.periodic)


def plane_wave_fixed_p(p, k, s, r, params: WalkParams, Z: int, periodic: bool = True) -> FixedPState:
    """P-subspace plane wave w_k^{sr}(z) built from v_k^{sr}."""
    v = two_eigenvector(p, k, s, r, params).vec
    z = np.arange(-Z, Z + 1)
    odd = np.exp(-1j * (2 * z + 1) * k)
    even = np.exp(-2j * z * k)
    amp = np.array([v[0] * odd, v[1] * even, v[2] * even, v[3] * odd])
    return FixedPState(p=p, amp=amp, periodic=periodic)


# --------------------------------------------------------------------------
# (x1, x2) grid and the (y, w) centre-of-mass lattice


@dataclass
class GridState:
    """Amplitudes ``amp[a1, a2, x1, x2]`` on an L x L lattice (index 0 = spin up)."""

    amp: np.ndarray

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=complex)
        if self.amp.shape[:2] != (2, 2) or self.amp.ndim != 4 or self.amp.shape[2] != self.amp.shape[3]:
            raise ValueError("amp must have shape (2, 2, L, L)")

    @property
    def L(self) -> int:
        return self.amp.shape[2]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def exchanged(self) -> "GridState":
        return GridState(self.amp.transpose(1, 0, 3, 2).copy())

    def antisymmetry_error(self) -> float:
        return float(np.abs(self.amp + self.amp.transpose(1, 0, 3, 2)).max())


def antisymmetrize(state: GridState, normalize: bool = False) -> GridState:
    """Project onto the Fermionic sector, optionally renormalizing."""
    amp = 0.5 * (state.amp - state.amp.transpose(1, 0, 3, 2))
    n = np.linalg.norm(amp)
    if n < 1e-14 * max(1.0, np.linalg.norm(state.amp)):
        raise ValueError("antisymmetric part vanishes; input was exchange-symmetric")
    if normalize:
        amp = amp / n
    return GridState(amp)


def apply_u2_centre_of_mass(psi: np.ndarray, chi: float, params: WalkParams) -> np.ndarray:
    """U2 = W2 V2 on a periodic (y, w) lattice, ``psi`` of shape (4, Ny, Nw).

    Particle 1 hops as T_y T_w, particle 2 as T_y^dagger T_w.
    """
    phi = np.array(psi, dtype=complex, copy=True)
    phi[1:3, 0, :] *= np.exp(1j * chi)
    out = np.zeros_like(phi)
    for n1, a1 in _A.items():
        for n2, a2 in _A.items():
            c = np.kron(a1(params), a2(params))
            if not c.any():
                continue
            shifted = np.roll(phi, (n1 - n2, n1 + n2), axis=(1, 2))
            out += np.tensordot(c, shifted, axes=(1, 0))
    return out


def projector_C(psi: np.ndarray) -> np.ndarray:
    """Keep the physical points y = w (mod 2) of a (4, Ny, Nw) array."""
    ny, nw = psi.shape[1:]
    if ny % 2 or nw % 2:
        raise ValueError("lattice sizes must be even")
    mask = (np.add.outer(np.arange(ny), np.arange(nw)) % 2) == 0
    return np.where(mask, psi, 0)


def grid_to_centre_of_mass(state: GridState, ny: int, nw: int) -> np.ndarray:
    """Embed an (x1, x2) grid state into a (y, w) lattice (no wrap-around check)."""
    L = state.L
    x1, x2 = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    out = np.zeros((4, ny, nw), dtype=complex)
    yi = (x1 - x2) % ny
    wi = (x1 + x2) % nw
    flat = state.amp.reshape(4, L, L)
    out[:, yi, wi] = flat
    return out


# --------------------------------------------------------------------------
# symmetries


def symmetry_checks(p: float, params: WalkParams, n_k: int = 64, ny: int = 16) -> dict[str, float]:
    """Max deviation of the parity and p + pi conjugation identities.

    Checked both on ``W(p)``/``W2(p, k)`` over a k grid and on the y-lattice
    operator W2(p) as a dense matrix on a ring of ``ny`` sites.
    """
    sx2 = np.kron(SIGMA_X, SIGMA_X)
    sz2 = np.kron(SIGMA_Z, SIGMA_Z)
    parity_conj = sx2 @ EXCHANGE
    report = {
        "single_parity": float(
            np.abs(walk_matrix(p, params) - SIGMA_X @ walk_matrix(-p, params) @ SIGMA_X).max()
        )
    }
    dev_par = dev_pi = 0.0
    for k in np.linspace(-np.pi, np.pi, n_k, endpoint=False):
        lhs = w2_momentum(-p, k, params)
        rhs = parity_conj @ w2_momentum(p, k, params) @ parity_conj.conj().T
        dev_par = max(dev_par, np.abs(lhs - rhs).max())
        lhs = w2_momentum(p + np.pi, k, params)
        rhs = sz2 @ w2_momentum(p, k, params) @ sz2
        dev_pi = max(dev_pi, np.abs(lhs - rhs).max())

    def dense(pp):
        eye = np.eye(4 * ny, dtype=complex)
        cols = [apply_w2_y(e.reshape(4, ny), pp, params).ravel() for e in eye]
        return np.array(cols).T

    m_p, m_mp, m_ppi = dense(p), dense(-p), dense(p + np.pi)
    big_par = np.kron(parity_conj, np.eye(ny))
    big_sz = np.kron(sz2, np.eye(ny))
    dev_par = max(dev_par, np.abs(m_mp - big_par @ m_p @ big_par.conj().T).max())
    dev_pi = max(dev_pi, np.abs(m_ppi - big_sz @ m_p @ big_sz).max())
    report["two_particle_parity"] = float(dev_par)
    report["two_particle_p_plus_pi"] = float(dev_pi)
    return report
