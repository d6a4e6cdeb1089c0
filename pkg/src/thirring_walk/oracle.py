"""Brute-force checks: dense U2(chi, p) on a periodic y-ring.

The free part is assembled from the 4x4 momentum blocks ``W2(p, k_j)`` on the
grid ``k_j = 2 pi j / N`` by an inverse Fourier transform, so it shares no code
with the position-space stencils it is used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WalkParams, reduce_to_zone, unitarity_error
from .solutions import EigenSolution, continuous_bands
from .two_particle import EXCHANGE, FixedPState, apply_u2_y, u2_unguarded, w2_momentum

MAX_DENSE_N = 512


@dataclass
class DenseWalkMatrix:
    """U2(chi, p) on a y-ring of N sites; basis index ``4 * y + c``."""

    p: float
    chi: float
    params: WalkParams
    N: int
    matrix: np.ndarray

    def unitarity_error(self) -> float:
        return unitarity_error(self.matrix)

    def index(self, y, comp) -> np.ndarray:
        return 4 * (np.asarray(y) % self.N) + np.asarray(comp)

    def vector(self, psi_y: np.ndarray) -> np.ndarray:
        """Flatten a (4, N) ring array into the basis order."""
        return np.asarray(psi_y, dtype=complex).T.reshape(-1)

    def ring(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec).reshape(self.N, 4).T

    def p_basis(self) -> np.ndarray:
        """Indices of the P-subspace: components 0, 3 on odd y and 1, 2 on even y."""
        y = np.arange(self.N)
        odd = y % 2 == 1
        idx = [self.index(y[odd], 0), self.index(y[~odd], 1), self.index(y[~odd], 2), self.index(y[odd], 3)]
        return np.sort(np.concatenate(idx))

    def exchange_matrix(self) -> np.ndarray:
        """X: (X psi)(y) = E psi(-y)."""
        n = 4 * self.N
        x = np.zeros((n, n), dtype=complex)
        for y in range(self.N):
            x[4 * y : 4 * y + 4, 4 * ((-y) % self.N) : 4 * ((-y) % self.N) + 4] = EXCHANGE
        return x

    def antisymmetric_basis(self, within_p: bool = True) -> np.ndarray:
        """Orthonormal columns spanning the Fermionic sector (optionally inside P)."""
        n = 4 * self.N
        proj = 0.5 * (np.eye(n) - self.exchange_matrix())
        if within_p:
            keep = np.zeros(n, dtype=bool)
            keep[self.p_basis()] = True
            proj = proj[:, keep]
        u, s, _ = np.linalg.svd(proj, full_matrices=False)
        return u[:, s > 0.5]

    def restricted(self, within_p: bool = True) -> np.ndarray:
        q = self.antisymmetric_basis(within_p)
        return q.conj().T @ self.matrix @ q


def free_dense(p, params: WalkParams, N: int) -> np.ndarray:
    n = 4 * N
    ks = 2 * np.pi * np.arange(N) / N
    blocks = np.array([w2_momentum(p, k, params) for k in ks])
    y = np.arange(N)
    # M[y, y'] = (1/N) sum_j exp(-i k_j (y - y')) W2(p, k_j)
    phase = np.exp(-1j * np.multiply.outer(np.subtract.outer(y, y), ks)) / N
    m = np.einsum("abj,jcd->acbd", phase, blocks)
    return m.reshape(n, n)


def build_dense(p, chi, params: WalkParams, N: int) -> DenseWalkMatrix:
    if N < 16:
        raise ValueError("N must be at least 16")
    if N % 2:
        raise ValueError("N must be even")
    if N > MAX_DENSE_N:
        raise ValueError(f"N={N} exceeds the dense budget {MAX_DENSE_N}")
    m = free_dense(p, params, N)
    v = np.ones(4 * N, dtype=complex)
    v[[1, 2]] = np.exp(1j * chi)
    m = m * v[None, :]
    return DenseWalkMatrix(p=float(p), chi=float(chi), params=params, N=N, matrix=m)


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_residual: float

    @property
    def omegas(self) -> np.ndarray:
        """Quasi-energies with eigenvalue exp(-i omega), omega in (-pi, pi]."""
        return reduce_to_zone(-np.angle(self.eigenvalues))


def full_spectrum(mat: DenseWalkMatrix | np.ndarray, sector: str = "full") -> Spectrum:
    """Eigen-decomposition of the whole matrix or of a restricted sector.

    ``sector``: ``full``, ``antisymmetric`` (Fermionic) or ``antisymmetric_p``
    (Fermionic inside the P-subspace).  Eigenvectors are returned in the
    full basis.
    """
    if isinstance(mat, DenseWalkMatrix):
        if sector == "full":
            q = None
            m = mat.matrix
        elif sector in ("antisymmetric", "antisymmetric_p"):
            q = mat.antisymmetric_basis(within_p=sector == "antisymmetric_p")
            m = q.conj().T @ mat.matrix @ q
        else:
            raise ValueError(f"unknown sector {sector!r}")
    else:
        q, m = None, np.asarray(mat)
    vals, vecs = np.linalg.eig(m)
    res = np.linalg.norm(m @ vecs - vecs * vals[None, :], axis=0).max()
    if q is not None:
        vecs = q @ vecs
    return Spectrum(eigenvalues=vals, eigenvectors=vecs, max_residual=float(res))


def gap_eigenvalues(spec: Spectrum, p, params: WalkParams, margin: float = 1e-3) -> np.ndarray:
    """Indices of eigenvalues lying inside a band gap by at least ``margin``."""
    bands = continuous_bands(p, params)
    a = np.abs(spec.omegas)
    inside = (a > bands["odd_edge"] + margin) & (a < bands["pair_edge"] - margin)
    return np.nonzero(inside)[0]


def embed_on_ring(state: FixedPState, N: int) -> np.ndarray:
    """Place an open-window P-layout state on a y-ring of N sites.

    Sites outside ``-N/2 < y <= N/2`` are dropped, so only decaying states are
    represented faithfully.
    """
    ys, psi = state.to_y()
    keep = (ys > -N // 2) & (ys <= N // 2)
    out = np.zeros((4, N), dtype=complex)
    out[:, ys[keep] % N] = psi[:, keep]
    return out


def residual(solution: EigenSolution, mat: DenseWalkMatrix | None = None, chi: float | None = None) -> float:
    """Max |U2 psi - lambda psi| over components and sites.

    Without ``mat`` the recurrence is applied directly: on an open window the
    two edge sites, where the zero fill is not exact, are skipped.  Stationary
    solutions are checked on their y-ring at coupling ``chi``.
    """
    lam = solution.eigenvalue
    if solution.kind == "stationary":
        if chi is None:
            raise ValueError("stationary solutions need an explicit chi")
        psi = solution.y_state
        return float(np.abs(apply_u2_y(psi, solution.p, chi, solution.params) - lam * psi).max())
    state = solution.state
    if mat is not None:
        psi = mat.vector(embed_on_ring(state, mat.N))
        return float(np.abs(mat.matrix @ psi - lam * psi).max())
    if chi is None:
        chi = solution.chi
    out = u2_unguarded(state, chi, solution.params)
    diff = out - lam * state.amp
    if not state.periodic:
        diff = diff[:, 1:-1]
    return float(np.abs(diff).max())
