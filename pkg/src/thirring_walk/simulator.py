"""Time evolution of two Fermions on an (x1, x2) lattice.

Each step applies the on-site interaction and then the Dirac walk to both
particles.  Positions are array indices 0..L-1 with the origin at L/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import WalkParams
from .single_particle import SupportError
from .solutions import bound_state
from .two_particle import FixedPState, GridState, antisymmetrize, u2_step

DEFAULT_WIDTH = 12.0

BOUNDARIES = ("periodic", "guarded-open")
INITIAL_KINDS = ("singlet", "packet", "custom")


@dataclass(frozen=True)
class InitialState:
    """``singlet``: (ud - du)/sqrt2 at the origin; ``packet``: bound state around
    total momentum 2 p0 with a Gaussian envelope of std ``width`` in w;
    ``custom``: amplitudes loaded from a ``.npy`` file of shape (2, 2, L, L)."""

    kind: str = "singlet"
    p0: float = 0.0
    width: float = DEFAULT_WIDTH
    path: str | None = None

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ValueError(f"unknown initial state {self.kind!r}")
        if self.kind == "packet" and not self.width > 0:
            raise ValueError("packet width must be positive")
        if self.kind == "custom" and not self.path:
            raise ValueError("custom initial state needs a path")

    def support(self) -> int:
        """Rough linear extent (sites) of the initial state along each axis."""
        if self.kind == "packet":
            return int(np.ceil(8 * self.width)) + 2
        return 1


@dataclass(frozen=True)
class SimulationConfig:
    params: WalkParams
    L: int = 256
    steps: int = 32
    initial: InitialState = field(default_factory=InitialState)
    boundary: str = "guarded-open"

    def __post_init__(self):
        if self.L <= 0 or self.L % 2:
            raise ValueError("L must be a positive even integer")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.boundary == "guarded-open" and self.initial.support() + 2 * self.steps >= self.L:
            raise ValueError(
                f"L={self.L} too small: support {self.initial.support()} + 2*steps {2 * self.steps} must be < L"
            )


@dataclass(frozen=True)
class ProbabilityField:
    """Spin-summed |psi(x1, x2)|^2 with diagonal mass and coordinate marginals.

    ``marginal_y[i]`` belongs to y = x1 - x2 = ``y[i]`` and ``marginal_w[i]`` to
    w - L = x1 + x2 - L = ``w[i]`` (zero at the origin).
    """

    prob: np.ndarray
    t: int = 0

    @property
    def L(self) -> int:
        return self.prob.shape[0]

    @property
    def total(self) -> float:
        return float(self.prob.sum())

    @property
    def diagonal_mass(self) -> float:
        return float(np.trace(self.prob))

    @property
    def y(self) -> np.ndarray:
        return np.arange(-(self.L - 1), self.L)

    @property
    def w(self) -> np.ndarray:
        return np.arange(2 * self.L - 1) - self.L

    @property
    def marginal_y(self) -> np.ndarray:
        L = self.L
        return np.array([np.trace(self.prob, offset=-d) for d in self.y]) if L else np.zeros(0)

    @property
    def marginal_w(self) -> np.ndarray:
        flipped = self.prob[:, ::-1]
        L = self.L
        # anti-diagonal offset o collects x1 + x2 = L - 1 - o
        sums = np.array([np.trace(flipped, offset=o) for o in range(L - 1, -L, -1)])
        return sums

    def std_y(self) -> float:
        return _std(self.y, self.marginal_y)

    def std_w(self) -> float:
        return _std(self.w, self.marginal_w)


def _std(x, weights) -> float:
    weights = weights / weights.sum()
    mean = np.sum(x * weights)
    return float(np.sqrt(np.sum((x - mean) ** 2 * weights)))


def probability(state: GridState, t: int = 0) -> ProbabilityField:
    prob = np.sum(np.abs(state.amp) ** 2, axis=(0, 1))
    return ProbabilityField(prob=prob, t=t)


def momentum_distribution(state: GridState) -> np.ndarray:
    """Distribution of total lattice momentum index (j1 + j2) mod L."""
    L = state.L
    spec = np.sum(np.abs(np.fft.fft2(state.amp, axes=(2, 3))) ** 2, axis=(0, 1))
    j = np.add.outer(np.arange(L), np.arange(L)) % L
    return np.bincount(j.ravel(), weights=spec.ravel(), minlength=L) / L**2


# --------------------------------------------------------------------------
# initial states


def singlet_at_origin(L: int) -> GridState:
    amp = np.zeros((2, 2, L, L), dtype=complex)
    c = L // 2
    amp[0, 1, c, c] = 1 / np.sqrt(2)
    amp[1, 0, c, c] = -1 / np.sqrt(2)
    return GridState(amp)


def bound_packet(params: WalkParams, L: int, p0: float, width: float = DEFAULT_WIDTH) -> GridState:
    """Wave packet of bound states around total momentum 2 p0.

    Superposes the exact bound states psi_p(y) exp(-i p w) with Gaussian weights
    in p of std 1/(2 width), so that the envelope in w has std ``width``.  Each
    psi_p is phase-aligned with psi_{p0}.  Because every component is an
    eigenvector, the y-marginal is conserved by the evolution.
    """
    if 8 * width + 2 >= L:
        raise ValueError(f"packet width {width} does not fit in L={L}")
    sigma_p = 1.0 / (2 * width)
    # alias period 3L exceeds the w range 2L; the 8-sigma cut leaves tails ~ e^-32
    dp = 2 * np.pi / (3 * L)
    n_half = int(np.ceil(8 * sigma_p / dp))
    ps = p0 + dp * np.arange(-n_half, n_half + 1)
    # nudge nodes off p = 0 mod pi/2 where the bound-state lines meet a cut
    special = np.abs(np.remainder(ps + np.pi / 4, np.pi / 2) - np.pi / 4) < 1e-9
    ps = np.where(special, ps + 1e-7, ps)
    Z = L // 2
    ref = bound_state(p0, params.chi, params, Z=Z).state.amp
    profiles = []
    for p in ps:
        amp = bound_state(p, params.chi, params, Z=Z).state.amp
        overlap = np.vdot(ref, amp)
        profiles.append(amp * np.conj(overlap) / abs(overlap))
    weights = np.exp(-((ps - p0) ** 2) / (4 * sigma_p**2))
    ys, _ = FixedPState(p=p0, amp=ref, periodic=False).to_y()
    psi_py = np.array([FixedPState(p=p, amp=a, periodic=False).to_y()[1] for p, a in zip(ps, profiles)])

    x = np.arange(L)
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    w_vals = np.arange(-L, L - 1)
    phases = weights[:, None] * np.exp(-1j * np.outer(ps, w_vals))
    # field[c, y, w] over the y window of the profiles
    field = np.einsum("pcy,pw->cyw", psi_py, phases)
    yi = x1 - x2 - ys[0]
    wi = x1 + x2 - L - w_vals[0]
    comp = field[:, yi, wi]
    return antisymmetrize(GridState(comp.reshape(2, 2, L, L)), normalize=True)


def build_initial(initial: InitialState, config: SimulationConfig) -> GridState:
    L = config.L
    if initial.kind == "singlet":
        return singlet_at_origin(L)
    if initial.kind == "packet":
        return bound_packet(config.params, L, initial.p0, initial.width)
    amp = np.load(initial.path)
    state = GridState(amp)
    if state.L != L:
        raise ValueError(f"amplitude file has L={state.L}, config has L={L}")
    return antisymmetrize(state, normalize=True)


# --------------------------------------------------------------------------
# evolution


def _walk_axis(amp: np.ndarray, spin_axis: int, pos_axis: int, params: WalkParams) -> np.ndarray:
    up = np.take(amp, 0, axis=spin_axis)
    dn = np.take(amp, 1, axis=spin_axis)
    ax = pos_axis - 1
    new_up = params.nu * np.roll(up, 1, axis=ax) - 1j * params.mu * dn
    new_dn = -1j * params.mu * up + params.nu * np.roll(dn, -1, axis=ax)
    return np.stack((new_up, new_dn), axis=spin_axis)


# probability allowed on the boundary rows before a guarded-open run stops;
# far below the per-step norm budget
EDGE_MASS_TOL = 1e-16


def edge_mass(amp: np.ndarray) -> float:
    prob = np.sum(np.abs(amp) ** 2, axis=(0, 1))
    return float(prob[0].sum() + prob[-1].sum() + prob[1:-1, 0].sum() + prob[1:-1, -1].sum())


def step(state: GridState, params: WalkParams, periodic: bool = True, edge_tol: float = EDGE_MASS_TOL) -> GridState:
    """One step of U2 = (W (x) W) V_int.

    Guarded-open runs refuse to step once the probability on the boundary rows
    exceeds ``edge_tol`` (packet tails are never exactly zero).
    """
    amp = state.amp.copy()
    if not periodic:
        mass = edge_mass(amp)
        if mass > edge_tol:
            raise SupportError(f"probability {mass:.3g} at the lattice edge of a guarded-open run")
    diag = np.arange(state.L)
    phase = np.exp(1j * params.chi)
    amp[0, 1, diag, diag] *= phase
    amp[1, 0, diag, diag] *= phase
    amp = _walk_axis(amp, 0, 2, params)
    amp = _walk_axis(amp, 1, 3, params)
    return GridState(amp)


def evolve(state: GridState, steps: int, config: SimulationConfig, snapshot_every: int = 0):
    """Evolve ``steps`` times; returns (final state, list of ProbabilityField snapshots).

    Snapshots are taken at t = 0, every ``snapshot_every`` steps and at the end
    (none if ``snapshot_every`` is 0).
    """
    periodic = config.boundary == "periodic"
    snaps = []
    if snapshot_every:
        snaps.append(probability(state, 0))
    for t in range(1, steps + 1):
        state = step(state, config.params, periodic=periodic)
        if snapshot_every and (t % snapshot_every == 0 or t == steps):
            snaps.append(probability(state, t))
    return state, snaps


def fixed_p_evolve(state: FixedPState, steps: int, chi: float, params: WalkParams, p: float | None = None) -> FixedPState:
    """Repeated U2(chi, p) on a P-layout state."""
    if p is not None and not np.isclose(p, state.p):
        raise ValueError(f"state lives at p={state.p}, not {p}")
    for _ in range(steps):
        state = u2_step(state, chi, params)
    return state
