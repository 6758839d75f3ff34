"""Qubit-array boundary between two agents.

Two finite systems A and B exchange classical bits through an ancillary array
of N non-interacting qubits.  The interaction is specified by per-qubit
weights, an inverse-efficiency factor per agent and a shared environment
temperature; its eigenvalues over +/-1 bit patterns are the energies moved
per cycle.  A cycle has four phases: B prepares the qubits, A measures them,
A prepares, B measures.  Because the qubits never interact, the joint screen
state is always the product of N single-qubit Bloch vectors.

Units: k_B = 1, energies in units of k_B*T, lengths in Planck lengths and
times in Planck times for the optional voxel geometry.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL

LN2 = math.log(2.0)

AGENTS = ("A", "B")

#: Convenience unit axes.
Z_PLUS = np.array([0.0, 0.0, 1.0])


class InteractionError(ValueError):
    """Invalid interaction specification."""


class GhpViolationError(RuntimeError):
    """A screen was asked to carry more bits than its area admits."""

    def __init__(self, n: int, capacity: float):
        self.n = n
        self.capacity = capacity
        self.deficit = n - capacity
        super().__init__(
            f"{n} qubits exceed the areal capacity {capacity:g} (deficit {self.deficit:g})"
        )


def _per_agent(value, n: int, kind: str) -> dict:
    """Normalize alpha/beta input: a bare value applies to both agents."""
    if isinstance(value, dict):
        missing = [k for k in AGENTS if k not in value]
        if missing:
            raise InteractionError(f"{kind} missing agents {missing}")
        return {k: value[k] for k in AGENTS}
    return {k: value for k in AGENTS}


@dataclass(frozen=True)
class InteractionSpec:
    """Decomposition of the boundary interaction over N qubits.

    alpha[k] are the per-qubit weights of agent k (nonnegative, sum to 1),
    beta[k] >= ln 2 is the agent's inverse thermodynamic efficiency, and
    temperature is the shared environment temperature.
    """

    n: int
    alpha: dict
    beta: dict
    temperature: float

    def __post_init__(self):
        if self.n < 1:
            raise InteractionError(f"need at least one qubit, got n={self.n}")
        if self.temperature <= 0:
            raise InteractionError(f"temperature must be positive, got {self.temperature}")
        alpha = {}
        for k in AGENTS:
            w = np.asarray(self.alpha[k], dtype=float).reshape(-1)
            if w.size != self.n:
                raise InteractionError(
                    f"alpha[{k}] has {w.size} entries, expected {self.n}"
                )
            if np.any(w < 0.0) or np.any(w > 1.0):
                raise InteractionError(f"alpha[{k}] entries must lie in [0, 1]")
            total = float(w.sum())
            if abs(total - 1.0) > TOL.weight_sum:
                raise InteractionError(
                    f"alpha[{k}] sums to {total!r}, must be 1 within {TOL.weight_sum:g}"
                )
            alpha[k] = w
        object.__setattr__(self, "alpha", alpha)
        beta = {}
        for k in AGENTS:
            b = float(self.beta[k])
            if b < LN2 - 1e-15:
                raise InteractionError(f"beta[{k}] = {b!r} is below ln 2")
            beta[k] = b
        object.__setattr__(self, "beta", beta)


def build_interaction(n: int, alpha, beta, temperature: float) -> InteractionSpec:
    """Validate and build an interaction spec.

    ``alpha`` may be one weight list (shared by both agents) or a dict keyed
    by agent; likewise ``beta`` may be one float or a dict.
    """
    return InteractionSpec(
        n=n,
        alpha=_per_agent(alpha, n, "alpha"),
        beta=_per_agent(beta, n, "beta"),
        temperature=float(temperature),
    )


def eigenvalue(spec: InteractionSpec, k: str, bits) -> float:
    """Interaction eigenvalue beta_k * T * sum_i alpha_i * bits_i for agent k.

    ``bits`` is a length-N sequence over {-1, +1}.  At most 2**N distinct
    values exist; all +1 gives beta_k*T because the weights sum to one.
    """
    if k not in AGENTS:
        raise ValueError(f"unknown agent {k!r}")
    b = np.asarray(bits, dtype=float).reshape(-1)
    if b.size != spec.n:
        raise InteractionError(f"got {b.size} bits, expected {spec.n}")
    if not np.all(np.abs(b) == 1.0):
        raise InteractionError("bits must be -1 or +1")
    return float(spec.beta[k] * spec.temperature * np.dot(spec.alpha[k], b))


@dataclass(frozen=True)
class BasisChoice:
    """One agent's local z axis per qubit, as unit 3-vectors (N x 3)."""

    axes: np.ndarray
    label: str = "z"

    def __post_init__(self):
        ax = np.asarray(self.axes, dtype=float)
        if ax.ndim != 2 or ax.shape[1] != 3:
            raise ValueError(f"axes must be (N, 3), got {ax.shape}")
        norms = np.linalg.norm(ax, axis=1)
        if np.any(np.abs(norms - 1.0) > TOL.axis_norm):
            raise ValueError("every measurement axis must have unit norm")
        ax.setflags(write=False)
        object.__setattr__(self, "axes", ax)

    @property
    def n(self) -> int:
        return self.axes.shape[0]


def aligned_basis(n: int, label: str = "z") -> BasisChoice:
    return BasisChoice(np.tile(Z_PLUS, (n, 1)), label=label)


def tilted_basis(n: int, angle_rad: float, label: str | None = None) -> BasisChoice:
    """All axes tilted from +z by the same angle, in the x-z plane."""
    axis = np.array([math.sin(angle_rad), 0.0, math.cos(angle_rad)])
    return BasisChoice(np.tile(axis, (n, 1)), label=label or f"tilt({angle_rad:g})")


class ScreenState:
    """Mutable state of the qubit array.

    Qubits are Bloch unit vectors; because preparation and measurement act on
    one qubit at a time, the product structure over qubits is exact by
    construction and is preserved by any sequence of cycles.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("a screen needs at least one qubit")
        self.n = n
        self.qubits = np.tile(Z_PLUS, (n, 1))
        self.last_writer = ["none"] * n

    def prepare(self, actor: str, basis: BasisChoice, bits: np.ndarray):
        self.qubits = bits[:, None] * basis.axes
        self.last_writer = [actor] * self.n

    def measure(self, basis: BasisChoice, rng: np.random.Generator) -> np.ndarray:
        """Measure every qubit along the agent's axes (probability
        (1 + q.a)/2 for +1) and collapse each qubit onto +/- its axis."""
        dots = np.einsum("ij,ij->i", self.qubits, basis.axes)
        p_plus = 0.5 * (1.0 + dots)
        draws = rng.random(self.n)
        bits = np.where(draws < p_plus, 1.0, -1.0)
        self.qubits = bits[:, None] * basis.axes
        return bits


def measurement_statistics(
    prep_axis, meas_axis, shots: int, seed: int
) -> float:
    """Empirical +1 frequency for one qubit prepared along ``prep_axis`` (bit +1)
    and measured along ``meas_axis``, over ``shots`` seeded trials."""
    q = np.asarray(prep_axis, dtype=float)
    a = np.asarray(meas_axis, dtype=float)
    p_plus = 0.5 * (1.0 + float(np.dot(q, a)))
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.random(shots)
    return float(np.count_nonzero(draws < p_plus)) / shots


PHASES = ("B-prepare", "A-measure", "A-prepare", "B-measure")


@dataclass(frozen=True)
class PhaseRecord:
    phase: str
    actor: str
    kind: str               # "prepare" or "measure"
    bits: tuple             # +/-1 per qubit
    axes: np.ndarray        # the acting agent's axes at this phase
    eigenvalue: float       # interaction eigenvalue encoded by these bits
    contributions: tuple    # per-qubit weighted terms beta*T*alpha_i*bit_i


@dataclass(frozen=True)
class CycleRecord:
    """Full record of one four-phase exchange cycle."""

    n: int
    seed: int
    phases: tuple

    @property
    def bits_b_to_a(self) -> int:
        return self.n  # A registers one bit per qubit in its measure phase

    @property
    def bits_a_to_b(self) -> int:
        return self.n

    @property
    def signed_bit_ledger(self) -> int:
        """Net classical information across the boundary over the cycle."""
        return self.bits_b_to_a - self.bits_a_to_b

    def measured_bits(self, agent: str) -> tuple:
        phase = {"A": "A-measure", "B": "B-measure"}[agent]
        return next(p.bits for p in self.phases if p.phase == phase)

    def prepared_bits(self, agent: str) -> tuple:
        phase = {"A": "A-prepare", "B": "B-prepare"}[agent]
        return next(p.bits for p in self.phases if p.phase == phase)

    def events(self):
        """Flat per-qubit event dicts, one per (phase, qubit)."""
        for p in self.phases:
            for i in range(self.n):
                yield {
                    "phase": p.phase,
                    "actor": p.actor,
                    "qubit": i,
                    "axis": [float(x) for x in p.axes[i]],
                    "outcome": int(p.bits[i]),
                    "eigenvalue_contribution": p.contributions[i],
                    "seed": self.seed,
                }

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "seed": self.seed,
            "bits_b_to_a": self.bits_b_to_a,
            "bits_a_to_b": self.bits_a_to_b,
            "events": list(self.events()),
        }
        return json.dumps(payload, sort_keys=True)


def _to_pm_one(bits, n: int) -> np.ndarray:
    b = np.asarray(bits, dtype=float).reshape(-1)
    if b.size != n:
        raise InteractionError(f"got {b.size} bits, expected {n}")
    if not np.all(np.abs(b) == 1.0):
        raise InteractionError("bits must be -1 or +1")
    return b


def exchange_cycle(
    screen: ScreenState,
    spec: InteractionSpec,
    basis_a: BasisChoice,
    basis_b: BasisChoice,
    rng_seed: int,
    bits_b=None,
    bits_a=None,
) -> CycleRecord:
    """Run one four-phase exchange cycle and return its record.

    ``bits_b`` fixes what B writes in phase one (seeded random otherwise).
    ``bits_a`` fixes what A writes in phase three; by default A echoes the
    bits it just measured.  Outcomes are drawn from a counter-based generator
    keyed on ``rng_seed``, so records are reproducible bit for bit.
    """
    if screen.n != spec.n or basis_a.n != spec.n or basis_b.n != spec.n:
        raise InteractionError("screen, spec and bases must share one qubit count")
    rng = np.random.Generator(np.random.Philox(rng_seed))

    if bits_b is None:
        prep_b = np.where(rng.random(spec.n) < 0.5, 1.0, -1.0)
    else:
        prep_b = _to_pm_one(bits_b, spec.n)
    screen.prepare("B", basis_b, prep_b)
    phases = [_phase("B-prepare", "B", "prepare", prep_b, basis_b, spec)]

    meas_a = screen.measure(basis_a, rng)
    phases.append(_phase("A-measure", "A", "measure", meas_a, basis_a, spec))

    prep_a = meas_a if bits_a is None else _to_pm_one(bits_a, spec.n)
    screen.prepare("A", basis_a, prep_a)
    phases.append(_phase("A-prepare", "A", "prepare", prep_a, basis_a, spec))

    meas_b = screen.measure(basis_b, rng)
    phases.append(_phase("B-measure", "B", "measure", meas_b, basis_b, spec))

    return CycleRecord(n=spec.n, seed=rng_seed, phases=tuple(phases))


def _phase(name, actor, kind, bits, basis, spec) -> PhaseRecord:
    terms = spec.beta[actor] * spec.temperature * spec.alpha[actor] * bits
    return PhaseRecord(
        phase=name,
        actor=actor,
        kind=kind,
        bits=tuple(int(b) for b in bits),
        axes=basis.axes,
        eigenvalue=float(terms.sum()),
        contributions=tuple(float(t) for t in terms),
    )


@dataclass(frozen=True)
class VoxelGeometry:
    """Optional embedding of the screen's qubits into spacetime voxels.

    dx and dt are the voxel half-width and duration in Planck units and may
    not drop below 1.  The area defaults to n * (2*dx)**2 (one voxel face per
    qubit) but can be pinned independently of any screen.  The geometry never
    feeds back into the exchange dynamics; it only supports the bound check.
    """

    dx: float = 1.0
    dt: float = 1.0
    area: float = 4.0

    def __post_init__(self):
        if self.dx < 1.0 or self.dt < 1.0:
            raise ValueError("dx and dt must be at least 1 Planck unit")
        if self.area <= 0:
            raise ValueError("area must be positive")

    @classmethod
    def for_screen(cls, n: int, dx: float = 1.0, dt: float = 1.0) -> "VoxelGeometry":
        return cls(dx=dx, dt=dt, area=n * (2.0 * dx) ** 2)


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    capacity: float   # area / 4, the maximum admissible bit count
    deficit: float    # n - capacity when violated, else 0


def check_ghp_bound(spec: InteractionSpec, geom: VoxelGeometry) -> BoundCheck:
    """Check n <= area/4 (one bit per four Planck areas)."""
    capacity = geom.area / 4.0
    ok = spec.n <= capacity
    return BoundCheck(ok=ok, capacity=capacity, deficit=0.0 if ok else spec.n - capacity)


def require_ghp(spec: InteractionSpec, geom: VoxelGeometry):
    """Raise :class:`GhpViolationError` if the screen exceeds its areal capacity."""
    result = check_ghp_bound(spec, geom)
    if not result.ok:
        raise GhpViolationError(spec.n, result.capacity)
    return result


def tick_period(temperature: float) -> float:
    """Minimal time to write one bit, h/(ln 2 * k_B * T) with h = k_B = 1."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return 1.0 / (LN2 * temperature)
