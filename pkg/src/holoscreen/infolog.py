"""Probabilistic token/type classifiers, infomorphisms and Markov blankets.

A classifier relates n tokens to m types through a matrix of membership
probabilities; when every entry is 0 or 1 it degenerates to the familiar
binary satisfaction relation.  An infomorphism between two classifiers is a
forward map on types paired with a backward map on tokens whose square
commutes: target(token, fwd(type)) must equal source(bwd(token), type).

The module also carries exact conditional-independence checks on small
binary causal networks, used to test that a node's Markov blanket really
shields it from the rest of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .config import MAX_GROUND_VARS, TOL


class ClassifierError(ValueError):
    pass


class MapError(ValueError):
    """An infomorphism map is not total or points outside its codomain."""


@dataclass(frozen=True)
class Classifier:
    """Finite token/type satisfaction structure with entries in [0, 1]."""

    tokens: tuple
    types: tuple
    p: np.ndarray  # shape (len(tokens), len(types))

    def __post_init__(self):
        tokens = tuple(self.tokens)
        types = tuple(self.types)
        if len(set(tokens)) != len(tokens):
            raise ClassifierError("duplicate tokens")
        if len(set(types)) != len(types):
            raise ClassifierError("duplicate types")
        if not tokens or not types:
            raise ClassifierError("tokens and types must be nonempty")
        m = np.asarray(self.p, dtype=float)
        if m.shape != (len(tokens), len(types)):
            raise ClassifierError(
                f"matrix shape {m.shape} does not match {len(tokens)} tokens x {len(types)} types"
            )
        if np.any(m < -1e-12) or np.any(m > 1.0 + 1e-12):
            raise ClassifierError("entries must lie in [0, 1]")
        m = np.clip(m, 0.0, 1.0)
        m.setflags(write=False)
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "p", m)
        object.__setattr__(self, "_tok_index", {t: i for i, t in enumerate(tokens)})
        object.__setattr__(self, "_typ_index", {t: j for j, t in enumerate(types)})

    def token_index(self, token) -> int:
        try:
            return self._tok_index[token]
        except KeyError:
            raise ClassifierError(f"unknown token {token!r}") from None

    def type_index(self, typ) -> int:
        try:
            return self._typ_index[typ]
        except KeyError:
            raise ClassifierError(f"unknown type {typ!r}") from None

    def value(self, token, typ) -> float:
        return float(self.p[self.token_index(token), self.type_index(typ)])

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.p == 0.0) | (self.p == 1.0)))

    def same_as(self, other: "Classifier") -> bool:
        return (
            self.tokens == other.tokens
            and self.types == other.types
            and np.array_equal(self.p, other.p)
        )


@dataclass(frozen=True)
class Infomorphism:
    """Contravariant map pair between classifiers: fwd on types, bwd on tokens."""

    source: Classifier
    target: Classifier
    fwd: dict  # source type -> target type
    bwd: dict  # target token -> source token

    def __post_init__(self):
        fwd = dict(self.fwd)
        bwd = dict(self.bwd)
        for typ in self.source.types:
            if typ not in fwd:
                raise MapError(f"fwd is missing source type {typ!r}")
            if fwd[typ] not in self.target._typ_index:
                raise MapError(f"fwd({typ!r}) = {fwd[typ]!r} is not a target type")
        for tok in self.target.tokens:
            if tok not in bwd:
                raise MapError(f"bwd is missing target token {tok!r}")
            if bwd[tok] not in self.source._tok_index:
                raise MapError(f"bwd({tok!r}) = {bwd[tok]!r} is not a source token")
        extra_f = set(fwd) - set(self.source.types)
        extra_b = set(bwd) - set(self.target.tokens)
        if extra_f or extra_b:
            raise MapError(f"dangling map entries: fwd {extra_f}, bwd {extra_b}")
        object.__setattr__(self, "fwd", fwd)
        object.__setattr__(self, "bwd", bwd)


@dataclass(frozen=True)
class InfomorphismReport:
    valid: bool
    max_gap: float
    violations: tuple  # (target token, source type, gap), worst first


def identity_infomorphism(c: Classifier) -> Infomorphism:
    return Infomorphism(c, c, {t: t for t in c.types}, {t: t for t in c.tokens})


def verify_infomorphism(f: Infomorphism, tol: float | None = None) -> InfomorphismReport:
    """Check the commuting condition over every (target token, source type) pair.

    Binary classifiers are compared exactly; probabilistic ones within tol.
    """
    if tol is None:
        tol = TOL.infomorphism
    if f.source.is_binary and f.target.is_binary:
        tol = 0.0
    rows = np.array([f.source.token_index(f.bwd[b]) for b in f.target.tokens])
    cols = np.array([f.target.type_index(f.fwd[a]) for a in f.source.types])
    lhs = f.target.p[:, cols]           # target(b, fwd(alpha))
    rhs = f.source.p[rows, :]           # source(bwd(b), alpha)
    gaps = np.abs(lhs - rhs)
    max_gap = float(gaps.max())
    if max_gap <= tol:
        return InfomorphismReport(True, max_gap, ())
    bad = np.argwhere(gaps > tol)
    violations = sorted(
        (
            (f.target.tokens[i], f.source.types[j], float(gaps[i, j]))
            for i, j in bad
        ),
        key=lambda v: -v[2],
    )
    return InfomorphismReport(False, max_gap, tuple(violations))


def compose(f: Infomorphism, g: Infomorphism) -> Infomorphism:
    """Diagrammatic composition: first f, then g (requires f.target = g.source)."""
    if f.target is not g.source and not f.target.same_as(g.source):
        raise MapError("cannot compose: f.target differs from g.source")
    fwd = {a: g.fwd[f.fwd[a]] for a in f.source.types}
    bwd = {c: f.bwd[g.bwd[c]] for c in g.target.tokens}
    return Infomorphism(f.source, g.target, fwd, bwd)


# --------------------------------------------------------------------------
# Causal DAGs over binary nodes, with exact joint enumeration.


class DagError(ValueError):
    pass


@dataclass(frozen=True)
class CausalDag:
    """Acyclic digraph over binary nodes with one CPT per node.

    ``cpts[v]`` has shape (2**k, 2) where k is v's parent count; row order
    runs over parent assignments in binary order (first parent in the node
    tuple is the most significant bit) and each row is (P(v=0), P(v=1)).
    """

    nodes: tuple
    edges: tuple        # (parent, child) pairs
    cpts: dict

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise DagError("duplicate nodes")
        edges = tuple((a, b) for a, b in self.edges)
        known = set(nodes)
        for a, b in edges:
            if a not in known or b not in known:
                raise DagError(f"edge ({a!r}, {b!r}) references unknown node")
            if a == b:
                raise DagError(f"self loop on {a!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        order = self._topological_order()
        object.__setattr__(self, "_topo", order)
        cpts = {}
        for v in nodes:
            k = len(self.parents(v))
            table = np.asarray(self.cpts[v], dtype=float).reshape(2**k, 2)
            row_sums = table.sum(axis=1)
            if np.any(np.abs(row_sums - 1.0) > TOL.weight_sum):
                raise DagError(f"CPT rows of {v!r} must each sum to 1")
            if np.any(table < 0):
                raise DagError(f"CPT of {v!r} has negative entries")
            cpts[v] = table
        object.__setattr__(self, "cpts", cpts)

    def parents(self, v) -> tuple:
        return tuple(a for a, b in self.edges if b == v)

    def children(self, v) -> tuple:
        return tuple(b for a, b in self.edges if a == v)

    def _topological_order(self) -> tuple:
        remaining = {v: set(self.parents(v)) for v in self.nodes}
        order = []
        while remaining:
            ready = [v for v, ps in remaining.items() if not ps]
            if not ready:
                raise DagError("graph contains a cycle")
            for v in ready:
                order.append(v)
                del remaining[v]
            for ps in remaining.values():
                ps.difference_update(ready)
        return tuple(order)

    @property
    def size(self) -> int:
        return len(self.nodes)


def markov_blanket(dag: CausalDag, x) -> frozenset:
    """Parents, children and co-parents of x (never contains x itself)."""
    if x not in dag.nodes:
        raise DagError(f"unknown node {x!r}")
    blanket = set(dag.parents(x)) | set(dag.children(x))
    for child in dag.children(x):
        blanket.update(dag.parents(child))
    blanket.discard(x)
    return frozenset(blanket)


def joint_distribution(dag: CausalDag) -> np.ndarray:
    """Exact joint over all 2**n assignments; bit order follows dag.nodes,
    first node most significant."""
    n = dag.size
    if n > MAX_GROUND_VARS:
        raise DagError(f"{n} nodes exceed the exact-enumeration cap {MAX_GROUND_VARS}")
    pos = {v: i for i, v in enumerate(dag.nodes)}
    states = np.arange(2**n)
    bits = (states[:, None] >> (n - 1 - np.arange(n))) & 1  # (2**n, n)
    joint = np.ones(2**n)
    for v in dag.nodes:
        ps = dag.parents(v)
        if ps:
            weights = 1 << (len(ps) - 1 - np.arange(len(ps)))
            rows = bits[:, [pos[p] for p in ps]] @ weights
        else:
            rows = np.zeros(2**n, dtype=int)
        joint *= dag.cpts[v][rows, bits[:, pos[v]]]
    return joint


def sample_assignments(dag: CausalDag, count: int, seed: int) -> np.ndarray:
    """Ancestral sampling; returns (count, n) array of 0/1 values in node order."""
    rng = np.random.Generator(np.random.Philox(seed))
    pos = {v: i for i, v in enumerate(dag.nodes)}
    out = np.zeros((count, dag.size), dtype=np.int8)
    for v in dag._topo:
        ps = dag.parents(v)
        if ps:
            weights = 1 << (len(ps) - 1 - np.arange(len(ps)))
            rows = out[:, [pos[p] for p in ps]] @ weights
        else:
            rows = np.zeros(count, dtype=int)
        p_one = dag.cpts[v][rows, 1]
        out[:, pos[v]] = (rng.random(count) < p_one).astype(np.int8)
    return out


@dataclass(frozen=True)
class ShieldReport:
    shielded: bool
    max_gap: float
    tol: float
    mode: str
    leak: tuple | None = None  # (blanket assignment dict, x value, exterior assignment dict, gap)


def _group_axes(dag: CausalDag, x, blanket):
    pos = {v: i for i, v in enumerate(dag.nodes)}
    blanket = sorted(blanket, key=pos.get)
    exterior = [v for v in dag.nodes if v != x and v not in blanket]
    return pos, blanket, exterior


def blanket_shields(
    dag: CausalDag,
    x,
    blanket=None,
    mode: str = "exact",
    samples: int = 20000,
    seed: int = 0,
    tol: float | None = None,
) -> ShieldReport:
    """Test whether conditioning on ``blanket`` makes x independent of the rest.

    ``blanket`` defaults to the Markov blanket of x.  In exact mode the full
    joint is enumerated and, for every blanket assignment of positive
    probability, P(x, exterior | blanket) is compared against the product of
    its marginals.  Sampled mode runs the same comparison on an empirical
    joint from seeded ancestral sampling, with a sample-size-aware tolerance.
    """
    if x not in dag.nodes:
        raise DagError(f"unknown node {x!r}")
    if blanket is None:
        blanket = markov_blanket(dag, x)
    blanket = frozenset(blanket) - {x}
    if not blanket <= set(dag.nodes):
        raise DagError("blanket contains unknown nodes")

    if mode == "exact":
        joint = joint_distribution(dag)
        effective_tol = TOL.blanket if tol is None else tol
    elif mode == "sampled":
        draws = sample_assignments(dag, samples, seed)
        weights = 1 << (dag.size - 1 - np.arange(dag.size))
        idx = draws @ weights
        joint = np.bincount(idx, minlength=2**dag.size).astype(float) / samples
        effective_tol = (10.0 / np.sqrt(samples)) if tol is None else tol
    else:
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")

    pos, blanket_order, exterior = _group_axes(dag, x, blanket)
    n = dag.size
    # Reorder the joint into axes (x, blanket..., exterior...) for vector math.
    perm = [pos[x]] + [pos[v] for v in blanket_order] + [pos[v] for v in exterior]
    cube = joint.reshape((2,) * n).transpose(perm)
    nb, ne = len(blanket_order), len(exterior)
    table = cube.reshape(2, 2**nb, 2**ne)

    worst_gap = 0.0
    worst = None
    for b in range(2**nb):
        block = table[:, b, :]            # (2, 2**ne)
        p_b = block.sum()
        if p_b <= 0.0:
            continue
        cond = block / p_b                # P(x, ext | blanket = b)
        px = cond.sum(axis=1)
        pe = cond.sum(axis=0)
        gap = np.abs(cond - np.outer(px, pe))
        g = float(gap.max())
        if g > worst_gap:
            worst_gap = g
            xi, ei = np.unravel_index(int(gap.argmax()), gap.shape)
            worst = (
                {v: (b >> (nb - 1 - k)) & 1 for k, v in enumerate(blanket_order)},
                int(xi),
                {v: (int(ei) >> (ne - 1 - k)) & 1 for k, v in enumerate(exterior)},
                g,
            )
    shielded = worst_gap <= effective_tol
    return ShieldReport(
        shielded=shielded,
        max_gap=worst_gap,
        tol=effective_tol,
        mode=mode,
        leak=None if shielded else worst,
    )
