"""Finite free models of Sunada cover diagrams.

The covering space is a finite set with a free left G-action, the geodesic
flow is any permutation commuting with that action, and the lifted Radon
transform becomes an explicit unitary matrix between the two quotient
function spaces.  Koopman matrices and fixed-point traces stay integer-exact;
only the Radon matrix carries floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import (
    FiniteGroup,
    GroupError,
    IntertwinerKernel,
    Subgroup,
    is_gassmann,
)
from ._util import parallel_map

__all__ = [
    "CoverDiagram",
    "EquivariantDynamics",
    "RadonMatrix",
    "build_cover",
    "lift_radon",
    "equivariant_dynamics",
    "random_equivariant_dynamics",
    "verify_intertwining",
    "flat_trace_discrete",
    "verify_trace_equality",
    "trace_equality_sweep",
    "TraceEqualityReport",
    "TraceSweepReport",
]

RADON_GATE = 1e-10
INTERTWINE_GATE = 1e-9
CONJ_TRACE_GATE = 1e-8


class CoverError(ValueError):
    """Inconsistent diagram, non-free action, or mismatched kernel."""


@dataclass
class CoverDiagram:
    """Finite G-set with free action and its two subgroup quotients.

    ``model`` is ``regular`` (the set is G itself under left translation) or
    ``product`` (G x F with trivial action on the second factor).  Points of
    the product model are indexed ``g * f_size + f``.
    """

    group: FiniteGroup
    h1: Subgroup
    h2: Subgroup
    model: str
    f_size: int
    orbit1_of: np.ndarray = field(repr=False)
    orbit2_of: np.ndarray = field(repr=False)
    n_orbits1: int = 0
    n_orbits2: int = 0

    @property
    def size(self) -> int:
        return self.group.order * self.f_size

    def act(self, a: int, x: int) -> int:
        """Left action of group element a on point x."""
        if self.f_size == 1:
            return self.group.mul(a, x)
        g, f = divmod(x, self.f_size)
        return self.group.mul(a, g) * self.f_size + f


def _orbit_labels(G: FiniteGroup, H: Subgroup, f_size: int) -> tuple[np.ndarray, int]:
    size = G.order * f_size
    labels = -np.ones(size, dtype=np.int64)
    nxt = 0
    for x in range(size):
        if labels[x] >= 0:
            continue
        if f_size == 1:
            orbit = [G.mul(h, x) for h in H.members]
        else:
            g, f = divmod(x, f_size)
            orbit = [G.mul(h, g) * f_size + f for h in H.members]
        if len(set(orbit)) != H.order:
            raise CoverError("H-action is not free on the model")
        for y in orbit:
            labels[y] = nxt
        nxt += 1
    return labels, nxt


def build_cover(
    G: FiniteGroup,
    H1: Subgroup,
    H2: Subgroup,
    model: str = "regular",
    f_size: int = 1,
) -> CoverDiagram:
    """Materialize the diagram: total set, free action, both quotients."""
    if H1.parent is not G or H2.parent is not G:
        raise CoverError("subgroups must belong to the given group")
    if model == "regular":
        f_size = 1
    elif model == "product":
        if f_size < 1:
            raise CoverError("product model needs f_size >= 1")
    else:
        raise CoverError(f"unknown model {model!r}")
    orbit1, n1 = _orbit_labels(G, H1, f_size)
    orbit2, n2 = _orbit_labels(G, H2, f_size)
    diagram = CoverDiagram(G, H1, H2, model, f_size, orbit1, orbit2, n1, n2)
    # freeness of the full G-action (guaranteed for these models; assert anyway)
    size = diagram.size
    for g in range(1, G.order):
        x = 0
        if diagram.act(g, x) == x:
            raise CoverError("group action is not free")
    assert n1 * H1.order == size and n2 * H2.order == size
    return diagram


@dataclass
class EquivariantDynamics:
    """Permutation of the total set commuting with the G-action, plus quotients."""

    diagram: CoverDiagram
    tmap: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    right_element: int | None = None
    f_perm: tuple[int, ...] | None = None


def _quotient_perm(diagram: CoverDiagram, tmap: np.ndarray, level: int) -> np.ndarray:
    labels = diagram.orbit1_of if level == 1 else diagram.orbit2_of
    n = diagram.n_orbits1 if level == 1 else diagram.n_orbits2
    out = -np.ones(n, dtype=np.int64)
    for x in range(diagram.size):
        o, img = labels[x], labels[tmap[x]]
        if out[o] < 0:
            out[o] = img
        elif out[o] != img:
            raise CoverError("dynamics does not descend to the quotient")
    return out


def equivariant_dynamics(
    diagram: CoverDiagram, element: int, f_perm=None
) -> EquivariantDynamics:
    """Right translation by a group element, optionally composed with an F-permutation."""
    G = diagram.group
    f_size = diagram.f_size
    if f_perm is None:
        f_perm = tuple(range(f_size))
    else:
        f_perm = tuple(int(i) for i in f_perm)
        if sorted(f_perm) != list(range(f_size)):
            raise CoverError("f_perm is not a permutation of the fiber")
    tmap = np.empty(diagram.size, dtype=np.int64)
    for x in range(diagram.size):
        if f_size == 1:
            tmap[x] = G.mul(x, element)
        else:
            g, f = divmod(x, f_size)
            tmap[x] = G.mul(g, element) * f_size + f_perm[f]
    # right translation commutes with the left action; verify on generators
    for a in list(G.generator_indices) or [0]:
        for x in range(diagram.size):
            if tmap[diagram.act(a, x)] != diagram.act(a, int(tmap[x])):
                raise CoverError("dynamics does not commute with the group action")
    t1 = _quotient_perm(diagram, tmap, 1)
    t2 = _quotient_perm(diagram, tmap, 2)
    return EquivariantDynamics(diagram, tmap, t1, t2, element, f_perm)


def random_equivariant_dynamics(diagram: CoverDiagram, seed: int) -> EquivariantDynamics:
    """Seeded right translation (and fiber permutation, for the product model)."""
    rng = np.random.default_rng(seed)
    element = int(rng.integers(diagram.group.order))
    f_perm = tuple(int(i) for i in rng.permutation(diagram.f_size))
    return equivariant_dynamics(diagram, element, f_perm)


@dataclass
class RadonMatrix:
    """Lifted Radon transform between the two quotient function spaces."""

    matrix: np.ndarray
    kernel: IntertwinerKernel
    diagram: CoverDiagram
    unitarity_residual: float


def lift_radon(kernel: IntertwinerKernel, diagram: CoverDiagram) -> RadonMatrix:
    """Assemble (1/#H1) sum_a A(a) (pushforward o a-translation o pullback).

    The pushforward is the measure adjoint of the pullback (fiber average,
    a 1/#H2 factor), which is what makes the matrix unitary with respect to
    plain vector inner products; see the README for the normalization note.
    """
    G = diagram.group
    if kernel.group is not G or kernel.h1 != diagram.h1 or kernel.h2 != diagram.h2:
        raise CoverError("kernel was built for a different (G, H1, H2)")
    U = np.zeros((diagram.n_orbits2, diagram.n_orbits1), dtype=complex)
    orbit1, orbit2 = diagram.orbit1_of, diagram.orbit2_of
    for a in range(G.order):
        va = kernel.value_of_element(a)
        if va == 0.0:
            continue
        a_inv = G.inverse[a]
        for x in range(diagram.size):
            U[orbit2[x], orbit1[diagram.act(a_inv, x)]] += va
    U /= diagram.h1.order * diagram.h2.order
    eye2 = np.eye(diagram.n_orbits2)
    eye1 = np.eye(diagram.n_orbits1)
    resid = max(
        float(np.abs(U @ U.conj().T - eye2).max()),
        float(np.abs(U.conj().T @ U - eye1).max()),
    )
    if resid > RADON_GATE:
        raise CoverError(f"Radon matrix fails unitarity gate: residual {resid:.3e}")
    return RadonMatrix(U, kernel, diagram, resid)


def verify_intertwining(radon: RadonMatrix, dyn: EquivariantDynamics) -> float:
    """Max-norm of U V1 - V2 U for the 0/1 Koopman matrices of the quotients."""
    U = radon.matrix
    t1 = np.asarray(dyn.t1)
    t2 = np.asarray(dyn.t2)
    # (U V1)[:, o] sums columns o' with t1[o'] = o, i.e. column t1^{-1}(o)
    UV1 = U[:, np.argsort(t1)]
    V2U = U[t2, :]
    return float(np.abs(UV1 - V2U).max())


def _perm_power(p: np.ndarray, t: int) -> np.ndarray:
    out = np.arange(len(p))
    q = np.asarray(p)
    k = t
    while k:
        if k & 1:
            out = q[out]
        q = q[q]
        k >>= 1
    return out


def flat_trace_discrete(dyn: EquivariantDynamics, level: int, t: int) -> int:
    """Number of fixed points of the t-th iterate of the level quotient map."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if level not in (1, 2):
        raise ValueError("level must be 1 or 2")
    p = dyn.t1 if level == 1 else dyn.t2
    pt = _perm_power(p, t)
    return int(np.sum(pt == np.arange(len(p))))


def upstairs_orbit_count(dyn: EquivariantDynamics, level: int, t: int) -> int:
    """(1/#H_level) #{x in the total set : T^t x lies in the H-orbit of x}.

    Independent route to the same trace, used to cross-check
    :func:`flat_trace_discrete` exactly.
    """
    diagram = dyn.diagram
    labels = diagram.orbit1_of if level == 1 else diagram.orbit2_of
    h_order = diagram.h1.order if level == 1 else diagram.h2.order
    pt = _perm_power(dyn.tmap, t)
    hits = int(np.sum(labels[pt] == labels))
    assert hits % h_order == 0
    return hits // h_order


@dataclass
class TraceEqualityReport:
    rows: list[tuple[int, int, int, bool]]
    verdict: bool
    warning: str | None = None
    conjugation_residual: float | None = None

    def to_csv_rows(self) -> list[dict]:
        return [
            {"t": t, "trace_level1": a, "trace_level2": b, "equal": eq}
            for t, a, b, eq in self.rows
        ]


def verify_trace_equality(
    diagram: CoverDiagram,
    dyn: EquivariantDynamics,
    t_max: int = 50,
    radon: RadonMatrix | None = None,
) -> TraceEqualityReport:
    """Tabulate level-1 and level-2 fixed-point counts for t = 1..t_max.

    With a Gassmann pair the counts are provably equal; a failing Gassmann
    certificate downgrades the verdict to a warning (traces may differ).
    When a Radon matrix is supplied, the trace of U V1^t U* is compared with
    the level-2 count as the floating secondary route.
    """
    cert = is_gassmann(diagram.group, diagram.h1, diagram.h2)
    rows = []
    all_equal = True
    for t in range(1, t_max + 1):
        a = flat_trace_discrete(dyn, 1, t)
        b = flat_trace_discrete(dyn, 2, t)
        rows.append((t, a, b, a == b))
        all_equal = all_equal and a == b
    warning = None
    if not cert.verdict:
        warning = "Gassmann condition fails; trace equality not guaranteed"
    conj_resid = None
    if radon is not None:
        U = radon.matrix
        conj_resid = 0.0
        for t in range(1, t_max + 1):
            pt = _perm_power(dyn.t1, t)
            tr1_conj = np.sum(U[:, pt] * U.conj())
            conj_resid = max(conj_resid, abs(tr1_conj - rows[t - 1][2]))
        conj_resid = float(conj_resid)
        if cert.verdict and conj_resid > CONJ_TRACE_GATE:
            raise CoverError(
                f"conjugation route disagrees with counts: residual {conj_resid:.3e}"
            )
    verdict = all_equal and cert.verdict
    return TraceEqualityReport(rows, verdict, warning, conj_resid)


@dataclass
class TraceSweepReport:
    seeds: list[int]
    reports: list[TraceEqualityReport]
    max_intertwining_residual: float | None

    @property
    def all_equal(self) -> bool:
        return all(r.verdict for r in self.reports)


def trace_equality_sweep(
    diagram: CoverDiagram,
    seeds,
    t_max: int = 50,
    radon: RadonMatrix | None = None,
) -> TraceSweepReport:
    """Run verify_trace_equality over many seeded dynamics, merged in seed order."""
    seeds = [int(s) for s in seeds]

    def one(seed: int):
        dyn = random_equivariant_dynamics(diagram, seed)
        rep = verify_trace_equality(diagram, dyn, t_max, radon=radon)
        resid = verify_intertwining(radon, dyn) if radon is not None else None
        return rep, resid

    results = parallel_map(one, seeds)
    reports = [r for r, _ in results]
    resids = [x for _, x in results if x is not None]
    return TraceSweepReport(seeds, reports, max(resids) if resids else None)
