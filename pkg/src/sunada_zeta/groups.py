"""Exact finite-group algebra for Gassmann pairs and intertwining kernels.

All combinatorial data (closures, classes, cosets, intersection counts) is
integer-exact.  Floating point enters only in the construction and
verification of intertwining kernels, where hard residual gates apply.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupError",
    "FiniteGroup",
    "Subgroup",
    "GassmannCertificate",
    "IntertwinerKernel",
    "IntertwinerReport",
    "parse_cycles",
    "parse_group",
    "parse_group_file",
    "conjugacy_classes",
    "cosets",
    "double_cosets",
    "is_gassmann",
    "permutation_character",
    "subgroups_conjugate",
    "intertwiner_solve",
    "kernel_from_values",
    "verify_intertwiner",
    "gassmann_search",
]

ELEMENT_CAP = 20000
RESIDUAL_GATE = 1e-10

Perm = tuple[int, ...]


class GroupError(ValueError):
    """Malformed input, broken closure, or violated group precondition."""


def _compose(p: Perm, q: Perm) -> Perm:
    """(p*q)(i) = p(q(i)): q acts first."""
    return tuple(p[q[i]] for i in range(len(p)))


def _invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse cycle notation like ``(0 1 2)(3 4)`` into a permutation tuple.

    ``()`` denotes the identity.  Cycles in one string compose right-to-left
    (rightmost cycle acts first); for disjoint cycles the order is immaterial.
    """
    s = text.strip()
    if not s:
        raise GroupError("empty permutation string")
    spans = _CYCLE_RE.findall(s)
    if _CYCLE_RE.sub("", s).strip():
        raise GroupError(f"malformed cycle string {text!r}")
    perm = tuple(range(degree))
    for span in reversed(spans):
        pts = [int(tok) for tok in span.replace(",", " ").split()]
        if not pts:
            continue
        if any(p < 0 or p >= degree for p in pts):
            raise GroupError(f"cycle point out of range in {text!r} (degree {degree})")
        if len(set(pts)) != len(pts):
            raise GroupError(f"repeated point in cycle {text!r}")
        cyc = list(range(degree))
        for i, p in enumerate(pts):
            cyc[p] = pts[(i + 1) % len(pts)]
        perm = _compose(tuple(cyc), perm)
    return perm


def perm_to_cycles(p: Perm) -> str:
    """Inverse of :func:`parse_cycles`, with fixed points omitted."""
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        parts.append("(" + " ".join(str(k) for k in cyc) + ")")
    return "".join(parts) if parts else "()"


class FiniteGroup:
    """Permutation group on ``{0..degree-1}`` with an explicit element list.

    Element 0 is the identity and the element ordering is the breadth-first
    closure order (products ``x * gen`` in discovery order), so indices are
    reproducible for a fixed generator list.  Instances are immutable.
    """

    def __init__(self, degree: int, elements: list[Perm], generator_indices: list[int]):
        self.degree = int(degree)
        self.elements: tuple[Perm, ...] = tuple(elements)
        self.generator_indices: tuple[int, ...] = tuple(generator_indices)
        self.index: dict[Perm, int] = {p: i for i, p in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise GroupError("duplicate elements in group list")
        identity = tuple(range(self.degree))
        if not self.elements or self.elements[0] != identity:
            raise GroupError("element 0 must be the identity")
        try:
            self.inverse: tuple[int, ...] = tuple(
                self.index[_invert(p)] for p in self.elements
            )
        except KeyError as exc:
            raise GroupError("element list not closed under inverse") from exc
        self._mul_table: np.ndarray | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity_index(self) -> int:
        return 0

    @property
    def generators(self) -> tuple[Perm, ...]:
        return tuple(self.elements[i] for i in self.generator_indices)

    def mul_table(self) -> np.ndarray:
        """Dense multiplication table, built on first use (order <= cap only)."""
        if self._mul_table is None:
            n = self.order
            table = np.empty((n, n), dtype=np.int32)
            for i in range(n):
                pi = self.elements[i]
                for j in range(n):
                    table[i, j] = self.index[_compose(pi, self.elements[j])]
            self._mul_table = table
        return self._mul_table

    def mul(self, i: int, j: int) -> int:
        if self._mul_table is not None:
            return int(self._mul_table[i, j])
        try:
            return self.index[_compose(self.elements[i], self.elements[j])]
        except KeyError as exc:
            raise GroupError("element list not closed under composition") from exc

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul(self.mul(g, x), self.inverse[g])

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup(degree={self.degree}, order={self.order})"


def parse_group(
    generator_strings: list[str] | tuple[str, ...],
    degree: int,
    cap: int = ELEMENT_CAP,
) -> FiniteGroup:
    """Close a generator list (cycle notation) into a :class:`FiniteGroup`."""
    gens = [parse_cycles(s, degree) for s in generator_strings]
    identity = tuple(range(degree))
    elements: list[Perm] = [identity]
    index = {identity: 0}
    frontier = [identity]
    while frontier:
        nxt: list[Perm] = []
        for x in frontier:
            for g in gens:
                y = _compose(x, g)
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
                    if len(elements) > cap:
                        raise GroupError(f"closure exceeds element cap {cap}")
        frontier = nxt
    gen_indices = [index[g] for g in gens]
    return FiniteGroup(degree, elements, gen_indices)


def parse_group_file(path) -> FiniteGroup:
    """Read the text fixture format: ``degree: N`` then one generator per line."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].lower().startswith("degree:"):
        raise GroupError(f"{path}: first line must be 'degree: N'")
    degree = int(lines[0].split(":", 1)[1])
    gens = lines[1:]
    if not gens:
        raise GroupError(f"{path}: no generators")
    return parse_group(gens, degree)


class Subgroup:
    """Subgroup of a :class:`FiniteGroup`, stored as sorted member indices."""

    def __init__(self, parent: FiniteGroup, members):
        self.parent = parent
        self.members: tuple[int, ...] = tuple(sorted(set(int(m) for m in members)))
        self._member_set = frozenset(self.members)
        if parent.identity_index not in self._member_set:
            raise GroupError("subgroup must contain the identity")
        for a in self.members:
            if parent.inverse[a] not in self._member_set:
                raise GroupError("subgroup not closed under inverse")
            for b in self.members:
                if parent.mul(a, b) not in self._member_set:
                    raise GroupError("subgroup not closed under composition")

    @classmethod
    def from_generators(cls, parent: FiniteGroup, gens) -> "Subgroup":
        """Close generators given as element indices, perms, or cycle strings."""
        idxs = []
        for g in gens:
            if isinstance(g, str):
                perm = parse_cycles(g, parent.degree)
                if perm not in parent.index:
                    raise GroupError(f"generator {g!r} not in parent group")
                idxs.append(parent.index[perm])
            elif isinstance(g, tuple):
                idxs.append(parent.index[g])
            else:
                idxs.append(int(g))
        members = {parent.identity_index}
        frontier = [parent.identity_index]
        while frontier:
            nxt = []
            for x in frontier:
                for g in idxs:
                    y = parent.mul(x, g)
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return cls(parent, members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def group_index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, i: int) -> bool:
        return i in self._member_set

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.members == self.members
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, index={self.group_index})"


def conjugacy_classes(G: FiniteGroup) -> list[list[int]]:
    """Partition element indices into conjugacy classes.

    Classes are each sorted and ordered by smallest member, so the identity
    class ``[0]`` always comes first.
    """
    seen = [False] * G.order
    classes: list[list[int]] = []
    gens = list(G.generator_indices) or [G.identity_index]
    for i in range(G.order):
        if seen[i]:
            continue
        orbit = {i}
        frontier = [i]
        seen[i] = True
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = G.conj(g, x)
                    if y not in orbit:
                        orbit.add(y)
                        seen[y] = True
                        nxt.append(y)
            frontier = nxt
        classes.append(sorted(orbit))
    return classes


def cosets(G: FiniteGroup, H: Subgroup, side: str = "left") -> list[tuple[int, ...]]:
    """Partition G into cosets of H; blocks sorted, ordered by smallest rep.

    ``left`` means blocks gH, ``right`` means Hg.
    """
    if H.parent is not G:
        raise GroupError("subgroup does not belong to this group")
    if side not in ("left", "right"):
        raise GroupError(f"side must be 'left' or 'right', got {side!r}")
    assigned = [False] * G.order
    blocks: list[tuple[int, ...]] = []
    for g in range(G.order):
        if assigned[g]:
            continue
        if side == "left":
            block = sorted(G.mul(g, h) for h in H.members)
        else:
            block = sorted(G.mul(h, g) for h in H.members)
        for x in block:
            assigned[x] = True
        blocks.append(tuple(block))
    return blocks


def double_cosets(G: FiniteGroup, H2: Subgroup, H1: Subgroup) -> list[tuple[int, ...]]:
    """Partition G into double cosets H2 a H1, ordered by smallest rep."""
    if H1.parent is not G or H2.parent is not G:
        raise GroupError("subgroups must belong to the same group")
    assigned = [False] * G.order
    blocks: list[tuple[int, ...]] = []
    for a in range(G.order):
        if assigned[a]:
            continue
        block = sorted(
            {G.mul(G.mul(b2, a), b1) for b2 in H2.members for b1 in H1.members}
        )
        for x in block:
            assigned[x] = True
        blocks.append(tuple(block))
    return blocks


@dataclass(frozen=True)
class GassmannCertificate:
    """Per-conjugacy-class intersection counts for a subgroup pair."""

    class_reps: tuple[int, ...]
    class_sizes: tuple[int, ...]
    counts_h1: tuple[int, ...]
    counts_h2: tuple[int, ...]
    verdict: bool
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "classes": [
                {"rep": r, "size": s}
                for r, s in zip(self.class_reps, self.class_sizes)
            ],
            "counts_h1": list(self.counts_h1),
            "counts_h2": list(self.counts_h2),
            "verdict": self.verdict,
        }


def is_gassmann(G: FiniteGroup, H1: Subgroup, H2: Subgroup) -> GassmannCertificate:
    """Certify |C ∩ H1| = |C ∩ H2| for every conjugacy class C."""
    classes = conjugacy_classes(G)
    reps = tuple(c[0] for c in classes)
    sizes = tuple(len(c) for c in classes)
    counts1 = tuple(sum(1 for x in c if x in H1) for c in classes)
    counts2 = tuple(sum(1 for x in c if x in H2) for c in classes)
    if H1.order != H2.order:
        return GassmannCertificate(
            reps, sizes, counts1, counts2, False,
            note=f"order mismatch: {H1.order} != {H2.order}",
        )
    verdict = counts1 == counts2
    return GassmannCertificate(reps, sizes, counts1, counts2, verdict)


def permutation_character(G: FiniteGroup, H: Subgroup) -> np.ndarray:
    """Number of cosets gH fixed by a representative of each conjugacy class."""
    blocks = cosets(G, H, "left")
    coset_of = [0] * G.order
    for ci, block in enumerate(blocks):
        for x in block:
            coset_of[x] = ci
    classes = conjugacy_classes(G)
    out = np.zeros(len(classes), dtype=np.int64)
    for k, cls in enumerate(classes):
        c = cls[0]
        out[k] = sum(
            1 for block in blocks if coset_of[G.mul(c, block[0])] == coset_of[block[0]]
        )
    return out


def subgroups_conjugate(G: FiniteGroup, H1: Subgroup, H2: Subgroup) -> bool:
    """True iff g H1 g^-1 = H2 for some g in G (brute force)."""
    if H1.order != H2.order:
        return False
    target = frozenset(H2.members)
    for g in range(G.order):
        if frozenset(G.conj(g, h) for h in H1.members) == target:
            return True
    return False


def _coset_action(G: FiniteGroup, blocks: list[tuple[int, ...]]) -> np.ndarray:
    """act[g, j] = index of the coset g * (rep of block j) under left translation."""
    coset_of = np.empty(G.order, dtype=np.int64)
    for ci, block in enumerate(blocks):
        for x in block:
            coset_of[x] = ci
    reps = [b[0] for b in blocks]
    act = np.empty((G.order, len(blocks)), dtype=np.int64)
    for g in range(G.order):
        for j, r in enumerate(reps):
            act[g, j] = coset_of[G.mul(g, r)]
    return act


@dataclass
class IntertwinerKernel:
    """Double-coset kernel A with its induced coset-space matrix.

    ``matrix`` is |G/H2| x |G/H1|; entry (i, j) equals
    ``values[double coset of rep_i^{-1} rep_j]``.  Characters on H1, H2 are
    fixed to the trivial character.
    """

    group: FiniteGroup
    h1: Subgroup
    h2: Subgroup
    values: dict[int, complex]
    matrix: np.ndarray
    cosets1: list[tuple[int, ...]] = field(repr=False)
    cosets2: list[tuple[int, ...]] = field(repr=False)
    dc_of_element: np.ndarray = field(repr=False)

    def value_of_element(self, a: int) -> complex:
        return self.values[int(self.dc_of_element[a])]


def _double_coset_labels(G, H2, H1):
    blocks = double_cosets(G, H2, H1)
    dc_of = np.empty(G.order, dtype=np.int64)
    for di, block in enumerate(blocks):
        for x in block:
            dc_of[x] = di
    reps = [b[0] for b in blocks]
    return blocks, dc_of, reps


def kernel_from_values(
    G: FiniteGroup, H1: Subgroup, H2: Subgroup, values_by_rep: dict[int, complex]
) -> IntertwinerKernel:
    """Build the induced matrix of an explicit double-coset function.

    ``values_by_rep`` maps the smallest element index of each double coset
    H2\\G/H1 to a complex value.  No unitarity is enforced here; use
    :func:`verify_intertwiner` to check.
    """
    blocks, dc_of, reps = _double_coset_labels(G, H2, H1)
    values = {}
    for di, r in enumerate(reps):
        v = values_by_rep.get(r, 0.0)
        values[di] = complex(v)
    cos1 = cosets(G, H1, "left")
    cos2 = cosets(G, H2, "left")
    mat = np.empty((len(cos2), len(cos1)), dtype=complex)
    for i, b2 in enumerate(cos2):
        ri_inv = G.inverse[b2[0]]
        for j, b1 in enumerate(cos1):
            mat[i, j] = values[int(dc_of[G.mul(ri_inv, b1[0])])]
    return IntertwinerKernel(G, H1, H2, values, mat, cos1, cos2, dc_of)


def identity_kernel(G: FiniteGroup, H: Subgroup) -> IntertwinerKernel:
    """Kernel whose induced matrix is the identity on G/H (A = indicator of H)."""
    return kernel_from_values(G, H, H, {G.identity_index: 1.0})


def intertwiner_solve(
    G: FiniteGroup,
    H1: Subgroup,
    H2: Subgroup,
    seed: int = 0,
    max_retries: int = 8,
    gate: float = RESIDUAL_GATE,
) -> IntertwinerKernel:
    """Construct a unitary G-equivariant kernel by group averaging.

    Averages a seeded random complex matrix over the two coset actions
    (B = |G|^-1 sum_g rho2(g) R rho1(g)^-1), takes the polar unitary factor,
    and gates the result with :func:`verify_intertwiner`.  Retries with a
    fresh seed when the average is numerically singular.
    """
    cert = is_gassmann(G, H1, H2)
    if not cert.verdict:
        raise GroupError(f"Gassmann condition fails ({cert.note or 'class counts differ'})")
    cos1 = cosets(G, H1, "left")
    cos2 = cosets(G, H2, "left")
    m1, m2 = len(cos1), len(cos2)
    if m1 != m2:
        raise GroupError("coset spaces have different sizes")  # cannot happen post-cert
    act1 = _coset_action(G, cos1)
    act2 = _coset_action(G, cos2)
    rng = np.random.default_rng(seed)
    last_sigma = 0.0
    for _ in range(max_retries):
        R = rng.standard_normal((m2, m1)) + 1j * rng.standard_normal((m2, m1))
        B = np.zeros((m2, m1), dtype=complex)
        for g in range(G.order):
            B[np.ix_(act2[g], act1[g])] += R
        B /= G.order
        svals = np.linalg.svd(B, compute_uv=False)
        last_sigma = float(svals[-1])
        if last_sigma < 1e-8:
            continue
        U, _, Vh = np.linalg.svd(B)
        mat = U @ Vh
        blocks, dc_of, reps = _double_coset_labels(G, H2, H1)
        # row 0 is the coset of the identity, so entry (0, j) is A(rep_j).
        values = {}
        for di, block in enumerate(blocks):
            col = None
            for j, b1 in enumerate(cos1):
                if dc_of[b1[0]] == di:
                    col = j
                    break
            if col is None:
                # double coset meets no column representative directly;
                # read the value off any matching matrix entry instead
                found = False
                for i, b2 in enumerate(cos2):
                    ri_inv = G.inverse[b2[0]]
                    for j, b1 in enumerate(cos1):
                        if dc_of[G.mul(ri_inv, b1[0])] == di:
                            values[di] = complex(mat[i, j])
                            found = True
                            break
                    if found:
                        break
            else:
                values[di] = complex(mat[0, col])
        kernel = IntertwinerKernel(G, H1, H2, values, mat, cos1, cos2, dc_of)
        if verify_intertwiner(kernel, gate=gate).passes:
            return kernel
    raise GroupError(
        f"no unitary intertwiner after {max_retries} seeds "
        f"(last smallest singular value {last_sigma:.3e})"
    )


@dataclass(frozen=True)
class IntertwinerReport:
    unitarity_residual: float
    equivariance_residual: float
    constancy_residual: float
    gate: float

    @property
    def passes(self) -> bool:
        return (
            self.unitarity_residual <= self.gate
            and self.equivariance_residual <= self.gate
            and self.constancy_residual <= self.gate
        )

    def to_json_dict(self) -> dict:
        return {
            "unitarity_residual": self.unitarity_residual,
            "equivariance_residual": self.equivariance_residual,
            "constancy_residual": self.constancy_residual,
            "passes": self.passes,
        }


def verify_intertwiner(kernel: IntertwinerKernel, gate: float = RESIDUAL_GATE) -> IntertwinerReport:
    """Max-norm residuals for unitarity, equivariance, and coset constancy."""
    G, mat = kernel.group, kernel.matrix
    eye = np.eye(mat.shape[0])
    unit = max(
        float(np.abs(mat.conj().T @ mat - eye).max()),
        float(np.abs(mat @ mat.conj().T - eye).max()),
    )
    act1 = _coset_action(G, kernel.cosets1)
    act2 = _coset_action(G, kernel.cosets2)
    equi = 0.0
    gens = list(G.generator_indices) or [G.identity_index]
    for g in gens:
        lhs = mat[:, act1[g]]          # A * rho1(g)
        rhs = mat[np.argsort(act2[g]), :]  # rho2(g) * A  (rows permuted by rho2(g)^-1)
        equi = max(equi, float(np.abs(lhs - rhs).max()))
    const = 0.0
    for i, b2 in enumerate(kernel.cosets2):
        ri_inv = G.inverse[b2[0]]
        for j, b1 in enumerate(kernel.cosets1):
            want = kernel.values[int(kernel.dc_of_element[G.mul(ri_inv, b1[0])])]
            const = max(const, abs(mat[i, j] - want))
    return IntertwinerReport(unit, equi, float(const), gate)


def _close_generators(G: FiniteGroup, gens: tuple[int, ...]) -> frozenset:
    """Subgroup generated by element indices, via frontier-times-generator BFS."""
    table = G.mul_table()
    members = {G.identity_index}
    frontier = [G.identity_index]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(table[x, g])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(members)


def _all_subgroups(G: FiniteGroup, min_order: int) -> list[Subgroup]:
    """Every subgroup of order >= min_order, by closure growth from cyclic seeds.

    Each subgroup carries a small generating set; extensions <H, g> are only
    attempted for one g per left H-coset, which loses nothing since
    <H, hg> = <H, g> for h in H.
    """
    seen: dict[frozenset, tuple[int, ...]] = {}
    pool: list[frozenset] = []

    def add(members: frozenset, gens: tuple[int, ...]):
        if members not in seen:
            seen[members] = gens
            pool.append(members)

    table = G.mul_table()
    add(frozenset({G.identity_index}), ())
    for g in range(G.order):
        members = {G.identity_index}
        x = g
        while x != G.identity_index:
            members.add(x)
            x = int(table[x, g])
        add(frozenset(members), (g,))
    i = 0
    while i < len(pool):
        H = pool[i]
        gens = seen[H]
        i += 1
        if len(H) == G.order:
            continue
        covered = set(H)
        for g in range(G.order):
            if g in covered:
                continue
            # mark the whole coset gH as tried
            covered.update(int(table[g, h]) for h in H)
            new_gens = gens + (g,)
            add(_close_generators(G, new_gens), new_gens)
    return [Subgroup(G, m) for m in pool if len(m) >= min_order]


def _stabilizer_subgroups(G: FiniteGroup, min_order: int) -> list[Subgroup]:
    """Point stabilizers and setwise stabilizers of pairs/triples."""
    subs: dict[frozenset, Subgroup] = {}

    def add(members):
        if len(members) >= min_order:
            key = frozenset(members)
            if key not in subs:
                subs[key] = Subgroup(G, members)

    from itertools import combinations

    for pt in range(G.degree):
        add([i for i, p in enumerate(G.elements) if p[pt] == pt])
    for k in (2, 3):
        for subset in combinations(range(G.degree), k):
            sset = set(subset)
            add([i for i, p in enumerate(G.elements) if {p[s] for s in subset} == sset])
    return list(subs.values())


def gassmann_search(
    G: FiniteGroup, index_bound: int, exhaustive_cap: int = 400
) -> list[tuple[Subgroup, Subgroup]]:
    """Non-conjugate Gassmann pairs among subgroups of index <= index_bound.

    Enumeration is exhaustive for |G| <= exhaustive_cap and restricted to
    point/set stabilizers otherwise.  Pairs are returned sorted by member
    indices, so the output is deterministic.
    """
    if G.order > ELEMENT_CAP:
        raise GroupError(f"group order {G.order} exceeds element cap {ELEMENT_CAP}")
    min_order = max(1, G.order // index_bound)
    if G.order <= exhaustive_cap:
        candidates = _all_subgroups(G, min_order)
    else:
        candidates = _stabilizer_subgroups(G, min_order)
    candidates = [H for H in candidates if H.order * index_bound >= G.order]
    candidates.sort(key=lambda H: (H.order, H.members))
    reps: list[Subgroup] = []
    for H in candidates:
        if not any(subgroups_conjugate(G, H, K) for K in reps):
            reps.append(H)
    pairs = []
    for i, H1 in enumerate(reps):
        for H2 in reps[i + 1:]:
            if H1.order != H2.order:
                continue
            if is_gassmann(G, H1, H2).verdict:
                pairs.append((H1, H2))
    pairs.sort(key=lambda pair: (pair[0].members, pair[1].members))
    return pairs
