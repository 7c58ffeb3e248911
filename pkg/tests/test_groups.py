"""Group-core tests: every derived value is recomputed by an independent oracle."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sunada_zeta import groups as gr


# ---------------------------------------------------------------------------
# independent oracles (set-based, no FiniteGroup machinery)
# ---------------------------------------------------------------------------


def oracle_compose(p, q):
    return tuple(p[q[i]] for i in range(len(p)))


def oracle_invert(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def oracle_closure(gens, degree):
    """Fixed-point iteration on the full product set."""
    elems = {tuple(range(degree))} | set(gens)
    while True:
        new = {oracle_compose(a, b) for a in elems for b in elems}
        new |= {oracle_invert(a) for a in elems}
        if new <= elems:
            return elems
        elems |= new


def oracle_classes(G):
    """All-pairs conjugation orbits on element tuples."""
    elems = list(G.elements)
    classes = []
    seen = set()
    for p in elems:
        if p in seen:
            continue
        cls = {
            oracle_compose(oracle_compose(g, p), oracle_invert(g)) for g in elems
        }
        seen |= cls
        classes.append(cls)
    return classes


# ---------------------------------------------------------------------------
# parsing and closure
# ---------------------------------------------------------------------------


def test_parse_cycles_roundtrip():
    p = gr.parse_cycles("(0 1 2)(3 4)", 6)
    assert p == (1, 2, 0, 4, 3, 5)
    assert gr.parse_cycles(gr.perm_to_cycles(p), 6) == p
    assert gr.parse_cycles("()", 3) == (0, 1, 2)


def test_parse_cycles_errors():
    with pytest.raises(gr.GroupError):
        gr.parse_cycles("(0 1", 3)
    with pytest.raises(gr.GroupError):
        gr.parse_cycles("(0 5)", 3)
    with pytest.raises(gr.GroupError):
        gr.parse_cycles("(0 0)", 3)
    with pytest.raises(gr.GroupError):
        gr.parse_cycles("", 3)


def test_s3_closure(s3):
    assert s3.order == 6
    assert set(s3.elements) == oracle_closure(
        [gr.parse_cycles("(0 1 2)", 3), gr.parse_cycles("(0 1)", 3)], 3
    )


def test_trivial_group():
    G = gr.parse_group(["()"], 1)
    assert G.order == 1


def test_g168_closure(g168):
    assert g168.order == 168
    oracle = oracle_closure([gr.parse_cycles(s, 7) for s in ["(0 1 2 3 4 5 6)", "(0 1)(2 5)"]], 7)
    assert set(g168.elements) == oracle


def test_element_cap():
    with pytest.raises(gr.GroupError, match="cap"):
        gr.parse_group(["(0 1 2 3 4)", "(0 1)"], 5, cap=30)


def test_deterministic_ordering():
    a = gr.parse_group(["(0 1 2)", "(0 1)"], 3)
    b = gr.parse_group(["(0 1 2)", "(0 1)"], 3)
    assert a.elements == b.elements


# ---------------------------------------------------------------------------
# classes, cosets, double cosets
# ---------------------------------------------------------------------------


def test_s3_classes(s3):
    classes = gr.conjugacy_classes(s3)
    assert sorted(len(c) for c in classes) == [1, 2, 3]
    assert classes[0] == [0]
    oracle = oracle_classes(s3)
    got = [frozenset(s3.elements[i] for i in c) for c in classes]
    assert set(got) == {frozenset(c) for c in oracle}


def test_g168_class_sizes(g168):
    classes = gr.conjugacy_classes(g168)
    assert sorted(len(c) for c in classes) == [1, 21, 24, 24, 42, 56]
    oracle = oracle_classes(g168)
    assert sorted(len(c) for c in oracle) == [1, 21, 24, 24, 42, 56]


def test_trivial_group_classes():
    G = gr.parse_group(["()"], 1)
    assert gr.conjugacy_classes(G) == [[0]]


def test_cosets_s3(s3):
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    left = gr.cosets(s3, H, "left")
    assert len(left) == 3 and all(len(b) == 2 for b in left)
    assert sorted(x for b in left for x in b) == list(range(6))
    right = gr.cosets(s3, H, "right")
    assert len(right) == 3
    whole = gr.cosets(s3, gr.Subgroup(s3, range(6)), "left")
    assert len(whole) == 1


def test_cosets_g168_point_stab(g168, point_stab):
    assert len(gr.cosets(g168, point_stab, "left")) == 7


def test_double_cosets_s3(s3):
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    blocks = gr.double_cosets(s3, H, H)
    assert sorted(len(b) for b in blocks) == [2, 4]
    # independent enumeration on raw tuples
    h = {s3.elements[i] for i in H.members}
    raw = set()
    for a in s3.elements:
        raw.add(
            frozenset(oracle_compose(oracle_compose(b2, a), b1) for b2 in h for b1 in h)
        )
    got = {frozenset(s3.elements[i] for i in b) for b in blocks}
    assert got == raw


def test_double_cosets_trivial(s3):
    E = gr.Subgroup(s3, [0])
    assert len(gr.double_cosets(s3, E, E)) == 6
    whole = gr.Subgroup(s3, range(6))
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    assert len(gr.double_cosets(s3, whole, H)) == 1


# ---------------------------------------------------------------------------
# Gassmann certification and permutation characters
# ---------------------------------------------------------------------------


def test_gassmann_conjugate_pair(s3):
    H1 = gr.Subgroup.from_generators(s3, ["(0 1)"])
    H2 = gr.Subgroup.from_generators(s3, ["(0 2)"])
    cert = gr.is_gassmann(s3, H1, H2)
    assert cert.verdict
    assert gr.subgroups_conjugate(s3, H1, H2)


def test_gassmann_order_mismatch(s3):
    H1 = gr.Subgroup.from_generators(s3, ["(0 1)"])
    H2 = gr.Subgroup.from_generators(s3, ["(0 1 2)"])
    cert = gr.is_gassmann(s3, H1, H2)
    assert not cert.verdict and "order mismatch" in cert.note


def test_gassmann_g168(g168, point_stab, line_stab):
    assert point_stab.order == 24 and line_stab.order == 24
    cert = gr.is_gassmann(g168, point_stab, line_stab)
    assert cert.verdict
    assert cert.counts_h1 == cert.counts_h2
    assert sum(cert.counts_h1) == 24
    assert not gr.subgroups_conjugate(g168, point_stab, line_stab)
    # oracle: recount class intersections from raw tuples
    oracle = oracle_classes(g168)
    h1 = {g168.elements[i] for i in point_stab.members}
    h2 = {g168.elements[i] for i in line_stab.members}
    for cls in oracle:
        assert len(cls & h1) == len(cls & h2)


def test_permutation_character_s3(s3):
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    chi = gr.permutation_character(s3, H)
    # classes ordered identity, transpositions, 3-cycles by smallest member
    classes = gr.conjugacy_classes(s3)
    sizes = [len(c) for c in classes]
    by_size = {s: v for s, v in zip(sizes, chi)}
    assert by_size[1] == 3 and by_size[3] == 1 and by_size[2] == 0


def test_permutation_character_whole_group(s3):
    whole = gr.Subgroup(s3, range(6))
    assert (gr.permutation_character(s3, whole) == 1).all()


def test_permutation_character_gassmann_match(g168, point_stab, line_stab):
    c1 = gr.permutation_character(g168, point_stab)
    c2 = gr.permutation_character(g168, line_stab)
    assert (c1 == c2).all()
    assert c1[0] == 7
    # independent oracle: count fixed cosets from scratch for one class rep
    classes = gr.conjugacy_classes(g168)
    blocks = gr.cosets(g168, point_stab, "left")
    for k, cls in enumerate(classes):
        c = cls[0]
        fixed = 0
        for b in blocks:
            img = {g168.mul(c, x) for x in b}
            fixed += img == set(b)
        assert fixed == c1[k]


def test_character_column_sum_identity(s3, g168, point_stab):
    for G, H in [
        (s3, gr.Subgroup.from_generators(s3, ["(0 1)"])),
        (g168, point_stab),
    ]:
        chi = gr.permutation_character(G, H)
        sizes = np.array([len(c) for c in gr.conjugacy_classes(G)])
        # Burnside: sum over g of fixed cosets = |G| (transitive action)
        assert int((chi * sizes).sum()) == G.order


def test_gassmann_iff_equal_characters(s3, g168, point_stab, line_stab):
    fixtures = [
        (s3, gr.Subgroup.from_generators(s3, ["(0 1)"]), gr.Subgroup.from_generators(s3, ["(0 1 2)"])),
        (s3, gr.Subgroup.from_generators(s3, ["(0 1)"]), gr.Subgroup.from_generators(s3, ["(0 2)"])),
        (g168, point_stab, line_stab),
    ]
    for G, H1, H2 in fixtures:
        cert = gr.is_gassmann(G, H1, H2)
        chars_equal = (
            gr.permutation_character(G, H1).tolist()
            == gr.permutation_character(G, H2).tolist()
        )
        assert cert.verdict == chars_equal


@given(st.integers(0, 5))
@settings(max_examples=6, deadline=None)
def test_gassmann_reflexive_symmetric(seed):
    G = gr.parse_group(["(0 1 2 3)", "(0 1)"], 4)  # S4
    rng = np.random.default_rng(seed)
    g = int(rng.integers(G.order))
    h = int(rng.integers(G.order))
    H1 = gr.Subgroup.from_generators(G, [g])
    H2 = gr.Subgroup.from_generators(G, [h])
    assert gr.is_gassmann(G, H1, H1).verdict
    assert gr.is_gassmann(G, H1, H2).verdict == gr.is_gassmann(G, H2, H1).verdict


# ---------------------------------------------------------------------------
# intertwiner
# ---------------------------------------------------------------------------


def test_identity_kernel(s3):
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    K = gr.identity_kernel(s3, H)
    assert np.allclose(K.matrix, np.eye(3))
    rep = gr.verify_intertwiner(K)
    assert rep.unitarity_residual == 0
    assert rep.passes


def test_intertwiner_same_subgroup(s3):
    H = gr.Subgroup.from_generators(s3, ["(0 1)"])
    K = gr.intertwiner_solve(s3, H, H, seed=0)
    assert gr.verify_intertwiner(K).passes


def test_intertwiner_g168(g168, point_stab, line_stab):
    K = gr.intertwiner_solve(g168, point_stab, line_stab, seed=0)
    assert K.matrix.shape == (7, 7)
    rep = gr.verify_intertwiner(K)
    assert rep.unitarity_residual <= 1e-10
    assert rep.equivariance_residual <= 1e-10
    assert rep.constancy_residual <= 1e-10


def test_intertwiner_seed_determinism(g168, point_stab, line_stab):
    a = gr.intertwiner_solve(g168, point_stab, line_stab, seed=7)
    b = gr.intertwiner_solve(g168, point_stab, line_stab, seed=7)
    assert np.array_equal(a.matrix, b.matrix)


def test_intertwiner_rejects_non_gassmann(s3):
    H1 = gr.Subgroup.from_generators(s3, ["(0 1)"])
    H2 = gr.Subgroup.from_generators(s3, ["(0 1 2)"])
    with pytest.raises(gr.GroupError, match="Gassmann"):
        gr.intertwiner_solve(s3, H1, H2)


def test_perturbed_kernel_fails(g168, point_stab, line_stab):
    K = gr.intertwiner_solve(g168, point_stab, line_stab, seed=0)
    values = {
        b[0]: K.values[i]
        for i, b in enumerate(gr.double_cosets(g168, line_stab, point_stab))
    }
    some_rep = next(iter(values))
    values[some_rep] += 1e-3
    K2 = gr.kernel_from_values(g168, point_stab, line_stab, values)
    rep = gr.verify_intertwiner(K2)
    assert rep.unitarity_residual >= 1e-4


def test_translation_kernel_is_permutation(s3):
    """For conjugate subgroups the translation kernel is an exact 0/1 unitary."""
    H1 = gr.Subgroup.from_generators(s3, ["(0 1)"])
    H2 = gr.Subgroup.from_generators(s3, ["(0 2)"])
    g = s3.index[gr.parse_cycles("(0 2 1)", 3)]  # c with c H1 c^-1 = H2
    assert gr.subgroups_conjugate(s3, H1, H2)
    # place mass 1 on the double coset of the conjugating element
    blocks, dc_of, _ = gr._double_coset_labels(s3, H2, H1)
    values = {b[0]: (1.0 if dc_of[b[0]] == dc_of[g] else 0.0) for b in blocks}
    K = gr.kernel_from_values(s3, H1, H2, values)
    mat = K.matrix
    assert set(np.round(mat.real.ravel(), 12)) <= {0.0, 1.0}
    assert gr.verify_intertwiner(K).passes


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


def test_search_s3_empty(s3):
    assert gr.gassmann_search(s3, 6) == []


def test_search_abelian_empty():
    C8 = gr.parse_group(["(0 1 2 3 4 5 6 7)"], 8)
    assert gr.gassmann_search(C8, 8) == []


def test_search_g168_finds_pair(g168):
    pairs = gr.gassmann_search(g168, 7)
    assert len(pairs) >= 1
    H1, H2 = pairs[0]
    assert H1.order == H2.order == 24
    assert not gr.subgroups_conjugate(g168, H1, H2)


def test_group_file_roundtrip(tmp_path):
    path = tmp_path / "g.grp"
    path.write_text("degree: 3\n(0 1 2)\n(0 1)\n")
    G = gr.parse_group_file(path)
    assert G.order == 6
    with pytest.raises(gr.GroupError):
        gr.parse_group_file(tmp_path / "bad.grp") if (tmp_path / "bad.grp").write_text("(0 1)\n") else None
