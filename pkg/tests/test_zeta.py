"""Fixed-component weights against independent lattice/volume oracles."""

import math

import numpy as np
import pytest
import scipy.integrate

from sunada_zeta import geoflow as gf
from sunada_zeta import zeta as zt


def brute_lattice_series(basis, l_max):
    """Re-derive the torus series by direct vector enumeration."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    n = basis.shape[0]
    covol = abs(np.linalg.det(basis))
    bound = int(math.ceil(l_max * np.linalg.norm(np.linalg.inv(basis), 2))) + 1
    by_len = {}
    exact = {}
    rng = range(-bound, bound + 1)
    import itertools

    for k in itertools.product(rng, repeat=n):
        if not any(k):
            continue
        L = float(np.linalg.norm(basis @ np.array(k)))
        if L <= l_max + 1e-12:
            key = round(L, 9)
            by_len[key] = by_len.get(key, 0) + 1
            exact.setdefault(key, L)
    return sorted(
        (exact[key], c * covol / exact[key] ** (n - 1)) for key, c in by_len.items()
    )


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def test_classify_equator_isolated(revolution, inner_equator):
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, [inner_equator])
    assert len(comps) == 1
    c = comps[0]
    assert c.k == 1 and c.clean and c.kind == "isolated"


def test_classify_torus_components(torus_z2):
    orbits = [o for o in gf.find_closed_orbits(torus_z2, 1.0)]
    comps = zt.classify_fixed_set(torus_z2, 1.0, orbits)
    assert len(comps) == 4
    assert all(c.k == 2 and c.clean and c.kind == "torus_family" for c in comps)


def test_classify_sphere_full(unit_sphere):
    orbits = gf.find_closed_orbits(unit_sphere, 2 * math.pi + 0.1)
    comps = zt.classify_fixed_set(unit_sphere, 2 * math.pi, orbits)
    assert len(comps) == 1
    c = comps[0]
    assert c.k == 3 and c.clean and c.kind == "full"


def test_classify_rejects_wrong_period(torus_z2):
    orbits = gf.find_closed_orbits(torus_z2, 1.0)
    with pytest.raises(ValueError):
        zt.classify_fixed_set(torus_z2, 2.0, orbits)


# ---------------------------------------------------------------------------
# transverse determinant
# ---------------------------------------------------------------------------


def test_tdet_torus_is_tau_power(torus_z2):
    for tau in (1.0, math.sqrt(2.0)):
        orbits = [o for o in gf.find_closed_orbits(torus_z2, tau + 0.01)
                  if abs(o.length - tau) < 1e-9]
        comps = zt.classify_fixed_set(torus_z2, tau, orbits)
        for c in comps:
            assert zt.transverse_determinant(c) == pytest.approx(tau, rel=1e-9)


def test_tdet_torus_z3():
    M = gf.FlatTorus(np.eye(3))
    orbits = [o for o in gf.find_closed_orbits(M, 1.0)]
    comps = zt.classify_fixed_set(M, 1.0, orbits)
    assert all(c.k == 3 for c in comps)
    for c in comps:
        # tau^{n-1} with tau = 1 and n = 3
        assert zt.transverse_determinant(c) == pytest.approx(1.0, rel=1e-9)


def test_tdet_isolated_matches_det(inner_equator, revolution):
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, [inner_equator])
    tdet = zt.transverse_determinant(comps[0])
    assert tdet == pytest.approx(abs(inner_equator.det_i_minus_p), rel=1e-6)


def test_tdet_sphere_empty_product(unit_sphere):
    orbits = gf.find_closed_orbits(unit_sphere, 2 * math.pi + 0.1)
    comps = zt.classify_fixed_set(unit_sphere, 2 * math.pi, orbits)
    assert zt.transverse_determinant(comps[0]) == 1.0


def test_tdet_orthogonal_invariance(inner_equator):
    """Singular values are invariant under an orthogonal transversal change."""
    mono = inner_equator.monodromy
    ImM = np.eye(3) - mono
    base = np.linalg.svd(ImM, compute_uv=False)
    rng = np.random.default_rng(5)
    for _ in range(10):
        Q2, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        Q = np.eye(3)
        Q[1:, 1:] = Q2
        rot = np.linalg.svd(Q.T @ ImM @ Q, compute_uv=False)
        assert np.abs(rot - base).max() <= 1e-6


# ---------------------------------------------------------------------------
# canonical volume
# ---------------------------------------------------------------------------


def test_volume_isolated_is_prime_period(revolution, inner_equator):
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, [inner_equator])
    assert zt.canonical_volume(comps[0]) == pytest.approx(2 * math.pi)


def test_volume_torus_covolume():
    M = gf.FlatTorus([[2.0, 0.0], [0.0, 1.0]])
    orbits = [o for o in gf.find_closed_orbits(M, 1.0)]
    comps = zt.classify_fixed_set(M, 1.0, orbits)
    for c in comps:
        assert zt.canonical_volume(c) == pytest.approx(2.0)


def test_volume_sphere_full(unit_sphere):
    orbits = gf.find_closed_orbits(unit_sphere, 2 * math.pi + 0.1)
    comps = zt.classify_fixed_set(unit_sphere, 2 * math.pi, orbits)
    assert zt.canonical_volume(comps[0]) == pytest.approx(8 * math.pi**2)


def test_volume_meridian_family_monte_carlo(revolution):
    orbits = gf.find_closed_orbits(revolution, 7.0, grid_density=0)
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, orbits)
    fam = [c for c in comps if c.kind == "family"]
    assert len(fam) == 2  # both orientations
    oracle, _ = scipy.integrate.quad(
        lambda u: math.sqrt((2 + math.cos(u)) ** 2 + math.sin(u) ** 2),
        0.0,
        2 * math.pi,
    )
    oracle *= 2 * math.pi
    vol = zt.canonical_volume(fam[0])
    assert vol == pytest.approx(oracle, rel=0.03)
    assert fam[0]._vol_stderr is not None and fam[0]._vol_stderr / vol <= 0.01


def test_weight_refused_when_not_clean(revolution, inner_equator):
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, [inner_equator])
    comps[0].clean = False
    with pytest.raises(zt.CleanlinessError):
        zt.transverse_determinant(comps[0])
    with pytest.raises(zt.CleanlinessError):
        zt.canonical_volume(comps[0])


# ---------------------------------------------------------------------------
# weights and L-series
# ---------------------------------------------------------------------------


def test_weights_match_oracle_z2(torus_z2):
    series = zt.flat_trace_weights(torus_z2, 3.0)
    oracle = zt.oracle_flat_torus(np.eye(2), 3.0)
    assert len(series.entries) == len(oracle.entries)
    for (t1, w1), (t2, w2) in zip(series.entries, oracle.entries):
        assert t1 == pytest.approx(t2, abs=1e-9)
        assert w1 == pytest.approx(w2, rel=1e-6)


def test_oracle_values_frozen():
    oracle = zt.oracle_flat_torus(np.eye(2), 1.5)
    assert oracle.entries[0] == (1.0, pytest.approx(4.0))
    assert oracle.entries[1][0] == pytest.approx(math.sqrt(2.0))
    assert oracle.entries[1][1] == pytest.approx(2.0 * math.sqrt(2.0))


def test_oracle_z3_tau_1():
    oracle = zt.oracle_flat_torus(np.eye(3), 1.0)
    assert oracle.entries[0] == (1.0, pytest.approx(6.0))


def test_oracle_matches_brute_enumeration():
    for basis in (np.eye(2), [[2.0, 0.5], [0.0, 1.0]]):
        oracle = zt.oracle_flat_torus(basis, 3.0)
        brute = brute_lattice_series(basis, 3.0)
        assert len(oracle.entries) == len(brute)
        for (t1, w1), (t2, w2) in zip(oracle.entries, brute):
            assert t1 == pytest.approx(t2, abs=1e-9)
            assert w1 == pytest.approx(w2, rel=1e-12)


def test_lefschetz_reduction(revolution, inner_equator):
    comps = zt.classify_fixed_set(revolution, 2 * math.pi, [inner_equator])
    w = comps[0].weight
    lefschetz = inner_equator.prime_length / abs(inner_equator.det_i_minus_p)
    assert w == pytest.approx(lefschetz, rel=1e-6)
    assert w == pytest.approx(2 * math.pi / (2 * math.cosh(2 * math.pi) - 2), rel=1e-6)


def test_sphere_iterates_same_weight(unit_sphere):
    series = zt.flat_trace_weights(unit_sphere, 4 * math.pi + 0.1)
    assert len(series.entries) == 2
    for _, w in series.entries:
        assert w == pytest.approx(8 * math.pi**2, rel=1e-4)


def test_lseries_validation():
    with pytest.raises(ValueError):
        zt.LSeries([(1.0, 1.0), (1.0, 2.0)], ["a", "b"], 2.0)
    with pytest.raises(ValueError):
        zt.LSeries([(1.0, -1.0)], ["a"], 2.0)


def test_l_function_single_entry():
    series = zt.LSeries([(1.0, 4.0)], ["oracle"], 1.0)
    ev = zt.l_function_eval(series, 1.0)
    assert ev.value == pytest.approx(4.0 * math.exp(-1.0), rel=1e-14)


def test_l_function_hand_sum(torus_z2):
    series = zt.flat_trace_weights(torus_z2, 3.0)
    ev = zt.l_function_eval(series, 2.0)
    hand = sum(w * math.exp(-2.0 * t) for t, w in series.entries)
    assert abs(ev.value - hand) <= 1e-12


def test_l_function_s0_warning():
    series = zt.oracle_flat_torus(np.eye(2), 2.0)
    ev = zt.l_function_eval(series, 0.0)
    assert ev.warning is not None and ev.tail_bound is None
    assert ev.value.real == pytest.approx(sum(w for _, w in series.entries))


def test_l_function_tail_bound_validates():
    short = zt.oracle_flat_torus(np.eye(2), 3.0)
    long = zt.oracle_flat_torus(np.eye(2), 5.0)
    for s in (1.0, 2.0, 3.0):
        ev_short = zt.l_function_eval(short, s)
        ev_long = zt.l_function_eval(long, s)
        increment = (ev_long.value - ev_short.value).real
        assert 0 <= increment <= ev_short.tail_bound


def test_partial_sums_monotone_in_lmax(torus_z2):
    values = []
    for lmax in (1.0, 1.5, 2.0, 2.5, 3.0):
        series = zt.oracle_flat_torus(np.eye(2), lmax)
        values.append(zt.l_function_eval(series, 1.5).value.real)
    assert all(b >= a - 1e-15 for a, b in zip(values[:-1], values[1:]))
