"""Flat-trace weights on clean fixed-point components and L-function sums.

The weight attached to a period tau is the sum over fixed components of
canonical volume over transverse determinant.  The transverse determinant is
the Gelfand-Leray Jacobian of the defining functions, computed as the product
of the above-threshold singular values of (I - monodromy) in the Sasaki
frame; for an isolated nondegenerate orbit it reduces to |det(I - P)| and the
weight to the Lefschetz term (prime period over |det(I - P)|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .geoflow import (
    ClosedOrbit,
    FlatTorus,
    Manifold,
    PhasePoint,
    RoundSphere,
    SurfaceOfRevolution,
    find_closed_orbits,
    integrate_flow,
    sasaki_inner,
)
from ._util import parallel_map

__all__ = [
    "CleanlinessError",
    "FixedComponent",
    "LSeries",
    "LSeriesEval",
    "classify_fixed_set",
    "transverse_determinant",
    "canonical_volume",
    "flat_trace_weights",
    "l_function_eval",
    "oracle_flat_torus",
]

SVD_THRESHOLD = 1e-6
GAP_FACTOR = 100.0
CONTINUATION_STEP = 1e-2
LENGTH_COALESCE = 1e-8


class CleanlinessError(RuntimeError):
    """A fixed component failed the clean (Bott-Morse) diagnosis."""


@dataclass
class FixedComponent:
    """One clean component of the period-tau fixed set."""

    tau: float
    k: int
    orbits: list[ClosedOrbit]
    clean: bool
    kind: str  # 'isolated' | 'torus_family' | 'full' | 'family'
    note: str = ""
    _tdet: float | None = field(default=None, repr=False)
    _vol: float | None = field(default=None, repr=False)
    _vol_stderr: float | None = field(default=None, repr=False)

    @property
    def weight(self) -> float:
        return canonical_volume(self) / transverse_determinant(self)


def _kernel_data(orbit: ClosedOrbit, svd_threshold: float, gap_factor: float):
    """Rank split of I - monodromy with the mandated spectral-gap check."""
    mono = orbit.monodromy
    dim = mono.shape[0]
    ImM = np.eye(dim) - mono
    u, s, vt = np.linalg.svd(ImM)
    keep = s > svd_threshold
    kept = s[keep]
    dropped = s[~keep]
    if kept.size and dropped.size and kept.min() < gap_factor * dropped.max():
        raise CleanlinessError(
            f"ill-conditioned rank split: kept {kept.min():.3e} vs dropped {dropped.max():.3e}"
        )
    k = dim - int(keep.sum())
    kernel_dirs = vt[~keep].T  # frame coordinates, (dim, k)
    return k, kernel_dirs, kept


def _continuation_probe(
    orbit: ClosedOrbit,
    direction_frame: np.ndarray,
    step: float,
    orbit_samples: np.ndarray,
    closure_tol: float = 1e-9,
) -> bool:
    """Does a kernel direction integrate to a genuinely nearby fixed point?"""
    M = orbit.manifold
    n = M.n
    f = orbit.jet.frame_start
    w_chart = f @ direction_frame
    chart_step = step * np.linalg.norm(w_chart)
    if chart_step < 1e-12:
        return False
    z0 = orbit.start.as_array()
    z1 = z0 + step * w_chart
    # keep the probe on the unit cosphere
    e = M.energy(z1[:n], z1[n:])
    z1[n:] /= math.sqrt(e)

    def residual(z):
        p = PhasePoint.of(z[:n], z[n:])
        try:
            path = integrate_flow(M, p, orbit.length, rtol=1e-10, atol=1e-10)
        except Exception:
            return np.full(2 * n, 1e3)
        return M.phase_separation(path.endpoint.as_array(), z)

    sol = least_squares(residual, z1, xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=40)
    if np.linalg.norm(sol.fun) > closure_tol:
        return False
    # it must not have collapsed back onto the original orbit
    dist = min(
        np.linalg.norm(M.phase_separation(sol.x, z)) for z in orbit_samples
    )
    return dist > 0.4 * chart_step


def _component_kind(M: Manifold, k: int, orbit: ClosedOrbit) -> str:
    dim = 2 * M.n - 1
    if k == dim:
        return "full"
    if k == 1:
        return "isolated"
    if isinstance(M, FlatTorus) and k == M.n:
        return "torus_family"
    return "family"


def classify_fixed_set(
    M: Manifold,
    tau: float,
    orbits: list[ClosedOrbit],
    svd_threshold: float = SVD_THRESHOLD,
    gap_factor: float = GAP_FACTOR,
    continuation_step: float = CONTINUATION_STEP,
    merge_radius: float = 0.25,
) -> list[FixedComponent]:
    """Cluster period-tau orbits into components and diagnose cleanness.

    The algebraic dimension k comes from the SVD rank of I - monodromy; the
    geometric dimension is re-derived by continuing each kernel direction to
    a nearby closed orbit.  A mismatch marks the component non-clean.
    """
    if not orbits:
        return []
    for orb in orbits:
        if abs(orb.length - tau) > max(LENGTH_COALESCE, 1e-9 * tau):
            raise ValueError("orbit length does not match the requested period")
    dim = 2 * M.n - 1
    analyzed = []
    for orb in orbits:
        k_alg, kernel_dirs, _ = _kernel_data(orb, svd_threshold, gap_factor)
        probe_samples = integrate_flow(
            M, orb.start, orb.length, rtol=1e-9, atol=1e-9, n_samples=32
        ).states
        k_geo = 0
        for j in range(k_alg):
            d = kernel_dirs[:, j]
            if abs(d[0]) > 1 - 1e-8:
                k_geo += 1  # flow direction always continues along the orbit
                continue
            # remove the flow component, then probe transversally
            d_perp = d.copy()
            d_perp[0] = 0.0
            nrm = np.linalg.norm(d_perp)
            if nrm < 1e-8:
                k_geo += 1
                continue
            if _continuation_probe(orb, d_perp / nrm, continuation_step, probe_samples):
                k_geo += 1
        # the flow direction itself is always in the kernel of I - monodromy
        clean = k_geo == k_alg
        analyzed.append((orb, k_alg, clean))
    # cluster: full-dimensional kernels all belong to one component
    comps: list[FixedComponent] = []
    fulls = [(o, k, c) for (o, k, c) in analyzed if k == dim]
    rest = [(o, k, c) for (o, k, c) in analyzed if k != dim]
    if fulls:
        comps.append(
            FixedComponent(
                tau, dim, [o for o, _, _ in fulls], all(c for _, _, c in fulls),
                _component_kind(M, dim, fulls[0][0]),
            )
        )
    used = [False] * len(rest)
    samples = []
    for o, _, _ in rest:
        path = integrate_flow(M, o.start, o.length, rtol=1e-9, atol=1e-9, n_samples=24)
        samples.append(path.states)
    for i, (oi, ki, ci) in enumerate(rest):
        if used[i]:
            continue
        members = [(oi, ki, ci)]
        used[i] = True
        for j in range(i + 1, len(rest)):
            if used[j]:
                continue
            oj, kj, cj = rest[j]
            if kj != ki:
                continue
            dmin = min(
                np.linalg.norm(M.phase_separation(za, zb))
                for za in samples[i]
                for zb in samples[j]
            )
            if dmin <= merge_radius:
                members.append((oj, kj, cj))
                used[j] = True
        comps.append(
            FixedComponent(
                tau, ki, [o for o, _, _ in members], all(c for _, _, c in members),
                _component_kind(M, ki, members[0][0]),
            )
        )
    comps.sort(key=lambda c: (c.k, c.orbits[0].start.x, c.orbits[0].start.xi))
    return comps


def transverse_determinant(
    component: FixedComponent,
    svd_threshold: float = SVD_THRESHOLD,
    consistency_tol: float = 1e-6,
) -> float:
    """Product of the above-threshold singular values of I - monodromy.

    This is the Gelfand-Leray Jacobian of the fixed-set defining functions in
    the Sasaki-orthonormal frame; the empty product (fully degenerate
    component) is 1 by convention.
    """
    if not component.clean:
        raise CleanlinessError("weight computation refused for a non-clean component")
    if component._tdet is not None:
        return component._tdet
    vals = []
    for orb in component.orbits:
        mono = orb.monodromy
        s = np.linalg.svd(np.eye(mono.shape[0]) - mono, compute_uv=False)
        kept = s[s > svd_threshold]
        vals.append(float(np.prod(kept)) if kept.size else 1.0)
    spread = (max(vals) - min(vals)) / max(1.0, max(vals))
    if spread > consistency_tol:
        raise CleanlinessError(
            f"transverse determinant varies across the component: spread {spread:.3e}"
        )
    component._tdet = float(np.mean(vals))
    return component._tdet


def _rotation_family_volume(
    component: FixedComponent, n_samples: int, rel_target: float, rng
) -> tuple[float, float]:
    """Monte Carlo Sasaki volume of a rotation-invariant orbit family.

    Parametrized by (rotation angle, arc position); the integrand is the
    Gram determinant of the Killing-field lift against the flow direction.
    """
    orbit = component.orbits[0]
    M = orbit.manifold
    n = M.n
    path = integrate_flow(
        M, orbit.start, orbit.prime_length, rtol=1e-10, atol=1e-10,
        n_samples=max(256, n_samples),
    )
    states = path.states
    total = 2 * math.pi * orbit.prime_length

    def gram_sqrt(z):
        x, xi = z[:n], z[n:]
        kill = np.zeros(2 * n)
        kill[1] = 1.0  # rotational Killing field d/dtheta, vertical part from Gamma
        g_kk = sasaki_inner(M, x, xi, kill, kill)
        ginv = M.metric_inv(x)
        flow = np.concatenate([ginv @ xi, np.zeros(n)])
        # flow vector has zero connection part along a geodesic
        g_kf = sasaki_inner(M, x, xi, kill, flow)
        g_ff = sasaki_inner(M, x, xi, flow, flow)
        det = g_kk * g_ff - g_kf**2
        return math.sqrt(max(det, 0.0))

    idx = rng.integers(0, len(states), size=n_samples)
    vals = np.array([gram_sqrt(states[i]) for i in idx])
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    vol = mean * total
    vol_err = stderr * total
    if vol > 0 and vol_err / vol > rel_target:
        raise CleanlinessError(
            f"Monte Carlo variance target unreachable: stderr {vol_err:.3e} on {vol:.3e}"
        )
    return vol, vol_err


def canonical_volume(
    component: FixedComponent,
    mc_samples: int = 20000,
    mc_rel_target: float = 0.01,
    seed: int = 0,
) -> float:
    """Unnormalized Sasaki volume of the component.

    Closed forms: isolated orbit -> prime period; flat-torus translation
    family -> lattice covolume; fully degenerate sphere -> base area times
    fiber length.  Rotation-invariant families fall back to Monte Carlo with
    a 1% standard-error target.
    """
    if not component.clean:
        raise CleanlinessError("weight computation refused for a non-clean component")
    if component._vol is not None:
        return component._vol
    M = component.orbits[0].manifold
    if component.kind == "isolated":
        vol = float(component.orbits[0].prime_length)
    elif component.kind == "torus_family":
        vol = float(M.covolume)
    elif component.kind == "full":
        if isinstance(M, RoundSphere):
            vol = float(M.liouville_volume())
        else:
            raise CleanlinessError(
                f"no closed-form Sasaki volume for a full component of {M.kind}"
            )
    elif component.kind == "family" and isinstance(M, SurfaceOfRevolution):
        rng = np.random.default_rng(seed)
        vol, err = _rotation_family_volume(component, mc_samples, mc_rel_target, rng)
        component._vol_stderr = err
    else:
        raise CleanlinessError(f"no volume rule for component kind {component.kind!r}")
    component._vol = vol
    return vol


@dataclass
class LSeries:
    """Sorted (length, weight) pairs with per-entry provenance."""

    entries: list[tuple[float, float]]
    provenance: list[str]
    cutoff: float

    def __post_init__(self):
        taus = [t for t, _ in self.entries]
        if any(b - a <= 0 for a, b in zip(taus[:-1], taus[1:])):
            raise ValueError("lengths must be strictly increasing")
        if any(not np.isfinite(w) or w <= 0 for _, w in self.entries):
            raise ValueError("weights must be finite and positive")
        if len(self.provenance) != len(self.entries):
            raise ValueError("provenance must match entries")

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.entries])

    def lengths(self) -> np.ndarray:
        return np.array([t for t, _ in self.entries])

    def to_csv_rows(self) -> list[dict]:
        return [
            {"tau": t, "weight": w, "provenance": p}
            for (t, w), p in zip(self.entries, self.provenance)
        ]


def flat_trace_weights(
    M: Manifold,
    l_max: float,
    grid_density: int = 4,
    coalesce: float = LENGTH_COALESCE,
    **classify_kwargs,
) -> LSeries:
    """Assemble the L-series entries (tau, sum of component weights) up to l_max."""
    orbits = find_closed_orbits(M, l_max, grid_density=grid_density)
    groups: list[tuple[float, list[ClosedOrbit]]] = []
    for orb in sorted(orbits, key=lambda o: o.length):
        if groups and abs(orb.length - groups[-1][0]) <= max(coalesce, 1e-9 * orb.length):
            groups[-1][1].append(orb)
        else:
            groups.append((orb.length, [orb]))

    def one(group):
        tau, orbs = group
        comps = classify_fixed_set(M, tau, orbs, **classify_kwargs)
        bad = [c for c in comps if not c.clean]
        if bad:
            raise CleanlinessError(f"non-clean component at tau = {tau}")
        return tau, sum(c.weight for c in comps)

    results = parallel_map(one, groups)
    entries = [(float(t), float(w)) for t, w in results]
    return LSeries(entries, ["computed"] * len(entries), float(l_max))


@dataclass
class LSeriesEval:
    s: complex
    value: complex
    tail_bound: float | None
    warning: str | None

    def to_json_dict(self) -> dict:
        return {
            "s_re": self.s.real,
            "s_im": self.s.imag,
            "partial_sum_re": self.value.real,
            "partial_sum_im": self.value.imag,
            "tail_bound": self.tail_bound,
        }


def l_function_eval(series: LSeries, s: complex) -> LSeriesEval:
    """Partial sum of weights * exp(-s tau), with a geometric tail bound.

    The bound w_max exp(-Re(s) cutoff) / (1 - exp(-Re(s) gap)) uses the
    smallest observed length gap and is only reported for Re(s) > 0.
    """
    if not series.entries:
        raise ValueError("series is empty")
    s = complex(s)
    taus = series.lengths()
    ws = series.weights()
    value = complex(np.sum(ws * np.exp(-s * taus)))
    if s.real <= 0:
        return LSeriesEval(s, value, None, "Re(s) <= 0: tail bound omitted")
    gaps = np.diff(taus)
    gap = float(gaps.min()) if gaps.size else float(taus[-1])
    w_max = float(ws.max())
    bound = w_max * math.exp(-s.real * series.cutoff) / (1.0 - math.exp(-s.real * gap))
    return LSeriesEval(s, value, bound, None)


def oracle_flat_torus(basis, l_max: float) -> LSeries:
    """Independent lattice-enumeration oracle for flat-torus weights.

    Weight at each distinct vector length tau is
    count * covolume / tau^{n-1}.
    """
    M = FlatTorus(basis)
    if M.n not in (2, 3):
        raise ValueError("oracle supports n = 2 or 3")
    lengths: list[float] = []
    counts: list[int] = []
    for v in M.lattice_vectors(l_max):
        L = float(np.linalg.norm(v))
        if lengths and abs(L - lengths[-1]) <= max(LENGTH_COALESCE, 1e-12 * L):
            counts[-1] += 1
        else:
            lengths.append(L)
            counts.append(1)
    entries = [
        (L, c * M.covolume / L ** (M.n - 1)) for L, c in zip(lengths, counts)
    ]
    return LSeries(entries, ["oracle"] * len(entries), float(l_max))
