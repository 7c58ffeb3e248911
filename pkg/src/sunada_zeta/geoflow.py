"""Geodesic flow on unit cosphere bundles with variational propagation.

Builtin metrics: flat tori (arbitrary lattice), round spheres, and abstract
surfaces of revolution du^2 + f(u)^2 dtheta^2.  The flow is integrated in
chart coordinates (x, xi) from the Hamiltonian H = (1/2) g^{ab} xi_a xi_b;
tangent data is measured in a Sasaki-orthonormal frame of the energy shell
(flow direction plus horizontal/vertical lifts of base-normal vectors), the
frame in which the monodromy blocks are the classical Jacobi-field pairings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, least_squares

__all__ = [
    "ChartError",
    "IntegrationError",
    "Manifold",
    "FlatTorus",
    "RoundSphere",
    "SurfaceOfRevolution",
    "PhasePoint",
    "FlowPath",
    "FlowJet",
    "ClosedOrbit",
    "DetReport",
    "hamilton_rhs",
    "integrate_flow",
    "integrate_monodromy",
    "sasaki_frame",
    "sasaki_inner",
    "find_closed_orbits",
    "orbit_from_start",
    "poincare_map",
    "det_I_minus_P",
    "manifold_from_spec",
]

DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-11
CLOSURE_TOL = 1e-8
MERGE_TOL = 1e-6
L_MIN = 1e-2


class ChartError(RuntimeError):
    """Point left the chart domain (profile domain exceeded, pole hit)."""


class IntegrationError(RuntimeError):
    """Step underflow or an integrator failure."""


@dataclass(frozen=True)
class PhasePoint:
    """Base coordinates and covector components in the chart."""

    x: tuple[float, ...]
    xi: tuple[float, ...]

    @classmethod
    def of(cls, x, xi) -> "PhasePoint":
        return cls(tuple(float(v) for v in x), tuple(float(v) for v in xi))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.xi])


class Manifold:
    """Chart-coordinate metric data with analytic derivatives."""

    n: int
    kind: str

    def metric(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def metric_inv(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dmetric_inv(self, x: np.ndarray) -> np.ndarray:
        """D[c, a, b] = d g^{ab} / d x^c."""
        raise NotImplementedError

    def d2metric_inv(self, x: np.ndarray) -> np.ndarray:
        """D[c, d, a, b] = d^2 g^{ab} / d x^c d x^d."""
        raise NotImplementedError

    def christoffel(self, x: np.ndarray) -> np.ndarray:
        """Gamma[c, a, b] = Gamma^c_{ab}."""
        raise NotImplementedError

    def check_domain(self, x: np.ndarray) -> None:
        return None

    def wrap_base(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def base_separation(self, x1: np.ndarray, x0: np.ndarray) -> np.ndarray:
        """Minimal chart representative of x1 - x0 (deck identifications reduced)."""
        return np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float)

    def phase_separation(self, z1: np.ndarray, z0: np.ndarray) -> np.ndarray:
        n = self.n
        dx = self.base_separation(z1[:n], z0[:n])
        return np.concatenate([dx, z1[n:] - z0[n:]])

    def energy(self, x: np.ndarray, xi: np.ndarray) -> float:
        return float(xi @ self.metric_inv(x) @ xi)

    def unit_phase(self, x, xi) -> PhasePoint:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return PhasePoint.of(x, xi / math.sqrt(self.energy(x, xi)))

    def spec_dict(self) -> dict:
        raise NotImplementedError


class FlatTorus(Manifold):
    """R^n modulo the lattice spanned by the basis columns; Euclidean metric."""

    kind = "flat_torus"

    def __init__(self, basis):
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.shape[0] != B.shape[1]:
            raise ValueError("lattice basis must be square")
        if abs(np.linalg.det(B)) < 1e-12:
            raise ValueError("lattice basis is singular")
        self.basis = B
        self.basis_inv = np.linalg.inv(B)
        self.n = B.shape[0]
        self.covolume = abs(np.linalg.det(B))

    def metric(self, x):
        return np.eye(self.n)

    def metric_inv(self, x):
        return np.eye(self.n)

    def dmetric_inv(self, x):
        return np.zeros((self.n, self.n, self.n))

    def d2metric_inv(self, x):
        return np.zeros((self.n, self.n, self.n, self.n))

    def christoffel(self, x):
        return np.zeros((self.n, self.n, self.n))

    def base_separation(self, x1, x0):
        d = np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float)
        k = np.rint(self.basis_inv @ d)
        return d - self.basis @ k

    def lattice_vectors(self, l_max: float) -> list[np.ndarray]:
        """All nonzero lattice vectors of length <= l_max."""
        bound = int(math.ceil(l_max * np.linalg.norm(self.basis_inv, 2))) + 1
        out = []
        ranges = [range(-bound, bound + 1)] * self.n
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, self.n)
        for k in grid:
            if not np.any(k):
                continue
            v = self.basis @ k
            if np.linalg.norm(v) <= l_max + 1e-12:
                out.append(v)
        out.sort(key=lambda v: (np.linalg.norm(v), tuple(v)))
        return out

    def spec_dict(self):
        return {"kind": self.kind, "params": {"basis": self.basis.tolist()}}


class RoundSphere(Manifold):
    """Round 2-sphere in polar chart (u, phi); metric r^2(du^2 + sin^2 u dphi^2)."""

    kind = "round_sphere"
    n = 2

    def __init__(self, radius: float = 1.0):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def check_domain(self, x):
        if abs(math.sin(x[0])) < 1e-8:
            raise ChartError("polar chart degenerates at the poles")

    def metric(self, x):
        r2 = self.radius**2
        return np.diag([r2, r2 * math.sin(x[0]) ** 2])

    def metric_inv(self, x):
        r2 = self.radius**2
        return np.diag([1.0 / r2, 1.0 / (r2 * math.sin(x[0]) ** 2)])

    def dmetric_inv(self, x):
        u = x[0]
        s, c = math.sin(u), math.cos(u)
        D = np.zeros((2, 2, 2))
        D[0, 1, 1] = -2.0 * c / (self.radius**2 * s**3)
        return D

    def d2metric_inv(self, x):
        u = x[0]
        s, c = math.sin(u), math.cos(u)
        D = np.zeros((2, 2, 2, 2))
        D[0, 0, 1, 1] = (2.0 / s**2 + 6.0 * c**2 / s**4) / self.radius**2
        return D

    def christoffel(self, x):
        u = x[0]
        s, c = math.sin(u), math.cos(u)
        G = np.zeros((2, 2, 2))
        G[0, 1, 1] = -s * c
        G[1, 0, 1] = G[1, 1, 0] = c / s
        return G

    def base_separation(self, x1, x0):
        d = np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float)
        d[1] = (d[1] + math.pi) % (2 * math.pi) - math.pi
        return d

    def liouville_volume(self) -> float:
        """Unnormalized Sasaki volume of the unit cosphere bundle."""
        return 4.0 * math.pi * self.radius**2 * 2.0 * math.pi

    def spec_dict(self):
        return {"kind": self.kind, "params": {"radius": self.radius}}


class RevolutionProfile:
    """Profile f(u) = c0 + c1 cos(u), strictly positive, 2*pi-periodic."""

    def __init__(self, c0: float, c1: float):
        self.c0, self.c1 = float(c0), float(c1)
        if self.c0 - abs(self.c1) <= 0:
            raise ValueError("profile must be strictly positive")

    def f(self, u):
        return self.c0 + self.c1 * np.cos(u)

    def fp(self, u):
        return -self.c1 * np.sin(u)

    def fpp(self, u):
        return -self.c1 * np.cos(u)

    def params(self):
        return {"c0": self.c0, "c1": self.c1}


class SurfaceOfRevolution(Manifold):
    """Abstract surface du^2 + f(u)^2 dtheta^2 with both coordinates 2*pi-periodic.

    Gaussian curvature along the orbit is K = -f''/f, so equators at critical
    points of f have constant-curvature scalar Jacobi oracles.
    """

    kind = "surface_of_revolution"
    n = 2

    def __init__(self, profile: RevolutionProfile):
        self.profile = profile
        u = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
        if np.min(profile.f(u)) <= 0:
            raise ValueError("profile must be strictly positive")

    def check_domain(self, x):
        if self.profile.f(x[0]) <= 0:
            raise ChartError("profile domain exceeded (f <= 0)")

    def metric(self, x):
        return np.diag([1.0, float(self.profile.f(x[0])) ** 2])

    def metric_inv(self, x):
        return np.diag([1.0, 1.0 / float(self.profile.f(x[0])) ** 2])

    def dmetric_inv(self, x):
        f = float(self.profile.f(x[0]))
        fp = float(self.profile.fp(x[0]))
        D = np.zeros((2, 2, 2))
        D[0, 1, 1] = -2.0 * fp / f**3
        return D

    def d2metric_inv(self, x):
        f = float(self.profile.f(x[0]))
        fp = float(self.profile.fp(x[0]))
        fpp = float(self.profile.fpp(x[0]))
        D = np.zeros((2, 2, 2, 2))
        D[0, 0, 1, 1] = -2.0 * fpp / f**3 + 6.0 * fp**2 / f**4
        return D

    def christoffel(self, x):
        f = float(self.profile.f(x[0]))
        fp = float(self.profile.fp(x[0]))
        G = np.zeros((2, 2, 2))
        G[0, 1, 1] = -f * fp
        G[1, 0, 1] = G[1, 1, 0] = fp / f
        return G

    def base_separation(self, x1, x0):
        d = np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float)
        return (d + math.pi) % (2 * math.pi) - math.pi

    def spec_dict(self):
        return {"kind": self.kind, "params": self.profile.params()}


def manifold_from_spec(spec: dict) -> Manifold:
    """Build a manifold from the JSON spec {kind, params}."""
    kind = spec.get("kind")
    params = spec.get("params", {})
    if kind == "flat_torus":
        return FlatTorus(params["basis"])
    if kind == "round_sphere":
        return RoundSphere(params.get("radius", 1.0))
    if kind == "surface_of_revolution":
        return SurfaceOfRevolution(RevolutionProfile(params["c0"], params["c1"]))
    raise ValueError(f"unknown manifold kind {kind!r}")


# ---------------------------------------------------------------------------
# Hamiltonian flow and variational equations
# ---------------------------------------------------------------------------


def hamilton_rhs(M: Manifold, p: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
    """(xdot, xidot) = (g^{ab} xi_b, -(1/2) d_a g^{bc} xi_b xi_c)."""
    x = np.asarray(p.x, dtype=float)
    xi = np.asarray(p.xi, dtype=float)
    M.check_domain(x)
    ginv = M.metric_inv(x)
    dginv = M.dmetric_inv(x)
    xdot = ginv @ xi
    xidot = -0.5 * np.einsum("abc,b,c->a", dginv, xi, xi)
    return xdot, xidot


def _flow_rhs(M: Manifold, t, z):
    n = M.n
    x, xi = z[:n], z[n:]
    M.check_domain(x)
    ginv = M.metric_inv(x)
    dginv = M.dmetric_inv(x)
    return np.concatenate(
        [ginv @ xi, -0.5 * np.einsum("abc,b,c->a", dginv, xi, xi)]
    )


def _rhs_jacobian(M: Manifold, x, xi) -> np.ndarray:
    n = M.n
    ginv = M.metric_inv(x)
    dginv = M.dmetric_inv(x)
    d2ginv = M.d2metric_inv(x)
    J = np.zeros((2 * n, 2 * n))
    J[:n, :n] = np.einsum("cab,b->ac", dginv, xi)
    J[:n, n:] = ginv
    J[n:, :n] = -0.5 * np.einsum("cabd,b,d->ac", d2ginv, xi, xi)
    J[n:, n:] = -np.einsum("acb,b->ac", dginv, xi)
    return J


def _variational_rhs(M: Manifold, t, zext):
    n = M.n
    z = zext[: 2 * n]
    Phi = zext[2 * n:].reshape(2 * n, 2 * n)
    dz = _flow_rhs(M, t, z)
    J = _rhs_jacobian(M, z[:n], z[n:])
    return np.concatenate([dz, (J @ Phi).ravel()])


@dataclass
class FlowPath:
    manifold: Manifold
    times: np.ndarray
    states: np.ndarray
    endpoint: PhasePoint
    max_energy_drift: float


def integrate_flow(
    M: Manifold,
    p0: PhasePoint,
    T: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    chunk: float = 1.0,
    renormalize: bool = True,
    n_samples: int = 0,
) -> FlowPath:
    """Adaptive RK45 flow with unit-covector renormalization between chunks."""
    if T < 0:
        raise ValueError("T must be >= 0")
    z = np.concatenate([p0.x, p0.xi])
    n = M.n
    if T == 0:
        return FlowPath(M, np.array([0.0]), z[None, :].copy(), p0, 0.0)
    times_out = [0.0]
    states_out = [z.copy()]
    drift = 0.0
    t = 0.0
    sample_times = np.linspace(0.0, T, n_samples) if n_samples else None
    while t < T - 1e-14:
        t_next = min(t + chunk, T)
        t_eval = None
        if sample_times is not None:
            mask = (sample_times > t + 1e-15) & (sample_times <= t_next + 1e-15)
            t_eval = np.concatenate([sample_times[mask], [t_next]])
            t_eval = np.unique(t_eval)
        sol = solve_ivp(
            lambda tt, zz: _flow_rhs(M, tt, zz),
            (t, t_next),
            z,
            method="RK45",
            rtol=rtol,
            atol=atol,
            t_eval=t_eval,
            dense_output=False,
        )
        if not sol.success:
            raise IntegrationError(f"flow integration failed: {sol.message}")
        for tt, zz in zip(sol.t, sol.y.T):
            if tt <= t + 1e-15:
                continue
            times_out.append(tt)
            states_out.append(zz.copy())
        z = sol.y[:, -1].copy()
        t = t_next
        e = M.energy(z[:n], z[n:])
        drift = max(drift, abs(e - 1.0))
        if renormalize:
            z[n:] /= math.sqrt(e)
            states_out[-1] = z.copy()
    endpoint = PhasePoint.of(z[:n], z[n:])
    return FlowPath(M, np.array(times_out), np.array(states_out), endpoint, drift)


@dataclass
class FlowJet:
    """Endpoint plus the differential of the flow in Sasaki-orthonormal frames.

    ``monodromy`` is (2n-1) x (2n-1); column 0 is the flow direction, then the
    horizontal (U-type) and vertical (V-type) lifts of the base-normal frame.
    ``chart_jacobian`` is the raw (2n) x (2n) variational solution.
    """

    manifold: Manifold
    start: PhasePoint
    endpoint: PhasePoint
    time: float
    monodromy: np.ndarray
    chart_jacobian: np.ndarray
    frame_start: np.ndarray
    frame_end: np.ndarray
    flow_residual: float
    symplectic_residual: float
    energy_drift: float


def _normal_basis(M: Manifold, x, xi) -> np.ndarray:
    """g-orthonormal basis of the base-velocity orthocomplement, (n, n-1)."""
    g = M.metric(x)
    v = M.metric_inv(x) @ xi
    basis = []
    for i in range(M.n):
        w = np.zeros(M.n)
        w[i] = 1.0
        w = w - (w @ g @ v) * v / (v @ g @ v)
        for b in basis:
            w = w - (w @ g @ b) * b
        nrm = math.sqrt(max(w @ g @ w, 0.0))
        if nrm > 1e-10:
            basis.append(w / nrm)
        if len(basis) == M.n - 1:
            break
    if len(basis) != M.n - 1:
        raise IntegrationError("degenerate frame (flow direction ill-defined)")
    return np.stack(basis, axis=1)


def sasaki_frame(M: Manifold, x, xi) -> np.ndarray:
    """Columns: flow direction, then H(nu_i), then V(nu_i-flat); shape (2n, 2n-1)."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n = M.n
    g = M.metric(x)
    ginv = M.metric_inv(x)
    gamma = M.christoffel(x)
    v = ginv @ xi
    nrm = math.sqrt(v @ g @ v)
    if nrm < 1e-12:
        raise IntegrationError("degenerate frame (flow direction ill-defined)")
    frame = np.zeros((2 * n, 2 * n - 1))
    # flow vector: horizontal part v, vertical part zero (xi is parallel)
    flow_dxi = np.einsum("bac,c,b->a", gamma, v, xi)
    frame[:n, 0] = v / nrm
    frame[n:, 0] = flow_dxi / nrm
    normals = _normal_basis(M, x, xi)
    for i in range(n - 1):
        nu = normals[:, i]
        # horizontal lift: delta xi_a = Gamma^b_{ac} nu^c xi_b
        frame[:n, 1 + i] = nu
        frame[n:, 1 + i] = np.einsum("bac,c,b->a", gamma, nu, xi)
        # vertical lift of nu-flat
        frame[n:, n + i] = g @ nu
    return frame


def _vertical_part(M: Manifold, x, xi, w) -> np.ndarray:
    """Connection component of a phase tangent: delta xi_a - Gamma^b_{ac} dx^c xi_b."""
    n = M.n
    gamma = M.christoffel(x)
    return w[n:] - np.einsum("bac,c,b->a", gamma, w[:n], xi)


def sasaki_inner(M: Manifold, x, xi, w1, w2) -> float:
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    n = M.n
    g = M.metric(x)
    ginv = M.metric_inv(x)
    h = w1[:n] @ g @ w2[:n]
    v = _vertical_part(M, x, xi, w1) @ ginv @ _vertical_part(M, x, xi, w2)
    return float(h + v)


def integrate_monodromy(
    M: Manifold,
    p0: PhasePoint,
    T: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> FlowJet:
    """Flow plus variational equations; monodromy expressed frame-to-frame.

    No renormalization is applied mid-run so that the chart Jacobian is the
    exact derivative of the integrated map; the recorded energy drift shows
    the price, which is negligible at the default tolerances.
    """
    n = M.n
    z0 = np.concatenate([p0.x, p0.xi])
    if T == 0:
        frame = sasaki_frame(M, z0[:n], z0[n:])
        eye = np.eye(2 * n - 1)
        return FlowJet(M, p0, p0, 0.0, eye, np.eye(2 * n), frame, frame, 0.0, 0.0, 0.0)
    zext0 = np.concatenate([z0, np.eye(2 * n).ravel()])
    sol = solve_ivp(
        lambda tt, zz: _variational_rhs(M, tt, zz),
        (0.0, T),
        zext0,
        method="RK45",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationError(f"variational integration failed: {sol.message}")
    zT = sol.y[: 2 * n, -1]
    Phi = sol.y[2 * n:, -1].reshape(2 * n, 2 * n)
    drift = abs(M.energy(zT[:n], zT[n:]) - 1.0)
    endpoint = PhasePoint.of(zT[:n], zT[n:])
    f_start = sasaki_frame(M, z0[:n], z0[n:])
    f_end = sasaki_frame(M, zT[:n], zT[n:])
    imgs = Phi @ f_start
    mono = np.empty((2 * n - 1, 2 * n - 1))
    for i in range(2 * n - 1):
        for j in range(2 * n - 1):
            mono[i, j] = sasaki_inner(M, zT[:n], zT[n:], f_end[:, i], imgs[:, j])
    e0 = np.zeros(2 * n - 1)
    e0[0] = 1.0
    flow_resid = float(np.abs(mono[:, 0] - e0).max())
    m = n - 1
    P = mono[1:, 1:]
    Jsym = np.block(
        [[np.zeros((m, m)), np.eye(m)], [-np.eye(m), np.zeros((m, m))]]
    )
    symp_resid = float(np.abs(P.T @ Jsym @ P - Jsym).max())
    return FlowJet(
        M, p0, endpoint, float(T), mono, Phi, f_start, f_end,
        flow_resid, symp_resid, float(drift),
    )


# ---------------------------------------------------------------------------
# Closed orbits
# ---------------------------------------------------------------------------


@dataclass
class DetReport:
    det_direct: float
    det_schur: float | None
    schur_skipped: bool
    relative_agreement: float | None
    nondegenerate: bool


@dataclass
class ClosedOrbit:
    manifold: Manifold
    start: PhasePoint
    length: float
    prime_length: float
    jet: FlowJet
    poincare: np.ndarray
    blocks: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    det_report: DetReport
    closure_residual: float
    label: str = ""

    @property
    def monodromy(self) -> np.ndarray:
        return self.jet.monodromy

    @property
    def det_i_minus_p(self) -> float:
        return self.det_report.det_direct

    @property
    def degenerate(self) -> bool:
        return not self.det_report.nondegenerate


def poincare_map(jet: FlowJet) -> tuple[np.ndarray, tuple]:
    """Transversal restriction of the monodromy and its Jacobi block split."""
    mono = jet.monodromy
    m = (mono.shape[0] - 1) // 2
    P = mono[1:, 1:].copy()
    A = P[:m, :m]
    B = P[:m, m:]
    C = P[m:, :m]
    D = P[m:, m:]
    return P, (A, B, C, D)


def det_I_minus_P(
    P: np.ndarray, blocks=None, rel_tol: float = 1e-8, degeneracy_tol: float = 1e-8
) -> DetReport:
    """Direct determinant of I - P with a Schur-formula cross-check."""
    dim = P.shape[0]
    eye = np.eye(dim)
    direct = float(np.linalg.det(eye - P))
    schur = None
    skipped = True
    rel = None
    if blocks is not None:
        A, B, C, D = blocks
        m = A.shape[0]
        ImD = np.eye(m) - D
        # Schur route only when I - D is safely invertible
        if m > 0 and np.linalg.cond(ImD) < 1e12:
            schur = float(
                np.linalg.det(ImD)
                * np.linalg.det((np.eye(m) - A) - B @ np.linalg.solve(ImD, C))
            )
            skipped = False
            rel = abs(direct - schur) / max(1.0, abs(direct))
            if rel > rel_tol:
                raise IntegrationError(
                    f"Schur determinant disagrees with direct value: {rel:.3e}"
                )
    return DetReport(direct, schur, skipped, rel, abs(direct) > degeneracy_tol)


def _detect_prime_length(
    M: Manifold, p0: PhasePoint, L: float,
    closure_tol: float = CLOSURE_TOL, l_min: float = L_MIN, max_k: int = 64,
) -> float:
    z0 = p0.as_array()
    for k in range(min(int(L / l_min), max_k), 1, -1):
        cand = L / k
        path = integrate_flow(M, p0, cand, rtol=1e-11, atol=1e-11)
        sep = M.phase_separation(path.endpoint.as_array(), z0)
        if np.linalg.norm(sep) <= closure_tol:
            return cand
    return L


def orbit_from_start(
    M: Manifold,
    p0: PhasePoint,
    length: float,
    prime_length: float | None = None,
    label: str = "",
    closure_tol: float = CLOSURE_TOL,
) -> ClosedOrbit:
    """Assemble a ClosedOrbit from a known closing start point and period."""
    jet = integrate_monodromy(M, p0, length)
    sep = M.phase_separation(jet.endpoint.as_array(), p0.as_array())
    resid = float(np.linalg.norm(sep))
    if resid > closure_tol:
        raise IntegrationError(
            f"orbit does not close: residual {resid:.3e} > {closure_tol:.1e}"
        )
    if prime_length is None:
        prime_length = _detect_prime_length(M, p0, length, closure_tol)
    P, blocks = poincare_map(jet)
    report = det_I_minus_P(P, blocks)
    return ClosedOrbit(
        M, p0, float(length), float(prime_length), jet, P, blocks, report, resid, label
    )


def _orbit_samples(orbit: ClosedOrbit, n_samples: int = 32) -> np.ndarray:
    path = integrate_flow(
        orbit.manifold, orbit.start, orbit.length,
        rtol=1e-9, atol=1e-9, n_samples=n_samples,
    )
    return path.states


def _orbits_coincide(a: ClosedOrbit, b: ClosedOrbit, samples_a, samples_b, tol) -> bool:
    if abs(a.length - b.length) > max(tol, 1e-6 * max(a.length, b.length)):
        return False
    M = a.manifold
    # one-sided sampled Hausdorff distance after arbitrary time shift
    worst = 0.0
    for zb in samples_b:
        dmin = min(
            np.linalg.norm(M.phase_separation(zb, za)) for za in samples_a
        )
        worst = max(worst, dmin)
        if worst > tol:
            return False
    return True


def _torus_orbits(M: FlatTorus, l_max: float) -> list[ClosedOrbit]:
    orbits = []
    for v in M.lattice_vectors(l_max):
        L = float(np.linalg.norm(v))
        k = np.rint(M.basis_inv @ v).astype(int)
        g = math.gcd(*[abs(int(c)) for c in k]) if M.n > 1 else abs(int(k[0]))
        prime = float(np.linalg.norm(M.basis @ (k // g)))
        p0 = PhasePoint.of(np.zeros(M.n), v / L)
        orbits.append(orbit_from_start(M, p0, L, prime, label=f"lattice {k.tolist()}"))
    return orbits


def _sphere_orbits(M: RoundSphere, l_max: float) -> list[ClosedOrbit]:
    prime = 2 * math.pi * M.radius
    orbits = []
    m = 1
    while m * prime <= l_max + 1e-12:
        p0 = PhasePoint.of([math.pi / 2, 0.0], [0.0, M.radius])
        orbits.append(orbit_from_start(M, p0, m * prime, prime, label=f"great circle x{m}"))
        m += 1
    return orbits


def _revolution_equators(M: SurfaceOfRevolution) -> list[float]:
    prof = M.profile
    us = np.linspace(0.0, 2 * math.pi, 181)
    roots = []
    for a, b in zip(us[:-1], us[1:]):
        fa, fb = prof.fp(a), prof.fp(b)
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(brentq(prof.fp, a, b)))
    out = []
    for r in sorted(set(round(r, 10) % (2 * math.pi) for r in roots)):
        if not any(abs(r - o) < 1e-6 for o in out):
            out.append(r)
    return out


def _revolution_symmetry_orbits(M: SurfaceOfRevolution, l_max: float) -> list[ClosedOrbit]:
    orbits = []
    for u0 in _revolution_equators(M):
        f0 = float(M.profile.f(u0))
        prime = 2 * math.pi * f0
        m = 1
        while m * prime <= l_max + 1e-12:
            for sgn in (1.0, -1.0):
                p0 = PhasePoint.of([u0, 0.0], [0.0, sgn * f0])
                orbits.append(
                    orbit_from_start(M, p0, m * prime, prime, label=f"equator u={u0:.6f}")
                )
            m += 1
    meridian_prime = 2 * math.pi
    m = 1
    while m * meridian_prime <= l_max + 1e-12:
        for sgn in (1.0, -1.0):
            p0 = PhasePoint.of([0.0, 0.0], [sgn * 1.0, 0.0])
            orbits.append(
                orbit_from_start(M, p0, m * meridian_prime, meridian_prime, label="meridian")
            )
        m += 1
    return orbits


def _revolution_newton_orbits(
    M: SurfaceOfRevolution, l_max: float, grid_density: int, closure_tol: float,
) -> list[ClosedOrbit]:
    """Grid-seeded Newton refinement of the return residual over (u0, alpha, T)."""
    if grid_density <= 0:
        return []
    found = []
    u_seeds = np.linspace(0.0, 2 * math.pi, grid_density, endpoint=False)
    a_seeds = np.linspace(0.15, math.pi / 2 - 0.15, max(2, grid_density // 2))

    def start_point(u0, alpha):
        f0 = float(M.profile.f(u0))
        return PhasePoint.of([u0, 0.0], [math.cos(alpha), math.sin(alpha) * f0])

    def residual(params):
        u0, alpha, T = params
        if T < L_MIN or T > l_max * 1.2:
            return np.full(4, 1e3)
        p = start_point(u0, alpha)
        try:
            path = integrate_flow(M, p, T, rtol=1e-9, atol=1e-9)
        except (ChartError, IntegrationError):
            return np.full(4, 1e3)
        return M.phase_separation(path.endpoint.as_array(), p.as_array())

    for u0 in u_seeds:
        for alpha in a_seeds:
            p = start_point(u0, alpha)
            try:
                path = integrate_flow(
                    M, p, l_max, rtol=1e-9, atol=1e-9,
                    n_samples=max(64, int(20 * l_max)),
                )
            except (ChartError, IntegrationError):
                continue
            seps = np.array(
                [np.linalg.norm(M.phase_separation(z, p.as_array())) for z in path.states]
            )
            for i in range(1, len(seps) - 1):
                t = path.times[i]
                if t < L_MIN or seps[i] > 0.2:
                    continue
                if seps[i] <= seps[i - 1] and seps[i] <= seps[i + 1]:
                    sol = least_squares(
                        residual, [u0, alpha, t], xtol=1e-13, ftol=1e-13, gtol=1e-13,
                    )
                    if not sol.success or np.linalg.norm(sol.fun) > closure_tol:
                        continue  # Newton divergence: candidate dropped
                    u_r, a_r, t_r = sol.x
                    if t_r > l_max + 1e-9:
                        continue
                    try:
                        found.append(
                            orbit_from_start(
                                M, start_point(u_r, a_r), float(t_r), label="newton"
                            )
                        )
                    except (ChartError, IntegrationError):
                        continue
    return found


def find_closed_orbits(
    M: Manifold,
    l_max: float,
    grid_density: int = 4,
    closure_tol: float = CLOSURE_TOL,
    merge_tol: float = MERGE_TOL,
) -> list[ClosedOrbit]:
    """Closed orbits with length <= l_max, deduplicated and sorted.

    Symmetry-adapted candidates (lattice vectors, great circles, equators,
    meridians) are exact; the grid+Newton search supplements them on surfaces
    of revolution.  Completeness below l_max is only claimed where symmetry
    enumerates the orbits.
    """
    if l_max <= 0:
        raise ValueError("l_max must be positive")
    if isinstance(M, FlatTorus):
        orbits = _torus_orbits(M, l_max)
    elif isinstance(M, RoundSphere):
        orbits = _sphere_orbits(M, l_max)
    elif isinstance(M, SurfaceOfRevolution):
        orbits = _revolution_symmetry_orbits(M, l_max)
        orbits += _revolution_newton_orbits(M, l_max, grid_density, closure_tol)
    else:
        raise ValueError(f"unsupported manifold kind {M.kind!r}")
    kept: list[ClosedOrbit] = []
    kept_samples: list[np.ndarray] = []
    orbits.sort(key=lambda o: (o.length, o.start.x, o.start.xi))
    for orb in orbits:
        samples = _orbit_samples(orb)
        dup = any(
            _orbits_coincide(prev, orb, ps, samples, max(merge_tol, 1e-6))
            for prev, ps in zip(kept, kept_samples)
        )
        if not dup:
            kept.append(orb)
            kept_samples.append(samples)
    return kept
