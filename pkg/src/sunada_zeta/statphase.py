"""Oscillatory integrals against Bott-Morse stationary phase, and mollification.

Model problems live on periodic boxes of dimension 1 or 2; quadrature is the
periodic trapezoid rule (spectrally accurate for smooth integrands) with a
mandatory grid-doubling convergence check.  The mollifier is the standard
compactly supported bump C exp(1/(|theta|^2 - 1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

__all__ = [
    "GridError",
    "CriticalComponent",
    "PhaseProblem",
    "MollifierConfig",
    "builtin_problem",
    "oscillatory_integral",
    "stationary_phase_prediction",
    "validate_stationary_phase",
    "StatPhaseReport",
    "bump_profile",
    "mollifier_config",
    "mollify",
    "mollification_error_order",
    "MollifyReport",
    "transverse_weight_from_phase",
]

BOX = 2.0 * math.pi
RICHARDSON_TOL = 1e-8
GRAD_GATE = 1e-10
HESS_GATE = 1e-6
FLOOR = 1e-12


class GridError(ValueError):
    """Grid too coarse for the requested oscillation or mollifier scale."""


@dataclass(frozen=True)
class CriticalComponent:
    """A connected critical component with its leading-term data.

    ``density_integral`` is the integral over the component of the amplitude
    against the quotient density d mu / |det Hess_perp|^{1/2} |dy|; for a
    point component this is a(x0) / |det Hess_perp(x0)|^{1/2}.
    """

    label: str
    k: int
    signature: int
    phase_value: float
    density_integral: float
    samples: np.ndarray


@dataclass(frozen=True)
class PhaseProblem:
    """Phase/amplitude pair on the periodic box [-pi, pi)^N with declared critical set.

    ``phi`` and ``amplitude`` take a tuple of N broadcastable coordinate
    arrays; ``grad_phi`` and ``hess_phi`` take a single point vector.
    """

    name: str
    N: int
    phi: object
    grad_phi: object
    hess_phi: object
    amplitude: object
    components: tuple[CriticalComponent, ...]

    def validate(self) -> None:
        for comp in self.components:
            if comp.k == self.N:
                continue
            grads = np.array([self.grad_phi(x) for x in comp.samples])
            if grads.size and np.abs(grads).max() > GRAD_GATE:
                raise ValueError(
                    f"{self.name}: gradient does not vanish on {comp.label}"
                )
            for x in comp.samples:
                H = np.atleast_2d(self.hess_phi(x))
                eig = np.linalg.eigvalsh(H)
                trans = sorted(np.abs(eig), reverse=True)[: self.N - comp.k]
                if trans and min(trans) < HESS_GATE:
                    raise ValueError(
                        f"{self.name}: transverse Hessian degenerate on {comp.label}"
                    )


def _grid(n: int) -> np.ndarray:
    return -math.pi + BOX * np.arange(n) / n


def _trapezoid_value(problem: PhaseProblem, h: float, n: int) -> complex:
    """Periodic trapezoid sum, chunked in the first axis to bound memory."""
    pts = _grid(n)
    dx = BOX / n
    if problem.N == 1:
        vals = np.exp(1j * h * problem.phi((pts,))) * problem.amplitude((pts,))
        return complex(vals.sum() * dx)
    total = 0.0 + 0.0j
    chunk = max(1, int(2**20 // n))
    row = pts[None, :]
    for i0 in range(0, n, chunk):
        col = pts[i0 : i0 + chunk, None]
        ph = np.asarray(problem.phi((col, row)), dtype=float)
        ph = np.broadcast_to(ph, (col.shape[0], n)) if ph.shape != (col.shape[0], n) else ph
        vals = np.exp(1j * h * ph)
        vals *= problem.amplitude((col, row))
        total += vals.sum()
    return complex(total * dx * dx)


def oscillatory_integral(
    problem: PhaseProblem,
    h: float,
    n_grid: int | None = None,
    check_tol: float = RICHARDSON_TOL,
    max_doublings: int = 3,
) -> complex:
    """I(h) = integral of exp(i h phi) a over the box, with a doubling check."""
    if h <= 0:
        raise ValueError("h must be positive")
    min_n = int(math.ceil(10.0 * h))
    if n_grid is None:
        n_grid = max(64, min_n)
    elif n_grid < min_n:
        raise GridError(f"grid {n_grid} under-resolves oscillation (need >= {min_n})")
    coarse = _trapezoid_value(problem, h, n_grid)
    for _ in range(max_doublings):
        fine = _trapezoid_value(problem, h, 2 * n_grid)
        scale = max(abs(fine), 1.0)
        if abs(fine - coarse) <= check_tol * scale:
            return fine
        n_grid *= 2
        coarse = fine
    raise GridError(
        f"trapezoid sum did not converge to {check_tol:.1e} after doubling to {2*n_grid}"
    )


def stationary_phase_prediction(problem: PhaseProblem, h: float) -> complex:
    """Sum of leading Bott-Morse terms over the declared critical components."""
    total = 0.0 + 0.0j
    for comp in problem.components:
        scale = (2.0 * math.pi / h) ** ((problem.N - comp.k) / 2.0)
        total += (
            scale
            * np.exp(0.25j * math.pi * comp.signature)
            * np.exp(1j * h * comp.phase_value)
            * comp.density_integral
        )
    return complex(total)


@dataclass
class StatPhaseReport:
    h_values: list[float]
    integrals: list[complex]
    predictions: list[complex]
    scaled_residuals: list[float]
    slope: float | None
    passes: bool

    def to_csv_rows(self) -> list[dict]:
        return [
            {
                "h": h,
                "integral_re": i.real,
                "integral_im": i.imag,
                "prediction_re": p.real,
                "prediction_im": p.imag,
                "scaled_residual": r,
            }
            for h, i, p, r in zip(
                self.h_values, self.integrals, self.predictions, self.scaled_residuals
            )
        ]


def validate_stationary_phase(
    problem: PhaseProblem,
    h_list,
    slope_gate: float = -0.8,
) -> StatPhaseReport:
    """Scaled residual table and its log-log decay slope.

    The residual at each h is |I(h) - prediction(h)| divided by the leading
    scale (2 pi / h)^{(N-k)/2} of the shallowest component.  Residuals at the
    quadrature floor (all below 1e-12) pass without a fit.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ValueError("need at least 4 increasing h values")
    if any(b <= a for a, b in zip(h_list[:-1], h_list[1:])):
        raise ValueError("h list must be increasing")
    k_min = min(c.k for c in problem.components)
    rows_I, rows_P, rows_R = [], [], []
    for h in h_list:
        I = oscillatory_integral(problem, h)
        P = stationary_phase_prediction(problem, h)
        scale = (2.0 * math.pi / h) ** ((problem.N - k_min) / 2.0)
        rows_I.append(I)
        rows_P.append(P)
        rows_R.append(abs(I - P) / scale)
    if max(rows_R) <= FLOOR:
        return StatPhaseReport(h_list, rows_I, rows_P, rows_R, None, True)
    logs = np.log(np.maximum(rows_R, 1e-300))
    slope = float(np.polyfit(np.log(h_list), logs, 1)[0])
    return StatPhaseReport(h_list, rows_I, rows_P, rows_R, slope, slope <= slope_gate)


# ---------------------------------------------------------------------------
# Builtin phase problems
# ---------------------------------------------------------------------------


def _bump_raw(r2):
    """exp(1/(r^2 - 1)) on r^2 < 1, 0 outside; vectorized in r^2."""
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(1.0 / (r2[inside] - 1.0))
    return out


def problem_cos_x() -> PhaseProblem:
    phi = lambda u: np.cos(u[0])
    grad = lambda x: np.array([-math.sin(x[0])])
    hess = lambda x: np.array([[-math.cos(x[0])]])
    amp = lambda u: np.ones(np.shape(u[0]))
    comps = (
        CriticalComponent("max x=0", 0, -1, 1.0, 1.0, np.array([[0.0]])),
        CriticalComponent("min x=pi", 0, 1, -1.0, 1.0, np.array([[math.pi]])),
    )
    p = PhaseProblem("cos_x", 1, phi, grad, hess, amp, comps)
    p.validate()
    return p


def problem_cos_y_2d() -> PhaseProblem:
    phi = lambda u: np.cos(u[1])
    grad = lambda x: np.array([0.0, -math.sin(x[1])])
    hess = lambda x: np.array([[0.0, 0.0], [0.0, -math.cos(x[1])]])
    amp = lambda u: 1.0
    ts = np.linspace(-math.pi, math.pi, 17)
    circle0 = np.stack([ts, np.zeros_like(ts)], axis=-1)
    circlepi = np.stack([ts, np.full_like(ts, math.pi)], axis=-1)
    comps = (
        CriticalComponent("circle y=0", 1, -1, 1.0, 2.0 * math.pi, circle0),
        CriticalComponent("circle y=pi", 1, 1, -1.0, 2.0 * math.pi, circlepi),
    )
    p = PhaseProblem("cos_y_2d", 2, phi, grad, hess, amp, comps)
    p.validate()
    return p


def problem_const(c: float = 0.7, N: int = 1) -> PhaseProblem:
    phi = lambda u: np.full(np.broadcast(*u).shape, float(c))
    grad = lambda x: np.zeros(N)
    hess = lambda x: np.zeros((N, N))
    amp = lambda u: np.cos(u[0]) ** 2 + 0.5
    mass = (math.pi + 0.5 * BOX) * (BOX ** (N - 1))  # integral of cos^2 + 1/2
    comps = (
        CriticalComponent("everything", N, 0, float(c), mass, np.zeros((1, N))),
    )
    p = PhaseProblem("const", N, phi, grad, hess, amp, comps)
    p.validate()
    return p


def problem_fresnel(sigma: float = 0.4) -> PhaseProblem:
    """Quadratic phase x^2/2 with a Gaussian amplitude; closed form available."""
    phi = lambda u: 0.5 * u[0] ** 2
    grad = lambda x: np.array([x[0]])
    hess = lambda x: np.array([[1.0]])
    amp = lambda u: np.exp(-(u[0] ** 2) / (2.0 * sigma**2))
    comps = (
        CriticalComponent("origin", 0, 1, 0.0, 1.0, np.array([[0.0]])),
    )
    p = PhaseProblem("fresnel", 1, phi, grad, hess, amp, comps)
    p.validate()
    return p


def fresnel_closed_form(h: float, sigma: float = 0.4) -> complex:
    """integral over R of exp(i h x^2 / 2 - x^2/(2 sigma^2))."""
    return complex(np.sqrt(2.0 * math.pi / (1.0 / sigma**2 - 1j * h)))


def problem_torus_transversal(tau: float = 1.0, support: float = 1.2) -> PhaseProblem:
    """Linearized flow-map phase -tau v theta with a compact radial bump.

    This is the transverse phase structure of the flat-torus flat-trace
    computation: the Hessian at the critical point is the off-diagonal block
    [[0, -tau], [-tau, 0]], whose Gelfand-Leray factor is tau.  The bump
    amplitude is radial, so all odd-order corrections vanish and the leading
    coefficient can be extrapolated in powers of h^-2.
    """
    if not (0 < support < math.pi / 2):
        raise ValueError("support radius must lie in (0, pi/2)")
    tau = float(tau)
    phi = lambda u: -tau * u[0] * u[1]

    def grad(x):
        return np.array([-tau * x[1], -tau * x[0]])

    def hess(x):
        return np.array([[0.0, -tau], [-tau, 0.0]])

    def amp(u):
        r2 = (u[0] ** 2 + u[1] ** 2) / support**2
        return _bump_raw(r2) * math.e  # normalized so a(0) = 1

    comps = (
        CriticalComponent("origin", 0, 0, 0.0, 1.0 / tau, np.array([[0.0, 0.0]])),
    )
    p = PhaseProblem(f"torus_transversal(tau={tau})", 2, phi, grad, hess, amp, comps)
    p.validate()
    return p


_BUILTINS = {
    "cos_x": problem_cos_x,
    "cos_y_2d": problem_cos_y_2d,
    "const": problem_const,
    "fresnel": problem_fresnel,
    "torus_transversal": problem_torus_transversal,
}


def builtin_problem(name: str, **params) -> PhaseProblem:
    if name not in _BUILTINS:
        raise ValueError(f"unknown fixture {name!r}; have {sorted(_BUILTINS)}")
    return _BUILTINS[name](**params)


def transverse_weight_from_phase(
    tau: float, h_list=(100.0, 200.0, 400.0)
) -> float:
    """Extract 1/(transverse determinant) from the linearized-flow fixture.

    (h / 2 pi) I(h) = a(0)/tau + c h^-2 + O(h^-4) for the radial bump, so a
    two-parameter fit in h^-2 recovers the Gelfand-Leray weight factor.
    """
    problem = problem_torus_transversal(tau)
    h_list = [float(h) for h in h_list]
    vals = []
    for h in h_list:
        I = oscillatory_integral(problem, h)
        vals.append((h / (2.0 * math.pi)) * I.real)
    A = np.stack([np.ones(len(h_list)), 1.0 / np.array(h_list) ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.array(vals), rcond=None)
    return float(coef[0])


# ---------------------------------------------------------------------------
# Mollification
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _bump_norm_const(dim: int) -> float:
    """C with integral of C exp(1/(|theta|^2-1)) over R^dim equal to 1."""
    opts = dict(limit=200, epsabs=1e-13, epsrel=1e-13)
    if dim == 1:
        val, err = quad(lambda t: math.exp(1.0 / (t * t - 1.0)), -1.0, 1.0, **opts)
    elif dim == 2:
        val, err = quad(
            lambda r: 2.0 * math.pi * r * math.exp(1.0 / (r * r - 1.0)), 0.0, 1.0, **opts
        )
    else:
        raise ValueError("mollifier implemented for dimensions 1 and 2")
    if err > 1e-10:
        raise RuntimeError("bump normalization quadrature failed")
    return 1.0 / val


def bump_profile(theta: np.ndarray, dim: int) -> np.ndarray:
    """Normalized bump psi(theta) = C exp(1/(|theta|^2 - 1)), support radius 1."""
    theta = np.asarray(theta, dtype=float)
    r2 = theta**2 if dim == 1 else np.sum(theta**2, axis=-1)
    return _bump_norm_const(dim) * _bump_raw(r2)


@dataclass(frozen=True)
class MollifierConfig:
    dim: int
    scale: float
    normalization: float
    mass_residual: float


def mollifier_config(h: float, dim: int = 1, n_check: int = 4096) -> MollifierConfig:
    """Scaled bump psi_h(theta) = h^dim psi(h theta) with a mass check."""
    if h <= 1:
        raise GridError("mollifier scale must satisfy h > 1")
    C = _bump_norm_const(dim)
    if dim == 1:
        ts = np.linspace(-1.0, 1.0, n_check)
        mass = np.trapezoid(bump_profile(ts, 1), ts)
    else:
        ts = np.linspace(-1.0, 1.0, 512)
        X, Y = np.meshgrid(ts, ts, indexing="ij")
        vals = bump_profile(np.stack([X, Y], axis=-1), 2)
        d = ts[1] - ts[0]
        mass = vals.sum() * d * d
    return MollifierConfig(dim, float(h), C, abs(float(mass) - 1.0))


def mollify(samples: np.ndarray, h: float, box: float = BOX) -> np.ndarray:
    """Circular convolution with the scaled bump on a uniform periodic grid.

    The discrete kernel mass is renormalized to exactly 1, so constants are
    reproduced to machine precision.
    """
    samples = np.asarray(samples, dtype=float)
    dim = samples.ndim
    if dim not in (1, 2):
        raise ValueError("samples must be 1- or 2-dimensional")
    if h <= 1:
        raise GridError("mollifier scale must satisfy h > 1")
    n = samples.shape[0]
    dx = box / n
    if dx > 1.0 / (10.0 * h):
        raise GridError(
            f"grid spacing {dx:.3e} too coarse for scale h = {h} (need <= {1.0/(10.0*h):.3e})"
        )
    if dim == 1:
        offs = np.fft.fftfreq(n, d=1.0 / (n * dx))
        kern = h * bump_profile(h * offs, 1)
        kern /= kern.sum() * dx
        out = np.fft.irfft(np.fft.rfft(samples) * np.fft.rfft(kern), n=n) * dx
        return out
    if samples.shape[0] != samples.shape[1]:
        raise ValueError("2-d samples must be square")
    offs = np.fft.fftfreq(n, d=1.0 / (n * dx))
    OX, OY = np.meshgrid(offs, offs, indexing="ij")
    kern = h**2 * bump_profile(np.stack([h * OX, h * OY], axis=-1), 2)
    kern /= kern.sum() * dx * dx
    out = np.fft.irfft2(np.fft.rfft2(samples) * np.fft.rfft2(kern), s=samples.shape)
    return out * dx * dx


@dataclass
class MollifyReport:
    h_values: list[float]
    sup_errors: list[float]
    slope: float | None
    at_floor: bool
    passes: bool


def mollification_error_order(
    f,
    h_list,
    n_grid: int | None = None,
    box: float = BOX,
    slope_window: tuple[float, float] = (-2.3, -1.7),
    floor: float = 1e-10,
) -> MollifyReport:
    """Fit log(sup |f - f * psi_h|) against log h over the given scales.

    ``f`` is a callable on grid points.  Errors below the quadrature floor are
    reported, not fitted.
    """
    h_list = [float(h) for h in h_list]
    if max(h_list) / min(h_list) < 10.0 - 1e-9:
        raise ValueError("h list must span at least one decade")
    if n_grid is None:
        n_grid = int(2 ** math.ceil(math.log2(10.0 * max(h_list) * box)))
    xs = -box / 2 + box * np.arange(n_grid) / n_grid
    fx = np.asarray(f(xs), dtype=float)
    errors = []
    for h in sorted(h_list):
        err = float(np.abs(fx - mollify(fx, h, box)).max())
        errors.append(err)
    if max(errors) <= floor:
        return MollifyReport(sorted(h_list), errors, None, True, True)
    slope = float(np.polyfit(np.log(sorted(h_list)), np.log(errors), 1)[0])
    ok = slope_window[0] <= slope <= slope_window[1]
    return MollifyReport(sorted(h_list), errors, slope, False, ok)
