"""Monte Carlo verification of the closed-form identities of the model.

Each check simulates one or two estimators with deterministic replica
substreams and reports estimate, standard error, target and z-score.
Where the identity equates two expectations that both need simulation
(many-to-one, censored mass), the two sides use independent streams and
the report's target is the second side's estimate with a combined
standard error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .genealogy import ancestral_trajectory, snapshot
from .levy_kernel import MotionSpec, PointMassJump, pathwise_drift, uncompensated_motion
from .levy_measure import (
    CharacteristicTriple,
    FiniteBirthParams,
    decompose,
    integral_x1_compensation,
    kappa,
    kappa_params,
    kappa_truncated,
    projected_atoms,
    projected_tail_mass,
    to_characteristic_triple,
)
from .point_measure import Theta, as_theta
from .simulator import _simulate, censor, substream

Model = FiniteBirthParams | CharacteristicTriple


@dataclass(frozen=True)
class EstimatorReport:
    """One Monte Carlo check: estimate vs analytic (or spine) target.

    ``passed`` is a pure function of (estimate, target, standard errors,
    k, atol): each compared part must satisfy |diff| <= k*se + atol.  The
    absolute floor keeps deterministic estimators (zero variance) from
    failing on float rounding; it is negligible against any real error.
    """

    name: str
    estimate: complex | float
    std_error: float
    analytic_target: complex | float
    z_score: float
    n_replicas: int
    passed: bool
    k: float = 3.0
    std_error_imag: float | None = None
    atol: float = 0.0
    params: str = ""


REPORT_COLUMNS = (
    "check",
    "params",
    "estimate",
    "std_error",
    "target",
    "z_score",
    "n_replicas",
    "k",
    "passed",
)


def report_row(r: EstimatorReport) -> list[str]:
    return [
        r.name,
        r.params,
        repr(r.estimate),
        repr(r.std_error),
        repr(r.analytic_target),
        repr(r.z_score),
        str(r.n_replicas),
        repr(r.k),
        str(r.passed),
    ]


def _part_z(diff: float, se: float, atol: float) -> float:
    if se > 0.0:
        return abs(diff) / se
    return 0.0 if abs(diff) <= atol else math.inf


def _make_report(
    name: str,
    estimate: complex | float,
    target: complex | float,
    se_re: float,
    se_im: float | None,
    n: int,
    k: float,
    params: str,
) -> EstimatorReport:
    atol = 1e-9 * (1.0 + abs(target))
    diff = complex(estimate) - complex(target)
    z_re = _part_z(diff.real, se_re, atol)
    ok = abs(diff.real) <= k * se_re + atol
    z = z_re
    if se_im is not None:
        z_im = _part_z(diff.imag, se_im, atol)
        ok = ok and abs(diff.imag) <= k * se_im + atol
        z = max(z_re, z_im)
    return EstimatorReport(
        name=name,
        estimate=estimate,
        std_error=se_re,
        analytic_target=target,
        z_score=z,
        n_replicas=n,
        passed=ok,
        k=k,
        std_error_imag=se_im,
        atol=atol,
        params=params,
    )


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    m = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    return m, se


# ---------------------------------------------------------------------------
# model resolution and the spine
# ---------------------------------------------------------------------------


def _resolve(model: Model, level: float | None) -> FiniteBirthParams:
    if isinstance(model, FiniteBirthParams):
        return model
    if isinstance(model, CharacteristicTriple):
        if level is None:
            level = model.lam.identity_level()
            if level is None:
                raise ValueError("an infinite measure needs an explicit simulation level")
        return decompose(model, level)
    raise TypeError(f"not a model: {model!r}")


def model_kappa(model: Model, z: complex, level: float | None = None) -> complex:
    """Cumulant of the process the simulator actually runs.

    For a triple simulated below its identity level this is the cumulant
    of the truncated measure, not of the full one.
    """
    if isinstance(model, FiniteBirthParams):
        return kappa_params(model, z)
    ident = model.lam.identity_level()
    if level is None or (ident is not None and level >= ident):
        return kappa(model, z)
    return kappa_truncated(model, level, z)


def spine_motion(model: Model, theta: Theta | float = 0.0) -> MotionSpec:
    """The spine Lévy process: exponent kappa(theta + ir) - kappa(theta).

    Under the trivial tilt the spine superposes the particle motion with
    the offspring displacement atoms; for theta > 0 it carries the
    exp(theta*x)-weighted projection of the measure as jump intensity,
    Gaussian part sigma^2 and pathwise drift a + sigma^2*theta - (the
    x_1-compensation integral).  The spine is never killed.
    """
    th = as_theta(theta)
    if isinstance(model, FiniteBirthParams):
        if th.value == 0.0:
            jumps = list(model.motion.jumps)
            if model.beta > 0:
                scale = model.beta / model.rho.total_weight
                for w, m in model.rho.entries:
                    for x in m:
                        if x != 0.0:
                            jumps.append((w * scale, PointMassJump(x)))
            return uncompensated_motion(
                model.motion.sigma2, pathwise_drift(model.motion), tuple(jumps)
            )
        model = to_characteristic_triple(model, th)
    if th.value != model.theta.value:
        raise ValueError(
            f"tilt {th.value} does not match the triple's exponent {model.theta.value}"
        )
    jumps = tuple((w, PointMassJump(x)) for w, x in projected_atoms(model))
    slope = model.a + model.sigma2 * th.value - integral_x1_compensation(model.lam)
    return uncompensated_motion(model.sigma2, slope, jumps)


def censored_spine_motion(triple: CharacteristicTriple, n: float) -> MotionSpec:
    """Spine with jumps <= -n removed and killed at the removed mass rate."""
    th = triple.theta
    jumps = tuple((w, PointMassJump(x)) for w, x in projected_atoms(triple, above=-n))
    slope = triple.a + triple.sigma2 * th.value - integral_x1_compensation(triple.lam)
    return uncompensated_motion(
        triple.sigma2, slope, jumps, kill_rate=projected_tail_mass(triple, n)
    )


def _spine_increments(
    spec: MotionSpec, dt: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    vals = np.full(size, pathwise_drift(spec) * dt)
    if spec.sigma2 > 0:
        vals += rng.normal(0.0, math.sqrt(spec.sigma2 * dt), size=size)
    for rate, law in spec.jumps:
        counts = rng.poisson(rate * dt, size=size)
        if isinstance(law, PointMassJump):
            vals += law.size * counts
            continue
        total = int(counts.sum())
        if total:
            sizes = law.sample_n(rng, total)
            ids = np.repeat(np.arange(size), counts)
            vals += np.bincount(ids, weights=sizes, minlength=size)
    return vals


def spine_endpoints(
    spec: MotionSpec, t: float, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized endpoint samples of the spine plus survival indicators."""
    vals = _spine_increments(spec, t, size, rng)
    if spec.kill_rate > 0:
        alive = rng.random(size) < math.exp(-spec.kill_rate * t)
    else:
        alive = np.ones(size, dtype=bool)
    return vals, alive


def spine_grid(
    spec: MotionSpec, grid: tuple[float, ...], size: int, rng: np.random.Generator
) -> np.ndarray:
    """Spine paths sampled on a fixed grid; shape (size, len(grid))."""
    out = np.empty((size, len(grid)))
    prev = 0.0
    acc = np.zeros(size)
    for j, s in enumerate(grid):
        acc = acc + _spine_increments(spec, s - prev, size, rng)
        out[:, j] = acc
        prev = s
    return out


# ---------------------------------------------------------------------------
# replica fan-out over the particle system
# ---------------------------------------------------------------------------


def _particle_samples(
    params: FiniteBirthParams,
    horizon: float,
    obs: tuple[float, ...],
    n_replicas: int,
    seed: int,
    max_particles: int,
    extract,
) -> np.ndarray:
    out = np.empty(n_replicas, dtype=complex)
    for i in range(n_replicas):
        forest = _simulate(params, horizon, obs, substream(seed, 0, i), max_particles)
        out[i] = extract(forest)
    return out


# ---------------------------------------------------------------------------
# the checks
# ---------------------------------------------------------------------------


def check_cumulant(
    model: Model,
    t: float,
    z: complex,
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
) -> EstimatorReport:
    """E<Z_t, e_z> against exp(t*kappa(z)); complex parts compared separately."""
    params = _resolve(model, level)
    z = complex(z)
    target = cmath.exp(t * model_kappa(model, z, level))

    def extract(forest):
        atoms = np.asarray(snapshot(forest, t)[0].atoms)
        return complex(np.exp(z * atoms).sum()) if len(atoms) else 0.0

    samples = _particle_samples(params, t, (t,), n_replicas, seed, max_particles, extract)
    mean_re, se_re = _mean_se(samples.real)
    se_im = None
    estimate: complex | float = mean_re
    if z.imag != 0.0:
        mean_im, se_im = _mean_se(samples.imag)
        estimate = complex(mean_re, mean_im)
    else:
        target = target.real
    return _make_report(
        "cumulant", estimate, target, se_re, se_im, n_replicas, k, f"t={t},z={z}"
    )


def check_many_to_one(
    model: Model,
    t: float,
    theta: Theta | float,
    f,
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
    f_name: str = "f",
) -> EstimatorReport:
    """E<Z_t, f> against the spine side E[exp(-theta*xi_t + t*kappa(theta)) f(xi_t)].

    Both sides are Monte Carlo with independent streams; the report's
    target is the spine estimate and the standard error combines both.
    """
    params = _resolve(model, level)
    th = as_theta(theta)
    kap = model_kappa(model, th.value, level).real

    def extract(forest):
        return sum(f(x) for x in snapshot(forest, t)[0])

    lhs = _particle_samples(params, t, (t,), n_replicas, seed, max_particles, extract).real
    lhs_mean, lhs_se = _mean_se(lhs)

    spine = spine_motion(model, th)
    xi, _ = spine_endpoints(spine, t, n_replicas, substream(seed, 1))
    rhs = np.exp(t * kap - th.value * xi) * np.array([f(x) for x in xi])
    rhs_mean, rhs_se = _mean_se(rhs)

    return _make_report(
        "many_to_one",
        lhs_mean,
        rhs_mean,
        math.hypot(lhs_se, rhs_se),
        None,
        n_replicas,
        k,
        f"t={t},theta={th.value},f={f_name}",
    )


def check_pathwise_many_to_one(
    model: Model,
    t: float,
    theta: Theta | float,
    functional,
    grid: tuple[float, ...],
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
    f_name: str = "F",
) -> EstimatorReport:
    """Sum of a path functional over all ancestral lines vs the spine path.

    The functional sees the trajectory sampled at the fixed grid, whose
    last point must be t.
    """
    grid = tuple(grid)
    if not grid or grid[-1] != t or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be increasing and end at t")
    if grid[0] <= 0:
        raise ValueError("grid times must be positive")
    params = _resolve(model, level)
    th = as_theta(theta)
    kap = model_kappa(model, th.value, level).real

    def extract(forest):
        measure, _ = snapshot(forest, t)
        total = 0.0
        for j in range(1, len(measure) + 1):
            path = ancestral_trajectory(forest, j, t)
            total += functional(path.values(grid))
        return total

    lhs = _particle_samples(params, t, grid, n_replicas, seed, max_particles, extract).real
    lhs_mean, lhs_se = _mean_se(lhs)

    spine = spine_motion(model, th)
    paths = spine_grid(spine, grid, n_replicas, substream(seed, 1))
    weights = np.exp(t * kap - th.value * paths[:, -1])
    rhs = weights * np.array([functional(row) for row in paths])
    rhs_mean, rhs_se = _mean_se(rhs)

    return _make_report(
        "pathwise_many_to_one",
        lhs_mean,
        rhs_mean,
        math.hypot(lhs_se, rhs_se),
        None,
        n_replicas,
        k,
        f"t={t},theta={th.value},F={f_name},grid={list(grid)}",
    )


def check_martingale_normalization(
    model: Model,
    t: float,
    r: float,
    theta: Theta | float,
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
) -> EstimatorReport:
    """Mean of M_t(r) = exp(-t*kappa(theta+ir)) <Z_t, e_(theta+ir)> against 1."""
    params = _resolve(model, level)
    th = as_theta(theta)
    zc = complex(th.value, r)
    factor = cmath.exp(-t * model_kappa(model, zc, level))

    def extract(forest):
        atoms = np.asarray(snapshot(forest, t)[0].atoms)
        return factor * complex(np.exp(zc * atoms).sum()) if len(atoms) else 0.0

    samples = _particle_samples(params, t, (t,), n_replicas, seed, max_particles, extract)
    mean_re, se_re = _mean_se(samples.real)
    mean_im, se_im = _mean_se(samples.imag)
    return _make_report(
        "martingale",
        complex(mean_re, mean_im),
        1.0 + 0.0j,
        se_re,
        se_im,
        n_replicas,
        k,
        f"t={t},r={r},theta={th.value}",
    )


def check_censored_mass(
    triple: CharacteristicTriple,
    n: float,
    t: float,
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
) -> EstimatorReport:
    """Mean censored population vs exp(t*kappa(theta)) E[e^(-theta xi+_t); alive].

    The left side censors simulated forests at level n; simulating at
    any truncation level >= n leaves the censored process unchanged, so
    ``level`` defaults to the measure's identity level when finite.
    """
    ident = triple.lam.identity_level()
    if level is None:
        level = ident
        if level is None:
            raise ValueError("an infinite measure needs an explicit simulation level")
    if level < n and (ident is None or level < ident):
        raise ValueError(f"simulation level {level} must be >= censoring level {n}")
    params = decompose(triple, level)
    th = triple.theta
    kap = kappa(triple, th.value).real

    def extract(forest):
        return len(snapshot(censor(forest, n), t)[0])

    lhs = _particle_samples(params, t, (t,), n_replicas, seed, max_particles, extract).real
    lhs_mean, lhs_se = _mean_se(lhs)

    spine = censored_spine_motion(triple, n)
    xi, alive = spine_endpoints(spine, t, n_replicas, substream(seed, 1))
    rhs = math.exp(t * kap) * np.exp(-th.value * xi) * alive
    rhs_mean, rhs_se = _mean_se(rhs)

    return _make_report(
        "censored_mass",
        lhs_mean,
        rhs_mean,
        math.hypot(lhs_se, rhs_se),
        None,
        n_replicas,
        k,
        f"n={n},t={t},theta={th.value}",
    )


def weighted_intensity(
    model: Model,
    theta: Theta | float,
    f,
    n_replicas: int,
    *,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    max_particles: int = 1_000_000,
    analytic_target: complex | float | None = None,
    complex_valued: bool = False,
    f_name: str = "f",
) -> EstimatorReport:
    """exp(-kappa(theta)) E<Z_1, e_theta f> vs the law of the spine endpoint.

    With ``analytic_target`` given, the particle estimate is compared to
    it directly; otherwise the target is the spine Monte Carlo mean of
    f(xi_1).  Complex test functions (e.g. e_(ir) against exp(Psi(r)))
    need ``complex_valued=True`` so both parts are compared.
    """
    params = _resolve(model, level)
    th = as_theta(theta)
    kap = model_kappa(model, th.value, level).real
    norm = math.exp(-kap)

    def extract(forest):
        return norm * sum(math.exp(th.value * x) * f(x) for x in snapshot(forest, 1.0)[0])

    lhs = _particle_samples(params, 1.0, (1.0,), n_replicas, seed, max_particles, extract)
    label = f"theta={th.value},f={f_name}"
    if analytic_target is None:
        spine = spine_motion(model, th)
        xi, _ = spine_endpoints(spine, 1.0, n_replicas, substream(seed, 1))
        rhs = np.array([f(x) for x in xi])
        tgt_mean_re, tgt_se_re = _mean_se(rhs.real if complex_valued else rhs)
        target: complex | float = tgt_mean_re
        tgt_se_im = 0.0
        if complex_valued:
            tgt_mean_im, tgt_se_im = _mean_se(rhs.imag)
            target = complex(tgt_mean_re, tgt_mean_im)
    else:
        target = analytic_target
        tgt_se_re = tgt_se_im = 0.0

    mean_re, se_re = _mean_se(lhs.real)
    se_re = math.hypot(se_re, tgt_se_re)
    if not complex_valued:
        return _make_report(
            "weighted_intensity", mean_re, target, se_re, None, n_replicas, k, label
        )
    mean_im, se_im = _mean_se(lhs.imag)
    se_im = math.hypot(se_im, tgt_se_im)
    return _make_report(
        "weighted_intensity",
        complex(mean_re, mean_im),
        target,
        se_re,
        se_im,
        n_replicas,
        k,
        label,
    )


# ---------------------------------------------------------------------------
# standard battery for the CLI
# ---------------------------------------------------------------------------


def standard_suite(
    model: Model,
    *,
    t: float = 1.0,
    n_replicas: int = 2000,
    seed: int = 0,
    k: float = 3.0,
    level: float | None = None,
    theta: Theta | float | None = None,
    frequencies: tuple[float, ...] = (1.0,),
    censor_levels: tuple[float, ...] = (),
    max_particles: int = 1_000_000,
) -> list[EstimatorReport]:
    """The full identity battery on one model; returns all reports."""
    th = as_theta(
        theta if theta is not None
        else (model.theta if isinstance(model, CharacteristicTriple) else 0.0)
    )
    common = dict(seed=seed, k=k, level=level, max_particles=max_particles)
    reports = [
        check_cumulant(model, t, th.value, n_replicas, **common),
        check_many_to_one(
            model, t, th, lambda x: 1.0, n_replicas, f_name="one", **common
        ),
        check_many_to_one(
            model, t, th, lambda x: 1.0 if x > 0 else 0.0, n_replicas,
            f_name="indicator_pos", **common,
        ),
        check_many_to_one(
            model, t, th, lambda x: math.exp(-x * x), n_replicas,
            f_name="gauss_bump", **common,
        ),
        weighted_intensity(
            model, th, lambda x: 1.0, n_replicas, analytic_target=1.0,
            f_name="one", **common,
        ),
    ]
    grid = tuple(t * i / 4.0 for i in range(1, 5))
    reports.append(
        check_pathwise_many_to_one(
            model, t, th, lambda vals: 1.0 if min(vals) > -1.0 else 0.0,
            grid, n_replicas, f_name="min_above_-1", **common,
        )
    )
    for r in frequencies:
        reports.append(
            check_cumulant(model, t, complex(th.value, r), n_replicas, **common)
        )
        reports.append(
            check_martingale_normalization(model, t, r, th, n_replicas, **common)
        )
    if isinstance(model, CharacteristicTriple):
        for n in censor_levels:
            reports.append(
                check_censored_mass(
                    triple=model, n=n, t=t, n_replicas=n_replicas,
                    seed=seed, k=k, level=level, max_particles=max_particles,
                )
            )
    return reports
