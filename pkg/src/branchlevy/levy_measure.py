"""The branching Lévy measure, its truncations and the cumulant.

The measure is represented as a countable weighted list of concrete
finite point measures: an explicit finite part plus an optional
geometric cascade family (weights ``base * ratio**k`` with a fixed atom
template sinking by ``depth_step`` per index).  With this representation
every integral used by the toolkit is either an exact finite sum or a
geometric series with a closed-form tail, so series values are certified
rather than merely estimated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .levy_kernel import JumpLaw, MotionSpec, PointMassJump, log_mgf
from .point_measure import EMPTY, RankedPointMeasure, Theta, as_theta, translate, truncate

FINITE = "finite"
INFINITE = "infinite"
UNKNOWN = "unknown"

_ZERO_SINGLETON = (0.0,)  # the forbidden Dirac mass at the origin


class SeriesDivergenceError(RuntimeError):
    """A series over the measure components fails to converge (or to certify)."""


@dataclass(frozen=True)
class SeriesValue:
    """Value of an integral over the measure, with a certification status."""

    value: float
    status: str = FINITE

    @property
    def finite(self) -> bool:
        return self.status == FINITE


@dataclass(frozen=True)
class LambdaComponent:
    weight: float
    measure: RankedPointMeasure

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"component weight must be positive, got {self.weight!r}")
        if self.measure.atoms == _ZERO_SINGLETON:
            raise ValueError("the Dirac mass at 0 carries no measure mass")


@dataclass(frozen=True)
class GeometricCascade:
    """Components (base*ratio**k, template - k*depth_step) for k >= start."""

    base_weight: float
    ratio: float
    template: RankedPointMeasure
    depth_step: float = 1.0
    start: int = 1

    def __post_init__(self):
        if not (self.base_weight > 0 and math.isfinite(self.base_weight)):
            raise ValueError("base_weight must be positive")
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise ValueError("ratio must be positive")
        if len(self.template) == 0:
            raise ValueError("cascade template must have at least one atom")
        if not (self.depth_step > 0):
            raise ValueError("depth_step must be positive")
        if self.start < 0:
            raise ValueError("start index must be >= 0")
        if len(self.template) == 1:
            t1 = self.template.atom(0)
            k = t1 / self.depth_step
            if k >= self.start and t1 - round(k) * self.depth_step == 0.0:
                raise ValueError("cascade would generate the Dirac mass at 0")

    def weight(self, k: int) -> float:
        return self.base_weight * self.ratio**k

    def measure(self, k: int) -> RankedPointMeasure:
        return translate(self.template, -k * self.depth_step)

    def top_atom(self, k: int) -> float:
        return self.template.atom(0) - k * self.depth_step

    def mass_from(self, k0: int) -> SeriesValue:
        """Total weight of components with index >= k0 (closed form)."""
        if self.ratio >= 1.0:
            return SeriesValue(math.inf, INFINITE)
        return SeriesValue(self.base_weight * self.ratio**k0 / (1.0 - self.ratio))

    def weighted_atom_sum(self, z: complex, k0: int) -> complex:
        """Closed form of sum over k >= k0 of weight(k) * <measure(k), e_z>."""
        a = sum(cmath.exp(z * t) for t in self.template)
        q = self.ratio * cmath.exp(-z * self.depth_step)
        if abs(q) >= 1.0:
            raise SeriesDivergenceError(
                f"geometric tail diverges: |ratio*exp(-z*step)| = {abs(q):.6g} >= 1"
            )
        return a * self.base_weight * q**k0 / (1.0 - q)

    def indices_with_top_atom_at_least(self, c: float) -> range:
        """Indices k >= start whose largest atom is >= c (a finite range)."""
        k = self.start
        while self.top_atom(k) >= c:
            k += 1
        return range(self.start, k)


@dataclass(frozen=True)
class LambdaSpec:
    """Weighted countable list of point measures: finite part + optional cascade."""

    components: tuple[LambdaComponent, ...] = ()
    cascade: GeometricCascade | None = None
    declared_levels: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.declared_levels is not None:
            if any(not lvl > 0 for lvl in self.declared_levels):
                raise ValueError("declared levels must be positive")

    @staticmethod
    def from_weighted(*pairs: tuple[float, RankedPointMeasure]) -> "LambdaSpec":
        return LambdaSpec(tuple(LambdaComponent(w, m) for w, m in pairs))

    @property
    def is_finite(self) -> bool:
        return self.cascade is None

    def check_level(self, n: float) -> None:
        if not n > 0:
            raise ValueError(f"truncation level must be positive, got {n!r}")
        if self.declared_levels is not None and n not in self.declared_levels:
            raise ValueError(f"level {n!r} is not among the declared levels")

    def truncated(self, n: float) -> tuple[tuple[tuple[float, RankedPointMeasure], ...], float]:
        """Components of the level-n truncation, plus the collapsed tail weight.

        Every component measure is restricted to [-n, inf); results equal
        to the Dirac mass at 0 are dropped entirely (they would be fictive
        events), while empty results are kept as pure-death components.
        Cascade components that lie entirely below -n contribute their
        total weight as additional pure-death mass, returned separately.
        """
        self.check_level(n)
        out: list[tuple[float, RankedPointMeasure]] = []
        for comp in self.components:
            m = truncate(comp.measure, n)
            if m.atoms == _ZERO_SINGLETON:
                continue
            out.append((comp.weight, m))
        tail_kill = 0.0
        if self.cascade is not None:
            casc = self.cascade
            live = casc.indices_with_top_atom_at_least(-n)
            for k in live:
                m = truncate(casc.measure(k), n)
                if m.atoms == _ZERO_SINGLETON:
                    continue
                out.append((casc.weight(k), m))
            tail = casc.mass_from(live.stop)
            if not tail.finite:
                raise SeriesDivergenceError(
                    f"level-{n} truncation has infinite pure-death mass (ratio >= 1)"
                )
            tail_kill = tail.value
        return tuple(out), tail_kill

    def identity_level(self) -> float | None:
        """Smallest level at which truncation leaves the measure unchanged."""
        if self.cascade is not None:
            return None
        deepest = 0.0
        for comp in self.components:
            if len(comp.measure):
                deepest = min(deepest, comp.measure.atom(len(comp.measure) - 1))
        return max(1.0, -deepest)


@dataclass(frozen=True)
class CharacteristicTriple:
    """Characteristics (sigma^2, a, Lambda) plus the integrability exponent."""

    sigma2: float
    a: float
    lam: LambdaSpec
    theta: Theta

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise ValueError("sigma2 must be finite and >= 0")
        if not math.isfinite(self.a):
            raise ValueError("a must be finite")
        if not isinstance(self.theta, Theta):
            object.__setattr__(self, "theta", as_theta(self.theta))


# ---------------------------------------------------------------------------
# certified integrals over the measure
# ---------------------------------------------------------------------------


def _one_wedge(spec: LambdaSpec, power: int) -> SeriesValue:
    """integral of 1 ^ |x_1|**power (power 1 or 2); empty measures count 1."""
    total = 0.0
    for comp in spec.components:
        x1 = comp.measure.atom(0)  # -inf for the empty measure
        total += comp.weight * (1.0 if abs(x1) >= 1.0 else abs(x1) ** power)
    casc = spec.cascade
    if casc is not None:
        mass = casc.mass_from(casc.start)
        if not mass.finite:
            return SeriesValue(math.inf, INFINITE)
        total += mass.value
        # inside the band |x1| < 1 the integrand falls short of 1
        for k in casc.indices_with_top_atom_at_least(-1.0):
            x1 = casc.top_atom(k)
            if abs(x1) < 1.0:
                total -= casc.weight(k) * (1.0 - abs(x1) ** power)
    return SeriesValue(total)


def integral_one_wedge_sq(spec: LambdaSpec) -> SeriesValue:
    return _one_wedge(spec, 2)


def integral_one_wedge_abs(spec: LambdaSpec) -> SeriesValue:
    return _one_wedge(spec, 1)


def integral_upper_exp_tail(spec: LambdaSpec, theta: Theta) -> SeriesValue:
    """integral of e^(theta*x_1) over {x_1 > 1}."""
    total = 0.0
    try:
        for comp in spec.components:
            x1 = comp.measure.atom(0)
            if x1 > 1.0:
                total += comp.weight * math.exp(theta.value * x1)
        casc = spec.cascade
        if casc is not None:
            for k in casc.indices_with_top_atom_at_least(1.0):
                x1 = casc.top_atom(k)
                if x1 > 1.0:
                    total += casc.weight(k) * math.exp(theta.value * x1)
    except OverflowError:
        return SeriesValue(math.inf, UNKNOWN)
    return SeriesValue(total)


def integral_offspring_weight(spec: LambdaSpec, theta: Theta) -> SeriesValue:
    """integral of sum_{k>=2} e^(theta*x_k)."""
    th = theta.value
    total = 0.0
    try:
        for comp in spec.components:
            total += comp.weight * sum(
                math.exp(th * x) for x in comp.measure.atoms[1:]
            )
        casc = spec.cascade
        if casc is not None and len(casc.template) >= 2:
            c2 = sum(math.exp(th * t) for t in casc.template.atoms[1:])
            q = casc.ratio * math.exp(-th * casc.depth_step)
            if q >= 1.0:
                return SeriesValue(math.inf, INFINITE)
            total += c2 * casc.base_weight * q**casc.start / (1.0 - q)
    except OverflowError:
        return SeriesValue(math.inf, UNKNOWN)
    return SeriesValue(total)


def integral_x1_compensation(spec: LambdaSpec) -> float:
    """integral of x_1 * 1{|x_1| < 1}; exact for the built-in families."""
    total = 0.0
    for comp in spec.components:
        x1 = comp.measure.atom(0)
        if abs(x1) < 1.0:
            total += comp.weight * x1
    casc = spec.cascade
    if casc is not None:
        for k in casc.indices_with_top_atom_at_least(-1.0):
            x1 = casc.top_atom(k)
            if abs(x1) < 1.0:
                total += casc.weight(k) * x1
    return total


def integral_x1_above(spec: LambdaSpec, floor: float) -> float:
    """integral of x_1 * 1{x_1 > floor}; the indicator region is finite."""
    total = 0.0
    for comp in spec.components:
        x1 = comp.measure.atom(0)
        if x1 > floor:
            total += comp.weight * x1
    casc = spec.cascade
    if casc is not None:
        for k in casc.indices_with_top_atom_at_least(math.nextafter(floor, math.inf)):
            x1 = casc.top_atom(k)
            if x1 > floor:
                total += casc.weight(k) * x1
    return total


def mass_top_atom_positive(spec: LambdaSpec) -> float:
    """Lambda-mass of measures whose largest atom is strictly positive."""
    total = 0.0
    for comp in spec.components:
        if comp.measure.atom(0) > 0.0:
            total += comp.weight
    casc = spec.cascade
    if casc is not None:
        for k in casc.indices_with_top_atom_at_least(math.nextafter(0.0, math.inf)):
            total += casc.weight(k)
    return total


@dataclass(frozen=True)
class AdmissibilityReport:
    """Finiteness of the three defining integrals of a Lévy measure."""

    square: SeriesValue       # integral of 1 ^ x_1^2
    upper_tail: SeriesValue   # integral of e^(theta x_1) over {x_1 > 1}
    offspring: SeriesValue    # integral of sum_{k>=2} e^(theta x_k)

    @property
    def conclusive(self) -> bool:
        return UNKNOWN not in (self.square.status, self.upper_tail.status, self.offspring.status)

    @property
    def passed(self) -> bool:
        return all(v.finite for v in (self.square, self.upper_tail, self.offspring))


def check_admissible(triple: CharacteristicTriple) -> AdmissibilityReport:
    spec = triple.lam
    return AdmissibilityReport(
        square=integral_one_wedge_sq(spec),
        upper_tail=integral_upper_exp_tail(spec, triple.theta),
        offspring=integral_offspring_weight(spec, triple.theta),
    )


# ---------------------------------------------------------------------------
# cumulant
# ---------------------------------------------------------------------------


def kappa(triple: CharacteristicTriple, z: complex, *, rel_tol: float = 1e-10) -> complex:
    """Cumulant kappa(z); requires 0 <= Re z <= theta.

    The finite part is an exact sum; the cascade part is three closed
    forms (weighted atom sum, mass, compensation band), so the result
    carries no truncation error.  ``rel_tol`` is retained for API
    symmetry with evaluators that do truncate series.
    """
    z = complex(z)
    th = triple.theta.value
    if z.real < -1e-12 or z.real > th + 1e-12:
        raise ValueError(f"Re z must lie in [0, theta]; got Re z = {z.real}, theta = {th}")
    spec = triple.lam
    out = 0.5 * triple.sigma2 * z * z + triple.a * z
    for comp in spec.components:
        s = sum(cmath.exp(z * x) for x in comp.measure)
        x1 = comp.measure.atom(0)
        compn = z * x1 if abs(x1) < 1.0 else 0.0
        out += comp.weight * (s - 1.0 - compn)
    casc = spec.cascade
    if casc is not None:
        out += casc.weighted_atom_sum(z, casc.start)
        mass = casc.mass_from(casc.start)
        if not mass.finite:
            raise SeriesDivergenceError("total cascade mass diverges (ratio >= 1)")
        out -= mass.value
        for k in casc.indices_with_top_atom_at_least(-1.0):
            x1 = casc.top_atom(k)
            if abs(x1) < 1.0:
                out -= casc.weight(k) * z * x1
    return out


def kappa_truncated(
    triple: CharacteristicTriple, n: float, z: complex, *, rel_tol: float = 1e-10
) -> complex:
    """Cumulant of the level-n truncated measure (same sigma2, a, theta)."""
    z = complex(z)
    comps, tail_kill = triple.lam.truncated(n)
    out = 0.5 * triple.sigma2 * z * z + triple.a * z - tail_kill
    for w, m in comps:
        s = sum(cmath.exp(z * x) for x in m)
        x1 = m.atom(0)
        compn = z * x1 if abs(x1) < 1.0 else 0.0
        out += w * (s - 1.0 - compn)
    return out


# ---------------------------------------------------------------------------
# finite-birth parametrization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteOffspringLaw:
    """Offspring law as a weighted mixture of fixed point measures.

    Entries carry positive weights (rates when produced by ``decompose``)
    and are normalized only at sampling time, so a decompose/reassemble
    round trip never divides weights.  No entry may be a Dirac mass; the
    empty measure (pure death) is allowed.
    """

    entries: tuple[tuple[float, RankedPointMeasure], ...] = ()

    def __post_init__(self):
        for w, m in self.entries:
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"offspring weight must be positive, got {w!r}")
            if len(m) == 1:
                raise ValueError("offspring law may not charge Dirac masses (#=1)")
        object.__setattr__(
            self, "_cum", np.cumsum([w for w, _ in self.entries]) if self.entries else None
        )

    @property
    def total_weight(self) -> float:
        return float(self._cum[-1]) if self.entries else 0.0

    def sample(self, rng: np.random.Generator) -> RankedPointMeasure:
        if not self.entries:
            return EMPTY
        u = rng.random() * self._cum[-1]
        idx = int(np.searchsorted(self._cum, u, side="right"))
        idx = min(idx, len(self.entries) - 1)
        return self.entries[idx][1]

    def mean_count(self) -> float:
        if not self.entries:
            return 0.0
        tot = self.total_weight
        return sum(w * len(m) for w, m in self.entries) / tot

    def mean_weight(self, z: complex) -> complex:
        """E over the law of sum_j exp(z * x_j)."""
        if not self.entries:
            return 0.0 + 0.0j
        tot = self.total_weight
        acc = 0.0 + 0.0j
        for w, m in self.entries:
            acc += w * sum(cmath.exp(z * x) for x in m)
        return acc / tot


DELTA_EMPTY = DiscreteOffspringLaw()


@dataclass(frozen=True)
class FiniteBirthParams:
    """(motion, branching rate, offspring law) of a finite-birth-intensity process."""

    motion: MotionSpec
    beta: float
    rho: DiscreteOffspringLaw

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError("beta must be finite and >= 0")
        if self.beta == 0 and self.rho.entries:
            raise ValueError("beta = 0 requires the point mass at the empty measure")
        if self.beta > 0 and not self.rho.entries:
            raise ValueError("beta > 0 requires a non-trivial offspring law")


def decompose(triple: CharacteristicTriple, n: float) -> FiniteBirthParams:
    """Finite-birth parameters of the level-n truncation of the measure.

    Truncated components split by atom count: empty measures feed the
    kill rate, single atoms become motion jumps (the parent jumps, no
    offspring), and everything else goes to the offspring mixture whose
    total weight is the branching rate.  The motion drift solves
    ``a = a' + sum of x_1 1{|x_1|<1} over the offspring part``.
    """
    comps, kill = triple.lam.truncated(n)
    point_jumps: list[tuple[float, JumpLaw]] = []
    rho_entries: list[tuple[float, RankedPointMeasure]] = []
    comp_sum = 0.0
    for w, m in comps:
        if len(m) == 0:
            kill += w
        elif len(m) == 1:
            point_jumps.append((w, PointMassJump(m.atom(0))))
        else:
            rho_entries.append((w, m))
            x1 = m.atom(0)
            if abs(x1) < 1.0:
                comp_sum += w * x1
    beta = math.fsum(w for w, _ in rho_entries)
    rho = DiscreteOffspringLaw(tuple(rho_entries)) if rho_entries else DELTA_EMPTY
    motion = MotionSpec(
        sigma2=triple.sigma2,
        drift=triple.a - comp_sum,
        jumps=tuple(point_jumps),
        kill_rate=kill,
    )
    return FiniteBirthParams(motion=motion, beta=beta, rho=rho)


def to_characteristic_triple(
    params: FiniteBirthParams, theta: Theta | float = 0.0
) -> CharacteristicTriple:
    """Rebuild (sigma^2, a, Lambda) from finite-birth parameters.

    Requires every motion jump to be a point mass; continuous jump
    families have no exact image in the discrete measure representation.
    """
    comps: list[LambdaComponent] = []
    for rate, law in params.motion.jumps:
        if not isinstance(law, PointMassJump):
            raise ValueError(f"cannot express {law!r} as a discrete measure component")
        comps.append(LambdaComponent(rate, RankedPointMeasure((law.size,))))
    if params.motion.kill_rate > 0:
        comps.append(LambdaComponent(params.motion.kill_rate, EMPTY))
    comp_sum = 0.0
    if params.rho.entries:
        scale = params.beta / params.rho.total_weight
        for w, m in params.rho.entries:
            comps.append(LambdaComponent(w * scale, m))
            x1 = m.atom(0)
            if abs(x1) < 1.0:
                comp_sum += w * scale * x1
    return CharacteristicTriple(
        sigma2=params.motion.sigma2,
        a=params.motion.drift + comp_sum,
        lam=LambdaSpec(tuple(comps)),
        theta=as_theta(theta),
    )


def canonical_components(spec: LambdaSpec) -> tuple[tuple[float, tuple[float, ...]], ...]:
    """Finite components merged by measure and sorted: the measure as a multiset."""
    if spec.cascade is not None:
        raise ValueError("canonical form is defined for finite specs only")
    merged: dict[tuple[float, ...], float] = {}
    for comp in spec.components:
        key = comp.measure.atoms
        merged[key] = merged.get(key, 0.0) + comp.weight
    return tuple(sorted(((w, a) for a, w in merged.items()), key=lambda p: p[1]))


def kappa_params(params: FiniteBirthParams, z: complex) -> complex:
    """Cumulant in the (Phi, beta, rho) parametrization.

    ``kappa(z) = log-mgf of the motion - kill rate + beta * E[<Delta, e_z> - 1]``.
    """
    z = complex(z)
    out = log_mgf(params.motion, z) - params.motion.kill_rate
    if params.beta > 0:
        out += params.beta * (params.rho.mean_weight(z) - 1.0)
    return out


# ---------------------------------------------------------------------------
# the projected (spine) Lévy measure
# ---------------------------------------------------------------------------


def projected_levy_measure_integral(
    triple: CharacteristicTriple,
    f,
    *,
    f_bound: float | None = None,
    rel_tol: float = 1e-10,
    max_components: int = 10_000,
) -> float:
    """integral of f against the spine Lévy measure lambda.

    ``lambda`` weighs every non-origin atom x of every component by
    ``exp(theta*x)``.  For an infinite cascade a certified tail bound
    needs a finite sup-norm bound on f (``f_bound``); the evaluator
    refuses to silently truncate without one.
    """
    th = triple.theta.value
    total = 0.0
    for comp in triple.lam.components:
        for x in comp.measure:
            if x == 0.0:
                continue
            fx = f(x)
            if fx < 0:
                raise ValueError(f"f must be non-negative, got f({x}) = {fx}")
            total += comp.weight * fx * math.exp(th * x)
    casc = triple.lam.cascade
    if casc is None:
        return total
    if f_bound is None:
        raise ValueError(
            "an infinite component family requires f_bound to certify the tail"
        )
    a_theta = sum(math.exp(th * t) for t in casc.template)
    q = casc.ratio * math.exp(-th * casc.depth_step)
    if q >= 1.0:
        raise SeriesDivergenceError("projected measure has infinite total weight")
    for k in range(casc.start, casc.start + max_components):
        offset = -k * casc.depth_step
        term = 0.0
        for t in casc.template:
            x = t + offset
            if x == 0.0:
                continue
            fx = f(x)
            if fx < 0:
                raise ValueError(f"f must be non-negative, got f({x}) = {fx}")
            term += fx * math.exp(th * x)
        total += casc.weight(k) * term
        tail = f_bound * a_theta * casc.base_weight * q ** (k + 1) / (1.0 - q)
        if tail <= rel_tol * abs(total) or tail <= 1e-300:
            return total
    raise SeriesDivergenceError("tail bound not achieved within the component budget")


def projected_atoms(
    triple: CharacteristicTriple, *, above: float | None = None
) -> tuple[tuple[float, float], ...]:
    """The spine Lévy measure as explicit (rate, jump size) atoms.

    With ``above = -n`` only atoms strictly above -n are returned, which
    is finite even for a cascade.  Without a floor the spec must be
    finite.
    """
    th = triple.theta.value
    out: list[tuple[float, float]] = []
    for comp in triple.lam.components:
        for x in comp.measure:
            if x == 0.0 or (above is not None and x <= above):
                continue
            out.append((comp.weight * math.exp(th * x), x))
    casc = triple.lam.cascade
    if casc is not None:
        if above is None:
            raise ValueError("cannot enumerate the atoms of an infinite family")
        for k in casc.indices_with_top_atom_at_least(math.nextafter(above, math.inf)):
            w = casc.weight(k)
            for t in casc.template:
                x = t - k * casc.depth_step
                if x == 0.0 or x <= above:
                    continue
                out.append((w * math.exp(th * x), x))
    return tuple(out)


def projected_tail_mass(triple: CharacteristicTriple, n: float) -> float:
    """lambda((-inf, -n]): spine jump mass at depth n or below (closed form)."""
    if not n > 0:
        raise ValueError("level must be positive")
    th = triple.theta.value
    total = 0.0
    for comp in triple.lam.components:
        for x in comp.measure:
            if x != 0.0 and x <= -n:
                total += comp.weight * math.exp(th * x)
    casc = triple.lam.cascade
    if casc is not None:
        live = casc.indices_with_top_atom_at_least(math.nextafter(-n, math.inf))
        for k in live:
            w = casc.weight(k)
            for t in casc.template:
                x = t - k * casc.depth_step
                if x != 0.0 and x <= -n:
                    total += w * math.exp(th * x)
        # beyond the live range every atom is <= -n
        total += abs(casc.weighted_atom_sum(complex(th), live.stop))
    return total


# ---------------------------------------------------------------------------
# support criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportReport:
    """Outcome of the R_- support criterion, one flag per condition."""

    no_upward_motion: bool          # sigma2 = 0 and no mass with x_1 > 0
    finite_variation: SeriesValue   # integral of 1 ^ |x_1|
    drift_value: float              # pathwise drift of the spine
    nonpositive_drift: bool

    @property
    def supported(self) -> bool | None:
        if self.finite_variation.status == UNKNOWN:
            return None
        return (
            self.no_upward_motion
            and self.finite_variation.finite
            and self.nonpositive_drift
        )


def check_support_negative(triple: CharacteristicTriple) -> SupportReport:
    """Decide whether every atom of the process stays in (-inf, 0].

    The three conditions: no Gaussian part and no component with a
    positive top atom; finite variation of the top-atom jumps; and a
    non-positive pathwise spine drift ``a - integral of x_1 1{x_1 > -1}``.
    """
    flag1 = triple.sigma2 == 0.0 and mass_top_atom_positive(triple.lam) == 0.0
    fv = integral_one_wedge_abs(triple.lam)
    drift = triple.a - integral_x1_above(triple.lam, -1.0)
    return SupportReport(
        no_upward_motion=flag1,
        finite_variation=fv,
        drift_value=drift,
        nonpositive_drift=drift <= 0.0,
    )


# ---------------------------------------------------------------------------
# structured-text configuration schema
# ---------------------------------------------------------------------------


def lambda_spec_from_dict(data: dict) -> LambdaSpec:
    comps = tuple(
        LambdaComponent(float(c["weight"]), RankedPointMeasure(c["atoms"]))
        for c in data.get("components", ())
    )
    casc = None
    if "geometric_cascade" in data:
        g = data["geometric_cascade"]
        casc = GeometricCascade(
            base_weight=float(g["base_weight"]),
            ratio=float(g["ratio"]),
            template=RankedPointMeasure(g["atom_template"]),
            depth_step=float(g.get("depth_step", 1.0)),
            start=int(g.get("start", 1)),
        )
    levels = data.get("declared_levels")
    return LambdaSpec(
        components=comps,
        cascade=casc,
        declared_levels=tuple(float(x) for x in levels) if levels is not None else None,
    )


def triple_from_dict(data: dict) -> CharacteristicTriple:
    return CharacteristicTriple(
        sigma2=float(data.get("sigma2", 0.0)),
        a=float(data.get("a", 0.0)),
        lam=lambda_spec_from_dict(data.get("lambda", {})),
        theta=Theta(float(data.get("theta", 0.0))),
    )
