"""Killed Lévy particle motion with finite-activity jumps.

The motion of a single particle is a Brownian component plus drift plus
finitely many independent compound-Poisson jump streams, optionally
killed at a constant rate.  Everything is sampled exactly at event and
observation times; no time discretization is involved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

class UnsupportedJumpFamily(ValueError):
    """Raised when a jump law lacks the closed form an operation needs."""


# ---------------------------------------------------------------------------
# jump-size families
# ---------------------------------------------------------------------------


class JumpLaw:
    """Interface shared by the built-in jump-size families.

    Each family exposes exact analytic quantities (exponential moments,
    the Lévy–Khintchine compensation integral, tail masses) next to its
    sampler, so that simulated paths can be checked against closed
    forms without numerical integration.
    """

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.array([self.sample(rng) for _ in range(n)])

    def exp_moment(self, z: complex) -> complex:
        """E[exp(z * X)] where defined; raises UnsupportedJumpFamily outside."""
        raise NotImplementedError

    def compensation(self) -> float:
        """E[X * 1{|X| < 1}] (strict inequality)."""
        raise NotImplementedError

    def mass_at_most(self, c: float) -> float:
        """P(X <= c)."""
        raise NotImplementedError

    def restrict_above(self, c: float) -> "JumpLaw | None":
        """Law of X conditioned on X > c; None when that event is null."""
        raise NotImplementedError


@dataclass(frozen=True)
class PointMassJump(JumpLaw):
    """Deterministic jump of a fixed non-zero size."""

    size: float

    def __post_init__(self):
        if not math.isfinite(self.size) or self.size == 0.0:
            raise ValueError(f"jump size must be finite and non-zero, got {self.size!r}")

    def sample(self, rng):
        return self.size

    def sample_n(self, rng, n):
        return np.full(n, self.size)

    def exp_moment(self, z):
        return cmath.exp(z * self.size)

    def compensation(self):
        return self.size if abs(self.size) < 1.0 else 0.0

    def mass_at_most(self, c):
        return 1.0 if self.size <= c else 0.0

    def restrict_above(self, c):
        return self if self.size > c else None


@dataclass(frozen=True)
class ExponentialJump(JumpLaw):
    """One-sided exponential tail: |X| ~ Exp(mean=scale), signed."""

    scale: float
    negative: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def sample(self, rng):
        x = rng.exponential(self.scale)
        return -x if self.negative else x

    def sample_n(self, rng, n):
        x = rng.exponential(self.scale, size=n)
        return -x if self.negative else x

    def exp_moment(self, z):
        m = self.scale
        if self.negative:
            if z.real <= -1.0 / m:
                raise UnsupportedJumpFamily(f"E[e^(zX)] diverges for Re z <= {-1 / m}")
            return 1.0 / (1.0 + z * m)
        if z.real >= 1.0 / m:
            raise UnsupportedJumpFamily(f"E[e^(zX)] diverges for Re z >= {1 / m}")
        return 1.0 / (1.0 - z * m)

    def compensation(self):
        m = self.scale
        val = m - (m + 1.0) * math.exp(-1.0 / m)  # integral of x density over (0, 1)
        return -val if self.negative else val

    def mass_at_most(self, c):
        if self.negative:
            # P(-E <= c) = P(E >= -c)
            return 1.0 if c >= 0 else math.exp(c / self.scale)
        return 0.0 if c <= 0 else 1.0 - math.exp(-c / self.scale)

    def restrict_above(self, c):
        if self.negative:
            if c >= 0:
                return None
            return TruncatedExponentialJump(self.scale, cap=-c)
        return self if c <= 0 else None


@dataclass(frozen=True)
class TruncatedExponentialJump(JumpLaw):
    """Negative exponential jump conditioned on magnitude below cap."""

    scale: float
    cap: float

    def __post_init__(self):
        if not (self.scale > 0 and self.cap > 0):
            raise ValueError("scale and cap must be positive")

    @property
    def _trunc_mass(self) -> float:
        return -math.expm1(-self.cap / self.scale)  # P(E < cap)

    def sample(self, rng):
        u = rng.random()
        return self.scale * math.log1p(-u * self._trunc_mass)  # <= 0

    def sample_n(self, rng, n):
        u = rng.random(size=n)
        return self.scale * np.log1p(-u * self._trunc_mass)

    def exp_moment(self, z):
        m, b = self.scale, self.cap
        w = z + 1.0 / m
        if abs(w) < 1e-12:
            return (b / m) / self._trunc_mass
        return (1.0 - cmath.exp(-b * w)) / (m * w) / self._trunc_mass

    def compensation(self):
        m = self.scale
        c = min(self.cap, 1.0)
        val = m - (m + c) * math.exp(-c / m)  # integral of x density over (0, c)
        return -val / self._trunc_mass

    def mass_at_most(self, c):
        if c >= 0:
            return 1.0
        if c <= -self.cap:
            return 0.0
        return (math.exp(c / self.scale) - math.exp(-self.cap / self.scale)) / self._trunc_mass

    def restrict_above(self, c):
        if c >= 0:
            return None
        if -c >= self.cap:
            return self
        return TruncatedExponentialJump(self.scale, cap=-c)


@dataclass(frozen=True)
class UniformJump(JumpLaw):
    """Jump uniform on [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"need lo < hi, got {self.lo!r}, {self.hi!r}")

    def sample(self, rng):
        return rng.uniform(self.lo, self.hi)

    def sample_n(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    def exp_moment(self, z):
        if z == 0:
            return 1.0 + 0.0j
        return (cmath.exp(z * self.hi) - cmath.exp(z * self.lo)) / (z * (self.hi - self.lo))

    def compensation(self):
        a = max(self.lo, -1.0)
        b = min(self.hi, 1.0)
        if b <= a:
            return 0.0
        return (b * b - a * a) / (2.0 * (self.hi - self.lo))

    def mass_at_most(self, c):
        if c <= self.lo:
            return 0.0
        if c >= self.hi:
            return 1.0
        return (c - self.lo) / (self.hi - self.lo)

    def restrict_above(self, c):
        if c >= self.hi:
            return None
        if c <= self.lo:
            return self
        return UniformJump(c, self.hi)


# ---------------------------------------------------------------------------
# motion specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MotionSpec:
    """Characteristics (sigma^2, a', nu) of the particle motion plus a kill rate.

    ``jumps`` is a finite-activity representation of the Lévy measure: a
    list of (rate, jump-size law) pairs.  The kill rate is kept apart
    from the characteristic exponent; killing acts multiplicatively in
    every identity that involves it.
    """

    sigma2: float = 0.0
    drift: float = 0.0
    jumps: tuple[tuple[float, JumpLaw], ...] = ()
    kill_rate: float = 0.0

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if self.kill_rate < 0:
            raise ValueError("kill_rate must be >= 0")
        for rate, law in self.jumps:
            if not rate > 0:
                raise ValueError(f"jump rate must be > 0, got {rate!r}")
            if not isinstance(law, JumpLaw):
                raise TypeError(f"not a jump law: {law!r}")

    @property
    def total_jump_rate(self) -> float:
        return sum(rate for rate, _ in self.jumps)


def log_mgf(spec: MotionSpec, z: complex) -> complex:
    """Lévy–Khintchine exponent at complex argument: log E[exp(z * X_1)].

    Equals ``sigma2/2 z^2 + a' z + sum rate*(E e^(zJ) - 1 - z E[J 1{|J|<1}])``;
    the kill rate is not included.
    """
    out = 0.5 * spec.sigma2 * z * z + spec.drift * z
    for rate, law in spec.jumps:
        out += rate * (law.exp_moment(z) - 1.0 - z * law.compensation())
    return out


def phi(spec: MotionSpec, r: float) -> complex:
    """Characteristic exponent at real frequency r: E e^(ir X_t) = e^(t phi(r))."""
    return log_mgf(spec, 1j * r)


def pathwise_drift(spec: MotionSpec) -> float:
    """Slope of the path between jumps.

    ``spec.drift`` is the Lévy–Khintchine coefficient of the compensated
    representation; with finite jump activity the path itself moves at
    ``drift - sum of rate * E[J 1{|J|<1}]`` between jump times.
    """
    return spec.drift - sum(rate * law.compensation() for rate, law in spec.jumps)


def uncompensated_motion(
    sigma2: float,
    slope: float,
    jumps: tuple[tuple[float, JumpLaw], ...],
    kill_rate: float = 0.0,
) -> MotionSpec:
    """Motion with a given pathwise slope and raw (uncompensated) jumps.

    Chooses the LK drift coefficient so that ``pathwise_drift`` of the
    result equals ``slope``; its characteristic exponent is then
    ``-sigma2/2 r^2 + i*slope*r + sum rate*(E e^(irJ) - 1)``.
    """
    comp = sum(rate * law.compensation() for rate, law in jumps)
    return MotionSpec(sigma2=sigma2, drift=slope + comp, jumps=jumps, kill_rate=kill_rate)


@dataclass(frozen=True)
class PathSample:
    """Exactly sampled motion over a window, relative to the start position.

    ``times`` are the absolute instants at which the value is known
    (jump times, requested marks, the window end); ``values`` are the
    right-continuous positions relative to the window start.  Nothing is
    recorded after ``killed_at``.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]
    jumps: tuple[tuple[float, float], ...]
    killed_at: float | None = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")
        if self.killed_at is not None and any(t > self.killed_at for t in self.times):
            raise ValueError("nothing may be recorded after the kill time")

    @property
    def increment(self) -> float:
        return self.values[-1] if self.values else 0.0


def sample_path(
    spec: MotionSpec,
    t0: float,
    t1: float,
    marks: tuple[float, ...],
    rng: np.random.Generator,
) -> PathSample:
    """Sample the killed motion on (t0, t1], recording values at the marks.

    The kill clock, the Poisson jump clocks and the Gaussian increments
    between consecutive recorded instants are drawn in a fixed order so
    that identical random streams reproduce identical paths.
    """
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    killed_at = None
    end = t1
    if spec.kill_rate > 0:
        k = t0 + rng.exponential(1.0 / spec.kill_rate)
        if k < t1:
            killed_at = k
            end = k

    events: list[tuple[float, float]] = []
    for rate, law in spec.jumps:
        n = rng.poisson(rate * (end - t0))
        if n:
            times = np.sort(rng.uniform(t0, end, size=n))
            sizes = law.sample_n(rng, n)
            events.extend(zip(times.tolist(), sizes.tolist()))
    events.sort()

    knot_times = sorted({t for t, _ in events} | {m for m in marks if t0 < m <= end} | {end})
    jump_at = {}
    for t, s in events:
        jump_at[t] = jump_at.get(t, 0.0) + s

    sig = math.sqrt(spec.sigma2) if spec.sigma2 > 0 else 0.0
    slope = pathwise_drift(spec)
    values = []
    pos = 0.0
    prev = t0
    for t in knot_times:
        dt = t - prev
        pos += slope * dt
        if sig > 0.0 and dt > 0.0:
            pos += rng.normal(0.0, sig * math.sqrt(dt))
        pos += jump_at.get(t, 0.0)
        values.append(pos)
        prev = t
    return PathSample(
        times=tuple(knot_times),
        values=tuple(values),
        jumps=tuple(events),
        killed_at=killed_at,
    )


def sample_increment(
    spec: MotionSpec,
    dt: float,
    rng: np.random.Generator,
) -> tuple[float, list[tuple[float, float]], float | None]:
    """One-shot increment over a duration dt.

    Returns ``(increment, jump_events, killed)`` where ``jump_events``
    lists (offset-in-dt, size) pairs so that callers can inspect the
    individual jump sizes, and ``killed`` is the kill offset when the
    exponential kill clock rings before dt.  Events after the kill are
    discarded and the increment is measured up to the kill time.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    path = sample_path(spec, 0.0, dt, (), rng)
    return path.increment, list(path.jumps), path.killed_at


def censor_spec(spec: MotionSpec, n: float) -> MotionSpec:
    """Restrict jumps to sizes strictly above -n; removed mass kills.

    The kill rate grows by the total rate of jumps of size <= -n, which
    mirrors censoring a particle at the first ancestral jump that deep.
    The path between jumps is unchanged by censoring, so the LK drift
    coefficient absorbs the compensation of the removed jump mass and
    the pathwise drift is preserved.
    """
    if not n > 0:
        raise ValueError("level must be positive")
    extra_kill = 0.0
    removed_comp = 0.0
    kept: list[tuple[float, JumpLaw]] = []
    for rate, law in spec.jumps:
        p = law.mass_at_most(-n)
        if p <= 0.0:
            kept.append((rate, law))
            continue
        extra_kill += rate * p
        removed_comp += rate * law.compensation()
        if p < 1.0:
            restricted = law.restrict_above(-n)
            if restricted is None:
                raise UnsupportedJumpFamily(f"{law!r} cannot be restricted above {-n}")
            kept.append((rate * (1.0 - p), restricted))
            removed_comp -= rate * (1.0 - p) * restricted.compensation()
    return MotionSpec(
        sigma2=spec.sigma2,
        drift=spec.drift - removed_comp,
        jumps=tuple(kept),
        kill_rate=spec.kill_rate + extra_kill,
    )
