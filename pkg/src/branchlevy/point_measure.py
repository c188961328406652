"""Ranked point measures on [-inf, inf).

A point measure is identified with the non-increasing sequence of its
atoms.  Only finitely many atoms are ever materialized; the sequence is
conceptually extended by -inf (the cemetery) beyond its stored length,
and atoms at -inf are never stored.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Theta:
    """Non-negative tilt exponent with its exponential weight function."""

    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"tilt exponent must be finite and >= 0, got {self.value!r}")

    def weight(self, x: float) -> float:
        """exp(theta * x); zero at the cemetery -inf."""
        if x == NEG_INF:
            return 0.0
        return math.exp(self.value * x)

    def __float__(self) -> float:
        return self.value


def as_theta(theta: Theta | float) -> Theta:
    return theta if isinstance(theta, Theta) else Theta(float(theta))


class RankedPointMeasure:
    """Finite point measure stored as a non-increasing tuple of atoms.

    Equal atoms keep their insertion order (the stable sort never swaps
    ties), so the stored tuple is a function of the input multiset plus
    insertion order; all measure-level semantics depend on the multiset
    only.
    """

    __slots__ = ("_atoms",)

    def __init__(self, atoms: Iterable[float] = ()):
        cleaned = []
        for a in atoms:
            a = float(a)
            if a == NEG_INF:
                continue  # cemetery atoms are discarded
            if not math.isfinite(a):
                raise ValueError(f"atom must be finite or -inf, got {a!r}")
            cleaned.append(a)
        object.__setattr__(self, "_atoms", tuple(sorted(cleaned, reverse=True)))

    @property
    def atoms(self) -> tuple[float, ...]:
        return self._atoms

    def atom(self, i: int) -> float:
        """i-th ranked atom (0-based); -inf beyond the stored length."""
        if 0 <= i < len(self._atoms):
            return self._atoms[i]
        return NEG_INF

    def tail_count(self, x: float) -> int:
        """Number of atoms strictly above x."""
        return sum(1 for a in self._atoms if a > x)

    def __len__(self) -> int:
        return len(self._atoms)

    def __iter__(self):
        return iter(self._atoms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankedPointMeasure):
            return NotImplemented
        return self._atoms == other._atoms

    def __hash__(self) -> int:
        return hash(self._atoms)

    def __repr__(self) -> str:
        return f"RankedPointMeasure({list(self._atoms)!r})"

    def __setattr__(self, name, value):
        raise AttributeError("RankedPointMeasure is immutable")

    # -- serialization (one measure per line, comma separated atoms) --

    def to_line(self) -> str:
        return ",".join(repr(a) for a in self._atoms)

    @classmethod
    def from_line(cls, line: str) -> "RankedPointMeasure":
        line = line.strip()
        if not line:
            return EMPTY
        return cls(float(tok) for tok in line.split(","))


EMPTY = RankedPointMeasure()


def translate(mu: RankedPointMeasure, y: float) -> RankedPointMeasure:
    """Shift every atom by y; translating by -inf empties the measure."""
    if y == NEG_INF:
        return EMPTY
    if not math.isfinite(y):
        raise ValueError(f"shift must be finite or -inf, got {y!r}")
    if y == 0.0:
        return mu
    return RankedPointMeasure(a + y for a in mu)


def weighted_integral(
    mu: RankedPointMeasure,
    theta: Theta | float,
    f: Callable[[float], float],
) -> float:
    """Sum of exp(theta*x) * f(x) over the atoms; 0 for the empty measure.

    Raises OverflowError whenever the result fails to be finite, which
    signals an ill-scaled model rather than silently returning inf.
    """
    th = as_theta(theta)
    total = 0.0
    try:
        for a in mu:
            total += th.weight(a) * f(a)
    except OverflowError:
        raise OverflowError(
            f"exponential weight overflow at theta={th.value}, atoms={mu.atoms}"
        ) from None
    if not math.isfinite(total):
        raise OverflowError(
            f"non-finite weighted integral for theta={th.value}, atoms={mu.atoms}"
        )
    return total


def truncate(mu: RankedPointMeasure, n: float) -> RankedPointMeasure:
    """Restrict to [-n, inf); atoms exactly at -n are kept."""
    if not n > 0:
        raise ValueError(f"truncation level must be positive, got {n!r}")
    kept = tuple(a for a in mu if a >= -n)
    if len(kept) == len(mu):
        return mu
    return RankedPointMeasure(kept)


def superpose(measures: Sequence[RankedPointMeasure]) -> RankedPointMeasure:
    """Multiset union of the atoms of finitely many measures."""
    atoms: list[float] = []
    for m in measures:
        atoms.extend(m.atoms)
    return RankedPointMeasure(atoms)
