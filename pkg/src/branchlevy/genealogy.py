"""Ulam-tree genealogies of simulated particle systems.

Particles are labelled by finite integer words: the empty word is the
ancestor and ``u + (j,)`` is the j-th child of ``u``.  The forest stores
one record per particle (birth, death, trajectory knots, typed events);
ranked partitions and ancestral trajectories are derived on demand from
the records, which remain the single source of truth.

Positions are exact at every recorded knot (event and observation
times).  Between knots the query functions interpolate with the motion
drift, which is exact whenever the Gaussian part vanishes.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .point_measure import RankedPointMeasure

UlamLabel = tuple[int, ...]
ROOT: UlamLabel = ()

JUMP = "jump"       # motion jump of the particle itself
BRANCH = "branch"   # death with simultaneous birth of children
KILLED = "killed"   # death without offspring


def format_label(label: UlamLabel) -> str:
    return ".".join(str(i) for i in label)


@dataclass(frozen=True)
class TrajectoryEvent:
    time: float
    kind: str
    size: float      # jump size; 0.0 for non-jump events
    position: float  # position right after the event


@dataclass(frozen=True)
class ParticleRecord:
    label: UlamLabel
    birth_time: float
    death_time: float            # math.inf when still alive at the horizon
    birth_position: float
    displacement: float          # birth shift relative to the parent (0 for the root)
    death_kind: str              # BRANCH, KILLED, or "alive"
    events: tuple[TrajectoryEvent, ...]
    knot_times: tuple[float, ...]
    knot_positions: tuple[float, ...]
    n_children: int = 0

    def __post_init__(self):
        if not self.birth_time < self.death_time:
            raise ValueError("a particle must die strictly after its birth")
        if not self.knot_times or self.knot_times[0] != self.birth_time:
            raise ValueError("the first trajectory knot must sit at the birth time")

    def alive_at(self, t: float) -> bool:
        return self.birth_time <= t < self.death_time

    def position_at(self, t: float, drift: float = 0.0) -> float:
        """Position at time t in [birth, death); exact at recorded knots."""
        i = bisect_right(self.knot_times, t) - 1
        if i < 0:
            raise ValueError(f"time {t} precedes the birth of {self.label}")
        return self.knot_positions[i] + drift * (t - self.knot_times[i])


@dataclass(frozen=True)
class RankedPartition:
    """Pairwise-disjoint blocks of 1-based ranks; empty blocks allowed."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if seen & b:
                raise ValueError("partition blocks must be pairwise disjoint")
            seen |= b

    def block_of(self, rank: int) -> int:
        """Index (0-based) of the block containing the given rank."""
        for i, b in enumerate(self.blocks):
            if rank in b:
                return i
        raise KeyError(f"rank {rank} belongs to no block")


@dataclass(frozen=True)
class GenealogyForest:
    records: dict[UlamLabel, ParticleRecord]
    horizon: float
    drift: float = 0.0
    observation_times: tuple[float, ...] = ()

    def __post_init__(self):
        for label in self.records:
            if label != ROOT and label[:-1] not in self.records:
                raise ValueError(f"parent of {label} is missing from the forest")

    def alive_labels(self, t: float) -> list[UlamLabel]:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        return [lab for lab, rec in self.records.items() if rec.alive_at(t)]


def snapshot(
    forest: GenealogyForest, t: float
) -> tuple[RankedPointMeasure, tuple[UlamLabel, ...]]:
    """Population at time t, ranked, with the rank -> label correspondence.

    Ties at equal positions are broken by lexicographic order of the
    Ulam labels, so the ranking is deterministic.
    """
    pairs = [
        (forest.records[lab].position_at(t, forest.drift), lab)
        for lab in forest.alive_labels(t)
    ]
    pairs.sort(key=lambda p: ((-p[0]), p[1]))
    measure = RankedPointMeasure(p[0] for p in pairs)
    return measure, tuple(p[1] for p in pairs)


def ancestor_label_at(forest: GenealogyForest, label: UlamLabel, s: float) -> UlamLabel:
    """The unique ancestor (or the particle itself) alive at time s."""
    for i in range(len(label), -1, -1):
        rec = forest.records.get(label[:i])
        if rec is not None and rec.alive_at(s):
            return label[:i]
    raise ValueError(f"no ancestor of {label} is alive at {s}")


def partition(forest: GenealogyForest, s: float, t: float) -> RankedPartition:
    """Blocks of time-t ranks descending from each time-s rank.

    Block j (1-based rank j at time s) collects the 1-based time-t ranks
    of all particles descending from, or equal to, the rank-j particle.
    """
    if not 0.0 <= s <= t <= forest.horizon:
        raise ValueError(f"need 0 <= s <= t <= horizon, got s={s}, t={t}")
    _, labels_s = snapshot(forest, s)
    _, labels_t = snapshot(forest, t)
    rank_of = {lab: i for i, lab in enumerate(labels_s)}
    blocks: list[set[int]] = [set() for _ in labels_s]
    for j, lab in enumerate(labels_t, start=1):
        anc = ancestor_label_at(forest, lab, s)
        blocks[rank_of[anc]].add(j)
    return RankedPartition(tuple(frozenset(b) for b in blocks))


def ancestor_position(forest: GenealogyForest, j: int, t: float, s: float) -> float:
    """Position at time s <= t of the ancestor of the rank-j particle at t."""
    if not 0.0 <= s <= t <= forest.horizon:
        raise ValueError(f"need 0 <= s <= t <= horizon, got s={s}, t={t}")
    _, labels_t = snapshot(forest, t)
    if not 1 <= j <= len(labels_t):
        raise IndexError(f"rank {j} out of range at time {t}")
    anc = ancestor_label_at(forest, labels_t[j - 1], s)
    return forest.records[anc].position_at(s, forest.drift)


@dataclass(frozen=True)
class AncestralPath:
    """Càdlàg ancestral trajectory on [0, t] assembled from the records."""

    times: tuple[float, ...]      # knot times, increasing
    positions: tuple[float, ...]  # right-continuous values at the knots
    jumps: tuple[tuple[float, float], ...]  # (time, size) of every discontinuity
    drift: float
    end_time: float

    def value(self, s: float) -> float:
        if not 0.0 <= s <= self.end_time:
            raise ValueError(f"time {s} outside [0, {self.end_time}]")
        i = bisect_right(self.times, s) - 1
        return self.positions[i] + self.drift * (s - self.times[i])

    def values(self, grid) -> list[float]:
        return [self.value(s) for s in grid]


def ancestral_trajectory(forest: GenealogyForest, j: int, t: float) -> AncestralPath:
    """Concatenated trajectory of the rank-j particle's ancestral line.

    Jump entries collect the ancestors' own motion jumps and every
    non-zero birth displacement along the line of descent, so censoring
    rules can inspect individual jump sizes.
    """
    if not 0.0 <= t <= forest.horizon:
        raise ValueError(f"time {t} outside [0, {forest.horizon}]")
    _, labels_t = snapshot(forest, t)
    if not 1 <= j <= len(labels_t):
        raise IndexError(f"rank {j} out of range at time {t}")
    label = labels_t[j - 1]

    knots: list[tuple[float, float]] = []
    jumps: list[tuple[float, float]] = []
    for i in range(len(label) + 1):
        rec = forest.records[label[:i]]
        if rec.birth_time > t:
            break
        if i > 0 and rec.displacement != 0.0:
            jumps.append((rec.birth_time, rec.displacement))
        for ev in rec.events:
            if ev.kind == JUMP and ev.time <= t and ev.size != 0.0:
                jumps.append((ev.time, ev.size))
        for kt, kp in zip(rec.knot_times, rec.knot_positions):
            if kt > t:
                break
            # on collisions (child born at the parent's death time) the
            # later segment wins: the path is right-continuous
            if knots and knots[-1][0] == kt:
                knots[-1] = (kt, kp)
            else:
                knots.append((kt, kp))
    return AncestralPath(
        times=tuple(k[0] for k in knots),
        positions=tuple(k[1] for k in knots),
        jumps=tuple(jumps),
        drift=forest.drift,
        end_time=t,
    )


def export_lines(forest: GenealogyForest) -> list[str]:
    """Line-oriented record dump: ``label;birth;death;kind;birth_pos;shift;events``.

    Events are ``kind:time:size:position`` joined by ``|``; records are
    sorted by label so repeated exports are byte-identical.
    """
    lines = []
    for label in sorted(forest.records):
        rec = forest.records[label]
        evs = "|".join(
            f"{e.kind}:{e.time!r}:{e.size!r}:{e.position!r}" for e in rec.events
        )
        lines.append(
            ";".join(
                (
                    format_label(label),
                    repr(rec.birth_time),
                    repr(rec.death_time),
                    rec.death_kind,
                    repr(rec.birth_position),
                    repr(rec.displacement),
                    evs,
                )
            )
        )
    return lines
