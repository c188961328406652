"""Exact event-driven simulation of finite-birth branching Lévy processes.

A particle lives an exponential lifetime, moves by its Lévy motion
sampled exactly at event and observation times, and at death begets
children displaced by a draw from the offspring law (the empty draw is
a pure death).  Coupled truncation levels are obtained by pruning one
master forest, never by re-simulation, so the monotone coupling holds
atom for atom and not merely in distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from .genealogy import (
    BRANCH,
    JUMP,
    KILLED,
    ROOT,
    GenealogyForest,
    ParticleRecord,
    TrajectoryEvent,
    UlamLabel,
    snapshot,
)
from .levy_measure import CharacteristicTriple, FiniteBirthParams, decompose
from .levy_kernel import pathwise_drift, sample_path
from .point_measure import RankedPointMeasure, superpose, translate


class ParticleBudgetError(RuntimeError):
    """The particle count exceeded the configured safety cap."""

    def __init__(self, limit: int):
        super().__init__(
            f"particle budget of {limit} exceeded; the model is likely "
            f"supercritical over this horizon"
        )
        self.limit = limit


@dataclass(frozen=True)
class SimulationConfig:
    """What to simulate: model, horizon, observation grid, seed, budget."""

    horizon: float
    observation_times: tuple[float, ...] = ()
    seed: int = 0
    max_particles: int = 1_000_000
    params: FiniteBirthParams | None = None
    triple: CharacteristicTriple | None = None
    level: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive")
        if self.max_particles <= 0:
            raise ValueError("max_particles must be positive")
        if any(not 0.0 <= t <= self.horizon for t in self.observation_times):
            raise ValueError("observation times must lie within [0, horizon]")
        if tuple(sorted(self.observation_times)) != self.observation_times:
            raise ValueError("observation times must be sorted")
        if (self.params is None) == (self.triple is None):
            raise ValueError("give exactly one of params or triple")
        if self.triple is not None and self.level is None:
            if self.triple.lam.identity_level() is None:
                raise ValueError("an infinite measure needs an explicit truncation level")

    def resolve_params(self) -> FiniteBirthParams:
        if self.params is not None:
            return self.params
        level = self.level if self.level is not None else self.triple.lam.identity_level()
        return decompose(self.triple, level)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic independent stream for a replica index (or any key)."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *key]))


def simulate_finite(config: SimulationConfig, rng: np.random.Generator | None = None) -> GenealogyForest:
    """Simulate one forest of the finite-birth process on [0, horizon].

    The root is born at time 0 at the origin.  Identical seed and config
    reproduce the forest bit for bit: particles are processed in
    chronological birth order with label tie-breaks, and all random
    draws happen in a fixed order within each particle's life.
    """
    params = config.resolve_params()
    if rng is None:
        rng = substream(config.seed)
    return _simulate(params, config.horizon, config.observation_times, rng, config.max_particles)


def _simulate(
    params: FiniteBirthParams,
    horizon: float,
    obs: tuple[float, ...],
    rng: np.random.Generator,
    max_particles: int,
) -> GenealogyForest:
    motion = params.motion
    beta = params.beta
    records: dict[UlamLabel, ParticleRecord] = {}
    pending: list[tuple[float, UlamLabel, float, float]] = [(0.0, ROOT, 0.0, 0.0)]
    created = 1

    while pending:
        birth, label, x0, disp = heappop(pending)
        lifetime = rng.exponential(1.0 / beta) if beta > 0 else math.inf
        death_candidate = birth + lifetime
        window_end = min(death_candidate, horizon)

        knot_times = [birth]
        knot_pos = [x0]
        events: list[TrajectoryEvent] = []
        killed_at = None
        if window_end > birth:
            marks = tuple(m for m in obs if birth < m <= window_end)
            path = sample_path(motion, birth, window_end, marks, rng)
            killed_at = path.killed_at
            pos_at = {}
            for tt, vv in zip(path.times, path.values):
                pos = x0 + vv
                knot_times.append(tt)
                knot_pos.append(pos)
                pos_at[tt] = pos
            for tt, size in path.jumps:
                events.append(TrajectoryEvent(tt, JUMP, size, pos_at[tt]))

        end_pos = knot_pos[-1]
        n_children = 0
        if killed_at is not None:
            death, kind = killed_at, KILLED
            events.append(TrajectoryEvent(killed_at, KILLED, 0.0, end_pos))
        elif death_candidate <= horizon:
            death, kind = death_candidate, BRANCH
            offspring = params.rho.sample(rng)
            n_children = len(offspring)
            events.append(TrajectoryEvent(death_candidate, BRANCH, 0.0, end_pos))
            created += n_children
            if created > max_particles:
                raise ParticleBudgetError(max_particles)
            for j, delta in enumerate(offspring.atoms, start=1):
                heappush(pending, (death_candidate, label + (j,), end_pos + delta, delta))
        else:
            death, kind = math.inf, "alive"

        records[label] = ParticleRecord(
            label=label,
            birth_time=birth,
            death_time=death,
            birth_position=x0,
            displacement=disp,
            death_kind=kind,
            events=tuple(events),
            knot_times=tuple(knot_times),
            knot_positions=tuple(knot_pos),
            n_children=n_children,
        )

    return GenealogyForest(
        records=records,
        horizon=horizon,
        drift=pathwise_drift(motion),
        observation_times=obs,
    )


# ---------------------------------------------------------------------------
# pruning: nested truncation coupling and censoring
# ---------------------------------------------------------------------------


def _prune(forest: GenealogyForest, survives) -> GenealogyForest:
    """Rebuild the forest keeping only jumps/displacements that survive.

    A particle dies at its first non-surviving motion jump (subtree
    removed); children with non-surviving birth displacements vanish
    with their subtrees.  A branch event left with a single surviving
    child is relabelled as a plain jump of the continuing particle, so
    the output is again a well-formed finite-birth forest.
    """
    out: dict[UlamLabel, ParticleRecord] = {}
    if ROOT not in forest.records:
        return GenealogyForest({}, forest.horizon, forest.drift, forest.observation_times)

    # (original label, new label, new displacement)
    work: list[tuple[UlamLabel, UlamLabel, float]] = [(ROOT, ROOT, 0.0)]
    while work:
        orig, new_label, disp = work.pop()
        first = forest.records[orig]
        birth, birth_pos = first.birth_time, first.birth_position
        knot_t: list[float] = []
        knot_p: list[float] = []
        events: list[TrajectoryEvent] = []
        cur = orig

        while True:
            rec = forest.records[cur]
            cut = None
            for ev in rec.events:
                if ev.kind == JUMP and not survives(ev.size):
                    cut = ev.time
                    break
            if cut is not None:
                for kt, kp in zip(rec.knot_times, rec.knot_positions):
                    if kt >= cut:
                        break
                    knot_t.append(kt)
                    knot_p.append(kp)
                for ev in rec.events:
                    if ev.time >= cut:
                        break
                    events.append(ev)
                events.append(TrajectoryEvent(cut, KILLED, 0.0, knot_p[-1]))
                death, kind, n_children = cut, KILLED, 0
                break

            knot_t.extend(rec.knot_times)
            knot_p.extend(rec.knot_positions)
            events.extend(ev for ev in rec.events if ev.kind == JUMP)

            if rec.death_kind == KILLED:
                events.append(rec.events[-1])
                death, kind, n_children = rec.death_time, KILLED, 0
                break
            if rec.death_kind == "alive":
                death, kind, n_children = math.inf, "alive", 0
                break

            # branch event: examine the children
            kids = [forest.records[cur + (j,)] for j in range(1, rec.n_children + 1)]
            alive_kids = [kid for kid in kids if survives(kid.displacement)]
            if len(alive_kids) == 1:
                kid = alive_kids[0]
                if kid.displacement != 0.0:
                    events.append(
                        TrajectoryEvent(kid.birth_time, JUMP, kid.displacement, kid.birth_position)
                    )
                cur = kid.label
                continue
            if not alive_kids:
                if rec.n_children == 0:
                    # a genuine empty offspring draw stays a branch event
                    events.append(rec.events[-1])
                    death, kind, n_children = rec.death_time, BRANCH, 0
                else:
                    events.append(TrajectoryEvent(rec.death_time, KILLED, 0.0, knot_p[-1]))
                    death, kind, n_children = rec.death_time, KILLED, 0
                break
            events.append(rec.events[-1])
            death, kind, n_children = rec.death_time, BRANCH, len(alive_kids)
            for j, kid in enumerate(alive_kids, start=1):
                work.append((kid.label, new_label + (j,), kid.displacement))
            break

        out[new_label] = ParticleRecord(
            label=new_label,
            birth_time=birth,
            death_time=death,
            birth_position=birth_pos,
            displacement=disp,
            death_kind=kind,
            events=tuple(events),
            knot_times=tuple(knot_t),
            knot_positions=tuple(knot_p),
            n_children=n_children,
        )

    return GenealogyForest(
        records=out,
        horizon=forest.horizon,
        drift=forest.drift,
        observation_times=forest.observation_times,
    )


def simulate_nested(
    config: SimulationConfig,
    levels: tuple[float, ...],
    rng: np.random.Generator | None = None,
) -> dict[float, GenealogyForest]:
    """One coupled realization of the process at several truncation levels.

    One forest is simulated at the largest level; each smaller level n
    results from it by killing a particle at its first motion jump
    strictly below -n and deleting children born at displacement
    strictly below -n, with the single-survivor relabelling applied.
    """
    if config.triple is None:
        raise ValueError("nested simulation needs a characteristic triple")
    if not levels:
        raise ValueError("need at least one level")
    levels = tuple(sorted(set(levels)))
    for n in levels:
        config.triple.lam.check_level(n)
    top = levels[-1]
    params = decompose(config.triple, top)
    if rng is None:
        rng = substream(config.seed)
    forest_top = _simulate(
        params, config.horizon, config.observation_times, rng, config.max_particles
    )
    out = {top: forest_top}
    for n in levels[:-1]:
        out[n] = _prune(forest_top, lambda size: size >= -n)
    return {n: out[n] for n in levels}


def censor(forest: GenealogyForest, n: float) -> GenealogyForest:
    """Remove every particle whose ancestral trajectory jumps by -n or deeper.

    The survival indicator is strict (jumps must stay > -n), so a jump
    of exactly -n removes the particle and its descent.
    """
    if not n > 0:
        raise ValueError("censoring level must be positive")
    return _prune(forest, lambda size: size > -n)


# ---------------------------------------------------------------------------
# one-step branching convolution and skeletons
# ---------------------------------------------------------------------------


def branching_convolution(
    start: RankedPointMeasure,
    one_step,
    rng: np.random.Generator,
) -> RankedPointMeasure:
    """One branching step: independent offspring translated by the start atoms.

    ``one_step`` is either a callable ``rng -> RankedPointMeasure`` or an
    object with a ``sample(rng)`` method.
    """
    draw = one_step.sample if hasattr(one_step, "sample") else one_step
    return superpose([translate(draw(rng), x) for x in start])


def skeleton(forest: GenealogyForest, step: float) -> list[RankedPointMeasure]:
    """Snapshots on the grid 0, step, 2*step, ..., horizon."""
    if not step > 0:
        raise ValueError("step must be positive")
    m = forest.horizon / step
    if abs(m - round(m)) > 1e-9:
        raise ValueError(f"step {step} does not divide the horizon {forest.horizon}")
    return [snapshot(forest, k * step)[0] for k in range(int(round(m)) + 1)]
