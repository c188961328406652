"""Event-driven simulator: exactness, coupling, censoring, convolution."""

import math
from collections import Counter

import numpy as np
import pytest

from branchlevy.genealogy import BRANCH, JUMP, snapshot
from branchlevy.levy_kernel import MotionSpec, PointMassJump
from branchlevy.levy_measure import (
    CharacteristicTriple,
    DiscreteOffspringLaw,
    FiniteBirthParams,
    LambdaSpec,
    DELTA_EMPTY,
)
from branchlevy.point_measure import EMPTY, RankedPointMeasure as RPM, Theta
from branchlevy.simulator import (
    ParticleBudgetError,
    SimulationConfig,
    branching_convolution,
    censor,
    simulate_finite,
    simulate_nested,
    skeleton,
    substream,
)

STILL = FiniteBirthParams(motion=MotionSpec(), beta=0.0, rho=DELTA_EMPTY)
YULE = FiniteBirthParams(
    motion=MotionSpec(),
    beta=1.0,
    rho=DiscreteOffspringLaw(((1.0, RPM([0.0, 0.0])),)),
)


def triple_of(*comps, sigma2=0.0, a=0.0, theta=0.0):
    return CharacteristicTriple(
        sigma2=sigma2,
        a=a,
        lam=LambdaSpec.from_weighted(*((w, RPM(atoms)) for w, atoms in comps)),
        theta=Theta(theta),
    )


class TestSimulateFinite:
    def test_never_branching_still_particle(self):
        cfg = SimulationConfig(horizon=2.0, observation_times=(0.5, 2.0), params=STILL)
        forest = simulate_finite(cfg)
        assert set(forest.records) == {()}
        root = forest.records[()]
        assert root.death_time == math.inf and root.death_kind == "alive"
        for t in (0.0, 0.5, 1.3, 2.0):
            assert snapshot(forest, t)[0].atoms == (0.0,)

    def test_pure_drift_position_exact(self):
        params = FiniteBirthParams(motion=MotionSpec(drift=1.0), beta=0.0, rho=DELTA_EMPTY)
        cfg = SimulationConfig(horizon=1.0, observation_times=(0.7,), params=params)
        forest = simulate_finite(cfg)
        assert snapshot(forest, 0.7)[0].atoms == (0.7,)

    def test_time_zero_is_dirac_at_origin(self):
        cfg = SimulationConfig(horizon=1.0, seed=3, params=YULE)
        forest = simulate_finite(cfg)
        assert snapshot(forest, 0.0)[0].atoms == (0.0,)

    def test_yule_mean_population(self):
        cfg = SimulationConfig(horizon=1.0, observation_times=(1.0,), params=YULE)
        n = 20_000
        counts = np.array(
            [len(snapshot(simulate_finite(cfg, substream(17, 0, i)), 1.0)[0]) for i in range(n)]
        )
        se = counts.std(ddof=1) / math.sqrt(n)
        assert abs(counts.mean() - math.e) <= 3 * se

    def test_reproducible_bit_identical(self):
        lam = triple_of((1.0, [0.2, -0.3]), sigma2=0.5, a=-0.1)
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(0.5, 1.0), seed=99, triple=lam
        )
        assert simulate_finite(cfg) == simulate_finite(cfg)

    def test_budget_abort(self):
        fast = FiniteBirthParams(
            motion=MotionSpec(),
            beta=30.0,
            rho=DiscreteOffspringLaw(((1.0, RPM([0.0, 0.0])),)),
        )
        cfg = SimulationConfig(horizon=2.0, params=fast, max_particles=50, seed=1)
        with pytest.raises(ParticleBudgetError):
            simulate_finite(cfg)

    def test_motion_kill_removes_without_offspring(self):
        params = FiniteBirthParams(
            motion=MotionSpec(kill_rate=2.0), beta=0.0, rho=DELTA_EMPTY
        )
        cfg = SimulationConfig(horizon=1.0, observation_times=(1.0,), params=params)
        n = 20_000
        alive = sum(
            len(snapshot(simulate_finite(cfg, substream(5, 0, i)), 1.0)[0])
            for i in range(n)
        )
        p = math.exp(-2.0)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(alive / n - p) <= 3 * se

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimulationConfig(horizon=0.0, params=STILL)
        with pytest.raises(ValueError):
            SimulationConfig(horizon=1.0, observation_times=(2.0,), params=STILL)
        with pytest.raises(ValueError):
            SimulationConfig(horizon=1.0)  # neither params nor triple


class TestNested:
    def test_nothing_to_prune_identical(self):
        triple = triple_of((1.0, [0.0, -1.0]))
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(0.5, 1.0), seed=4, triple=triple, level=5.0
        )
        forests = simulate_nested(cfg, (1.0, 5.0))
        assert forests[1.0] == forests[5.0]

    def test_threshold_prunes_deep_child(self):
        # single branch event: children at 0 and -3
        triple = triple_of((4.0, [0.0, -3.0]))
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(1.0,), seed=8, triple=triple, level=5.0
        )
        forests = simulate_nested(cfg, (2.0, 5.0))
        for t in (1.0,):
            deep = snapshot(forests[5.0], t)[0]
            shallow = snapshot(forests[2.0], t)[0]
            assert not (Counter(shallow.atoms) - Counter(deep.atoms))
            if any(a <= -3.0 for a in deep.atoms):
                assert len(shallow) < len(deep)

    def test_single_survivor_becomes_plain_jump(self):
        # offspring {0.5, -5}: at level 2 the deep child dies and the
        # branch event must turn into a motion jump of the survivor
        triple = triple_of((3.0, [0.5, -5.0]))
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(1.0,), seed=21, triple=triple, level=6.0
        )
        forests = simulate_nested(cfg, (2.0, 6.0))
        big, small = forests[6.0], forests[2.0]
        # the survivor is always the rank-1 child, so the kept line in the
        # big forest is the all-ones chain; each of its branch events must
        # reappear as a plain jump of the single merged particle
        chain_branches = sum(
            rec.death_kind == BRANCH
            for lab, rec in big.records.items()
            if all(i == 1 for i in lab)
        )
        assert chain_branches > 0
        assert set(small.records) == {()}
        root = small.records[()]
        assert all(ev.kind != BRANCH for ev in root.events)
        jumps = [ev for ev in root.events if ev.kind == JUMP]
        assert len(jumps) == chain_branches
        assert all(ev.size == 0.5 for ev in jumps)
        # positions coincide with the surviving line of the big forest
        assert not (
            Counter(snapshot(small, 1.0)[0].atoms)
            - Counter(snapshot(big, 1.0)[0].atoms)
        )

    def test_monotone_inclusion_exact(self):
        triple = triple_of(
            (0.5, [-0.5, -3.0]), (0.4, [0.0, -7.0]), (0.6, [-3.0]), a=0.05
        )
        times = tuple(i / 8 for i in range(9))
        cfg = SimulationConfig(
            horizon=1.0, observation_times=times, seed=0, triple=triple, level=10.0
        )
        levels = (1.0, 5.0, 10.0)
        for rep in range(100):
            forests = simulate_nested(cfg, levels, substream(31, 0, rep))
            for lo, hi in ((1.0, 5.0), (5.0, 10.0), (1.0, 10.0)):
                for t in times:
                    small = Counter(snapshot(forests[lo], t)[0].atoms)
                    big = Counter(snapshot(forests[hi], t)[0].atoms)
                    assert not (small - big)

    def test_weighted_mass_monotone_in_level(self):
        triple = triple_of((0.7, [-0.2, -2.5]), (0.5, [-4.0]), theta=0.3)
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(1.0,), seed=2, triple=triple, level=8.0
        )
        th = 0.3
        for rep in range(50):
            forests = simulate_nested(cfg, (1.0, 3.0, 8.0), substream(13, 0, rep))
            masses = [
                sum(math.exp(th * x) for x in snapshot(forests[n], 1.0)[0])
                for n in (1.0, 3.0, 8.0)
            ]
            assert masses[0] <= masses[1] + 1e-12 and masses[1] <= masses[2] + 1e-12

    def test_requires_triple(self):
        cfg = SimulationConfig(horizon=1.0, params=YULE)
        with pytest.raises(ValueError):
            simulate_nested(cfg, (1.0,))


class TestCensor:
    def test_no_jump_forest_unchanged(self):
        cfg = SimulationConfig(horizon=1.0, observation_times=(0.5, 1.0), seed=6, params=YULE)
        forest = simulate_finite(cfg)
        assert censor(forest, 1.0) == forest

    def test_boundary_jump_removed(self):
        # motion jumps of exactly -2: censoring at level 2 removes them,
        # nested pruning at level 2 keeps them
        params = FiniteBirthParams(
            motion=MotionSpec(jumps=((3.0, PointMassJump(-2.0)),)),
            beta=0.0,
            rho=DELTA_EMPTY,
        )
        cfg = SimulationConfig(horizon=1.0, observation_times=(1.0,), seed=9, params=params)
        removed = kept = 0
        for rep in range(200):
            forest = simulate_finite(cfg, substream(3, 0, rep))
            had_jump = any(
                ev.kind == JUMP for r in forest.records.values() for ev in r.events
            )
            cens = censor(forest, 2.0)
            if had_jump:
                removed += 1
                assert len(snapshot(cens, 1.0)[0]) == 0
            else:
                kept += 1
                assert cens == forest
        assert removed > 0 and kept > 0

    def test_censor_at_depth_beyond_jumps_is_identity(self):
        triple = triple_of((1.0, [0.3, -0.8]), sigma2=0.2)
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(0.5, 1.0), seed=12, triple=triple
        )
        forest = simulate_finite(cfg)
        assert censor(forest, 10.0) == forest

    def test_censor_equals_nested_prune_off_boundary(self):
        triple = triple_of((0.8, [-0.5, -3.0]), (0.5, [-3.0]))
        cfg = SimulationConfig(
            horizon=1.0, observation_times=(1.0,), seed=14, triple=triple, level=8.0
        )
        for rep in range(50):
            forests = simulate_nested(cfg, (2.0, 8.0), substream(8, 0, rep))
            assert censor(forests[8.0], 2.0) == forests[2.0]


class TestBranchingConvolution:
    def test_empty_start(self):
        rng = np.random.default_rng(0)
        assert branching_convolution(EMPTY, lambda r: RPM([0.0]), rng) == EMPTY

    def test_identity_law(self):
        rng = np.random.default_rng(0)
        start = RPM([1.0, -0.5])
        out = branching_convolution(start, lambda r: RPM([0.0]), rng)
        assert out == start

    def test_accepts_sampler_objects(self):
        law = DiscreteOffspringLaw(((1.0, RPM([0.0, 0.0])),))
        rng = np.random.default_rng(0)
        out = branching_convolution(RPM([2.0]), law, rng)
        assert out.atoms == (2.0, 2.0)

    def test_first_moment_multiplicative(self):
        # E<P (*) Q, e_th> = <P, e_th> * E<Q, e_th>
        th = 0.5
        start = RPM([0.4, -0.2])
        law = DiscreteOffspringLaw(((2.0, RPM([0.1, -0.7])), (1.0, EMPTY)))
        rng = np.random.default_rng(42)
        n = 30_000
        vals = np.empty(n)
        for i in range(n):
            out = branching_convolution(start, law, rng)
            vals[i] = sum(math.exp(th * x) for x in out)
        lhs = vals.mean()
        se = vals.std(ddof=1) / math.sqrt(n)
        start_mass = sum(math.exp(th * x) for x in start)
        mean_q = (2.0 * (math.exp(0.05) + math.exp(-0.35)) + 1.0 * 0.0) / 3.0
        assert abs(lhs - start_mass * mean_q) <= 3 * se


class TestSkeleton:
    def test_endpoints(self):
        cfg = SimulationConfig(horizon=1.0, observation_times=(0.5, 1.0), seed=2, params=YULE)
        forest = simulate_finite(cfg)
        snaps = skeleton(forest, 1.0)
        assert len(snaps) == 2
        assert snaps[0].atoms == (0.0,)

    def test_matches_snapshot_on_grid(self):
        triple = triple_of((1.0, [0.1, -0.2]), a=0.3)
        times = tuple(i / 4 for i in range(5))
        cfg = SimulationConfig(horizon=1.0, observation_times=times, seed=10, triple=triple)
        forest = simulate_finite(cfg)
        snaps = skeleton(forest, 0.25)
        for k, t in enumerate(times):
            assert snaps[k] == snapshot(forest, t)[0]

    def test_indivisible_step_rejected(self):
        cfg = SimulationConfig(horizon=1.0, params=STILL)
        forest = simulate_finite(cfg)
        with pytest.raises(ValueError):
            skeleton(forest, 0.3)
