from fractions import Fraction

import pytest

from qsolve.golden import scenario_relaxation_example
from qsolve.model import UNKNOWN, binarize
from qsolve.oracle import extended_minimax
from qsolve.relax import PoolEmpty, RelaxationContext, ScenarioPool
from qsolve.search import Engine, SolverConfig

from instances import random_instance

SCENARIOS = [{1: 1, 3: 0}, {1: 1, 3: 1}]


def _context(exact):
    return RelaxationContext(binarize(scenario_relaxation_example()).program, forall_rows=(), exact=exact)


@pytest.mark.parametrize("exact", [False, True])
def test_scenario_bounds_on_two_round_example(exact):
    ctx = _context(exact)
    assert [ctx.fixed_scenario({}, 0, s).value for s in SCENARIOS] == [2, 2]
    assert ctx.dep({}, SCENARIOS).value == 1
    assert ctx.plain({}).value == 4


def test_exact_bounds_are_rational():
    ctx = _context(True)
    assert isinstance(ctx.fixed_scenario({}, 0, SCENARIOS[0]).value, Fraction)


def test_dep_shares_copies_between_agreeing_scenarios():
    ctx = _context(True)
    _, columns = ctx.dep_problem({}, SCENARIOS)
    assert sorted(columns) == [(0, ()), (2, (1,))]
    _, columns = ctx.dep_problem({}, [{1: 0, 3: 0}, {1: 1, 3: 0}])
    assert sorted(columns) == [(0, ()), (2, (0,)), (2, (1,))]
    with pytest.raises(PoolEmpty):
        ctx.dep_problem({}, [])


def test_pool_scores_and_eviction():
    pool = ScenarioPool([1, 3], cap=2, decay_every=1000)
    pool.record((0, 0))
    pool.record((1, 1), amount=3)
    pool.record((0, 0))
    assert pool.ranked() == [{1: 1, 3: 1}, {1: 0, 3: 0}]
    pool.record((1, 0), amount=0.5)  # too weak to displace anything
    assert len(pool) == 2 and {1: 1, 3: 0} not in pool.ranked()
    pool.record((1, 0), amount=5)
    assert {1: 0, 3: 0} not in pool.ranked()
    assert pool.bump_prefix({1: 1}) == 2


def test_pool_decay():
    pool = ScenarioPool([0], cap=4, decay=0.5, decay_every=2)
    pool.record((0,), amount=4)
    pool.record((1,), amount=1)
    assert [round(s.score, 6) for s in pool.entries] == [2.0, 0.5]


def test_pool_rejects_zero_capacity():
    with pytest.raises(ValueError):
        ScenarioPool([0], cap=0)


@pytest.mark.parametrize("mode", ["fixed-scenario", "s-relaxation"])
def test_logged_bounds_dominate_subtree_values(mode):
    checked = 0
    for seed in range(40):
        engine = Engine(random_instance(seed).program, SolverConfig(relaxation=mode, log_relaxations=True, scp=False))
        engine.run()
        cache = {}
        for entry in engine.relax.log:
            prefix = {j: v for j, v in entry.fixed.items() if j < entry.prefix_end}
            key = tuple(sorted(prefix.items()))
            if key not in cache:
                cache[key] = extended_minimax(engine.program, fixed=prefix).value
            if cache[key] is UNKNOWN:
                continue
            checked += 1
            assert cache[key] <= entry.value + 1e-6
    assert checked > 0
