import itertools
from fractions import Fraction

import pytest

from qsolve.golden import BUILDERS, EXPECTED, dominance_example, dominance_fixed_example
from qsolve.mcn import McnSpec, build_mcn, gen_graph
from qsolve.model import NEG_INF, POS_INF, UNKNOWN, is_finite, make_program, leq
from qsolve.oracle import game_value, is_simply_restricted
from qsolve.search import Engine, SolverConfig, Status, solve

from instances import random_instance

CONFIGS = [
    SolverConfig(scp=scp, relaxation=mode, exact_lp=exact)
    for scp, mode, exact in itertools.product(
        (True, False), ("none", "fixed-scenario", "s-relaxation"), (False, True)
    )
]


def _id(cfg):
    return f"scp={cfg.scp}-{cfg.relaxation}-exact={cfg.exact_lp}"


def _oracle(p):
    v = game_value(p).value
    return NEG_INF if v is UNKNOWN else v


@pytest.mark.parametrize("cfg", CONFIGS, ids=_id)
@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_golden_instances_under_every_config(name, cfg):
    expected, pv = EXPECTED[name]
    result = solve(BUILDERS[name](), cfg)
    assert result.value == expected
    if pv is not None:
        assert result.pv == tuple(Fraction(v) for v in pv)


def test_status_mapping():
    assert solve(BUILDERS["four_level_example"]()).status is Status.OPTIMAL
    assert solve(BUILDERS["no_suicide_example"]()).status is Status.INFEASIBLE
    assert solve(BUILDERS["no_suicide_win_example"]()).status is Status.UNBOUNDED_WIN


def test_dominance_row_makes_instance_infeasible():
    assert solve(dominance_example()).value == -2
    fixed = solve(dominance_fixed_example())
    assert fixed.status is Status.INFEASIBLE
    assert fixed.value == NEG_INF


def test_simply_restricted_mode_matches_full_legality():
    for name, build in BUILDERS.items():
        p = build()
        if p.forall_rows and is_simply_restricted(p):
            assert solve(p, SolverConfig(simply_restricted=True)).value == EXPECTED[name][0], name


def test_random_instances_match_oracle():
    for seed in range(5000, 5080):
        p = random_instance(seed).program
        expected = _oracle(p)
        for cfg in (CONFIGS[0], CONFIGS[5]):
            assert solve(p, cfg).value == expected, (seed, _id(cfg))


def test_principal_variation_reaches_the_value():
    for seed in range(6000, 6060):
        p = random_instance(seed).program
        r = solve(p)
        if not is_finite(r.value):
            continue
        assert r.pv is not None
        assert p.exists_ok(r.pv)
        assert p.objective_value(r.pv) == r.value


def test_timeout_reports_incumbent():
    spec = McnSpec(gen_graph(12, 0.3, 3), 2, 2, 2)
    r = solve(build_mcn(spec), SolverConfig(time_limit=0.05))
    assert r.status is Status.TIMEOUT
    assert r.value == r.incumbent


def test_learning_can_be_disabled():
    p = random_instance(77).program
    assert solve(p, SolverConfig(learn=False)).value == solve(p).value


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(relaxation="bogus")
    with pytest.raises(ValueError):
        SolverConfig(scenario_cap=0)


def test_engine_records_scp_checks():
    p = make_program([3, 2, 1, 1], "EAEA", exists_rows=[leq([1, 0, 1, 0], 1)])
    engine = Engine(p, SolverConfig(record_scp=True))
    result = engine.run()
    assert result.value == _oracle(p)
    assert engine.stats.scp_checks


def test_polarity_hook_is_used():
    calls = []

    def hook(engine, j):
        calls.append(j)
        return (1, 0)

    p = BUILDERS["four_level_example"]()
    assert solve(p, SolverConfig(polarity=hook)).value == -2
    assert calls


def test_unbounded_values_use_infinities():
    assert solve(BUILDERS["bound_in_rows_example"]()).value == POS_INF
