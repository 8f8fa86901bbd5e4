import statistics

import pytest

from qsolve.mcn import Graph, McnSpec, brute_force_value, build_mcn, gen_graph, read_edge_list, saved_nodes
from qsolve.model import VarKind
from qsolve.oracle import game_value
from qsolve.search import SolverConfig, solve

PATH = Graph(3, ((0, 1), (1, 0), (1, 2), (2, 1)))


def test_generator_is_deterministic():
    assert gen_graph(10, 0.3, 7) == gen_graph(10, 0.3, 7)
    assert gen_graph(10, 0.3, 7) != gen_graph(10, 0.3, 8)


def test_complete_graph_has_every_arc():
    g = gen_graph(6, 1.0, 0)
    assert len(g.arcs) == 30
    assert len(g.edges) == 15


def test_edge_count_matches_density():
    # 190 pairs at density 0.05: mean 9.5 edges, 19 arcs
    counts = [len(gen_graph(20, 0.05, s).edges) for s in range(1000)]
    sigma = (190 * 0.05 * 0.95) ** 0.5
    assert abs(statistics.mean(counts) - 9.5) < 3 * sigma / 1000**0.5


def test_generator_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gen_graph(1, 0.5, 0)
    with pytest.raises(ValueError):
        gen_graph(5, 0.0, 0)
    with pytest.raises(ValueError):
        McnSpec(PATH, -1, 1, 1)
    with pytest.raises(ValueError):
        McnSpec(PATH, 1, 1, 1, variant="MultiP")


def test_edge_list_reader():
    g = read_edge_list("# comment\n1 2\n2 3\n3 3\n10 1\n")
    assert g.n == 4
    assert g.edges == {frozenset((0, 1)), frozenset((1, 2)), frozenset((0, 3))}


def test_cascade_stops_at_shields():
    assert saved_nodes(PATH, [], [0], []) == 0
    assert saved_nodes(PATH, [], [0], [1]) == 2
    assert saved_nodes(PATH, [0], [0], []) == 3


def test_model_shape():
    p = build_mcn(McnSpec(PATH, 1, 1, 1))
    assert p.n == 12
    assert [b.quantifier.value for b in p.blocks] == ["E", "A", "E"]
    assert p.kinds[-3:] == (VarKind.CONTINUOUS,) * 3
    assert p.m_exists == 2 + 3 + len(PATH.arcs)
    assert p.m_forall == 1
    assert p.m_forall + 3 == build_mcn(McnSpec(PATH, 1, 1, 1, "DD")).m_forall


@pytest.mark.parametrize("variant", ["P", "DD"])
def test_path_graph_values(variant):
    assert solve(build_mcn(McnSpec(PATH, 0, 1, 0, variant))).value == 0
    assert solve(build_mcn(McnSpec(PATH, 0, 0, 0, variant))).value == 3
    # the attacker takes the middle node; one endpoint can be protected
    assert solve(build_mcn(McnSpec(PATH, 0, 1, 1, variant))).value == 1
    assert brute_force_value(McnSpec(PATH, 0, 1, 1, variant)) == 1


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("variant", ["P", "DD", "MultiP", "MultiDD"])
def test_solver_matches_brute_force(variant, seed):
    g = gen_graph(5, 0.4, seed)
    spec = McnSpec(g, 1, 2, 1, variant)
    expected = brute_force_value(spec)
    p = build_mcn(spec)
    assert solve(p).value == expected
    assert game_value(p).value == expected


@pytest.mark.parametrize("seed", range(4))
def test_two_stage_formulations_agree(seed):
    g = gen_graph(6, 0.3, seed)
    p = solve(build_mcn(McnSpec(g, 1, 1, 1, "P")))
    dd = solve(build_mcn(McnSpec(g, 1, 1, 1, "DD")))
    assert p.value == dd.value
    # saved-node indicators are integral in the principal variation
    assert all(v.denominator == 1 for v in p.pv[-g.n:])


@pytest.mark.parametrize("seed", range(3))
def test_multistage_attacker_is_weaker(seed):
    g = gen_graph(5, 0.4, seed)
    two = solve(build_mcn(McnSpec(g, 1, 2, 1, "P"))).value
    multi = solve(build_mcn(McnSpec(g, 1, 2, 1, "MultiP"))).value
    assert multi >= two


def test_dd_attacker_never_picks_vaccinated_nodes():
    g = gen_graph(6, 0.4, 1)
    r = solve(build_mcn(McnSpec(g, 1, 1, 1, "DD")), SolverConfig(simply_restricted=False))
    z, y = r.pv[: g.n], r.pv[g.n : 2 * g.n]
    assert not any(a and b for a, b in zip(z, y))
