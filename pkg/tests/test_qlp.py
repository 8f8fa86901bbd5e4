import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsolve.golden import SAMPLE_QLP, BUILDERS
from qsolve.mcn import McnSpec, build_mcn, gen_graph
from qsolve.model import Quantifier, Sense, VarKind, make_program
from qsolve.qlp import (
    DuplicateInOrder,
    MissingSection,
    QlpError,
    QlpSyntaxError,
    UnknownVariable,
    parse_qlp,
    structurally_equal,
    tokenize,
    write_qlp,
    write_solution_xml,
)
from qsolve.search import SolverConfig, Status, solve

from instances import random_instance


def test_sample_file_parses():
    p = parse_qlp(SAMPLE_QLP)
    assert p.names == ("x1", "x2", "x3", "x4")
    assert p.sense is Sense.MINIMIZE
    assert [(b.start, b.stop) for b in p.blocks] == [(0, 2), (2, 3), (3, 4)]
    assert p.m_exists == 2 and p.m_forall == 1
    assert p.kinds == (VarKind.INTEGER, VarKind.INTEGER, VarKind.INTEGER, VarKind.CONTINUOUS)
    assert p.upper == (2, 1, 1, 1)
    assert p.objective == (1, 2, -5, 1)


def test_tokens_carry_positions():
    toks = tokenize("MAX\n  x1 + 2.5 y \\ note\n")
    names = [(t.kind, t.text, t.line, t.column) for t in toks if t.kind in ("name", "number")]
    assert names == [("name", "MAX", 1, 1), ("name", "x1", 2, 3), ("number", "2.5", 2, 8), ("name", "y", 2, 12)]


def _doc(**over):
    parts = {
        "sense": "MAXIMIZE\nx + y",
        "rows": "SUBJECT TO\nx + y <= 1",
        "bounds": "BOUNDS\n0 <= x <= 1\n0 <= y <= 1",
        "bin": "BINARIES\nx y",
        "ex": "EXISTS\nx",
        "all": "ALL\ny",
        "order": "ORDER\nx y",
    }
    parts.update(over)
    return "\n".join(v for v in parts.values() if v) + "\nEND\n"


def test_minimal_document():
    p = parse_qlp(_doc())
    assert p.quantifiers == (Quantifier.EXISTS, Quantifier.FORALL)
    # x = 1 loses to y = 1, and y = 0 is then the worst reply
    assert solve(p).value == 0


@pytest.mark.parametrize(
    "override, error",
    [
        ({"order": ""}, MissingSection),
        ({"sense": ""}, MissingSection),
        ({"order": "ORDER\nx y x"}, DuplicateInOrder),
        ({"rows": "SUBJECT TO\nx + z <= 1"}, UnknownVariable),
        ({"all": ""}, UnknownVariable),
        ({"order": "ORDER\nx"}, UnknownVariable),
        ({"rows": "SUBJECT TO\nx + y 1"}, QlpSyntaxError),
        ({"bounds": "BOUNDS\n0 <= x <= 1", "bin": "BINARIES\nx"}, QlpError),
    ],
)
def test_malformed_documents(override, error):
    with pytest.raises(error):
        parse_qlp(_doc(**override))


def test_error_reports_line():
    with pytest.raises(UnknownVariable) as info:
        parse_qlp(_doc(rows="SUBJECT TO\nx + z <= 1"))
    assert info.value.line == 4


def test_text_after_end_is_rejected():
    with pytest.raises(QlpError):
        parse_qlp(_doc() + "x <= 1\n")


def test_equality_rows_round_trip():
    p = parse_qlp(_doc(rows="SUBJECT TO\nc1: x - y = 0\n2 x + y >= 1"))
    assert p.m_exists == 3
    text = write_qlp(p)
    assert " = 0" in text
    assert structurally_equal(parse_qlp(text), p)


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_golden_round_trip(name):
    p = BUILDERS[name]()
    assert structurally_equal(parse_qlp(write_qlp(p)), p)


def test_mcn_round_trip():
    for variant in ("P", "DD", "MultiP"):
        p = build_mcn(McnSpec(gen_graph(5, 0.4, 2), 1, 2, 1, variant))
        assert structurally_equal(parse_qlp(write_qlp(p)), p)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_random_round_trip(seed):
    p = random_instance(seed).program
    assert structurally_equal(parse_qlp(write_qlp(p)), p)


def test_writer_rejects_non_decimal_values():
    p = make_program([Fraction(1, 3)], "E")
    with pytest.raises(ValueError):
        write_qlp(p)


def test_solution_xml_for_sample():
    result = solve(parse_qlp(SAMPLE_QLP))
    text = write_solution_xml(result, "Example.qlp")
    assert text.splitlines()[0] == '<?xml version = "1.0" encoding="UTF-8" standalone="yes"?>'
    root = ET.fromstring(text.split("\n", 1)[1])
    header = root.find("header").attrib
    assert header["ProblemName"] == "Example.qlp"
    assert header["SolutionName"] == "Example.qlp.sol"
    assert header["ObjectiveValue"] == "-1.000000"
    assert set(header) == {
        "ProblemName", "SolutionName", "ObjectiveValue", "Runtime",
        "DecisionNodes", "PropagationSteps", "LearntConstraints",
    }
    assert root.find("quality").attrib == {"SolutionStatus": "OPTIMAL", "Gap": "0.000000"}
    rows = [v.attrib for v in root.find("variables")]
    assert rows == [
        {"name": "x1", "index": "0-1", "value": "2", "block": "1"},
        {"name": "x2", "index": "2", "value": "1", "block": "1"},
        {"name": "x3", "index": "3", "value": "1", "block": "2"},
        {"name": "x4", "index": "4", "value": "0.000000", "block": "3"},
    ]


def test_solution_xml_for_infinite_value():
    result = solve(BUILDERS["no_suicide_example"]())
    root = ET.fromstring(write_solution_xml(result).split("\n", 1)[1])
    assert root.find("header").attrib["ObjectiveValue"] == "-inf"
    assert root.find("quality").attrib["SolutionStatus"] == "INFEASIBLE"
    assert len(root.find("variables")) == 0


def test_solution_xml_on_timeout():
    p = build_mcn(McnSpec(gen_graph(12, 0.3, 3), 2, 2, 2))
    result = solve(p, SolverConfig(time_limit=0.05))
    assert result.status is Status.TIMEOUT
    root = ET.fromstring(write_solution_xml(result).split("\n", 1)[1])
    assert root.find("quality").attrib == {"SolutionStatus": "TIMEOUT", "Gap": "unknown"}
