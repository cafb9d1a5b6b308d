import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from field import PrimeField
from quiver import ParseError, enumerate_sequences, is_realizable
from rep import RepPoint, radical_layering
from skeleta import (GenericityFailure, NotASkeleton, critical_paths, enumerate_skeleta,
                     extract_hypergraph, format_skeleton, generic_module, parse_skeleton,
                     skeleta_of, to_dot)


def _paths(sk):
    return [str(pp) for pp in sk.paths]


def test_uniserial_sequence_has_one_skeleton(load_quiver, two_vertex_seq):
    alg = load_quiver("ex_r1s1")
    skeleta = enumerate_skeleta(alg, two_vertex_seq(alg, 1))
    assert len(skeleta) == 1
    assert _paths(skeleta[0]) == ["z1", "a1*z1", "b1*a1*z1", "a1*b1*a1*z1"]


def test_non_realizable_sequence_has_none(load_quiver, two_vertex_seq):
    alg = load_quiver("ex_r1s1")
    assert enumerate_skeleta(alg, two_vertex_seq(alg, 3)) == []


def test_choice_of_branch_gives_two_skeleta(load_quiver, two_vertex_seq):
    alg = load_quiver("ex_r2s1")
    s = two_vertex_seq(alg, 3)
    skeleta = enumerate_skeleta(alg, s)
    assert len(skeleta) == 2
    assert "b1*a1*z1" in _paths(skeleta[0])
    assert "b1*a2*z1" in _paths(skeleta[1])
    for sk in skeleta:
        sk.validate(alg)
        assert sk.layering == s
        assert sk.dims == (2, 2)


def test_critical_paths(load_quiver, two_vertex_seq):
    alg = load_quiver("ex_r2s1")
    sk = enumerate_skeleta(alg, two_vertex_seq(alg, 3))[0]
    crit = {str(c.q): [str(p) for p in c.sigma_q] for c in critical_paths(alg, sk)}
    assert crit == {
        "b1*a2*z1": ["b1*a1*z1"],
        "a1*b1*a1*z1": [],
        "a2*b1*a1*z1": [],
    }


# ---------------------------------------------------------
# Generic modules
# ---------------------------------------------------------
@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 10**6))
def test_generic_module_has_the_skeleton_layering(load_quiver, seed):
    alg = load_quiver("ex_r2s1")
    f = PrimeField(31)
    for s in enumerate_sequences(alg, (2, 2), realizable_only=True):
        sk = enumerate_skeleta(alg, s)[0]
        m, h = generic_module(alg, sk, seed, f)
        assert radical_layering(m) == s
        crit = {c.q: set(c.sigma_q) for c in critical_paths(alg, sk)}
        assert {r.q for r in h.relations} == set(crit)
        for r in h.relations:
            assert set(r.support) <= crit[r.q]
            assert all(0 < c < f.p for _, c in r.coefficients)


def test_generic_module_is_reproducible(load_quiver, two_vertex_seq, field31):
    alg = load_quiver("ex_r3s2")
    sk = enumerate_skeleta(alg, two_vertex_seq(alg, 4))[0]
    first, _ = generic_module(alg, sk, (0, 1, 2), field31)
    again, _ = generic_module(alg, sk, (0, 1, 2), field31)
    assert first == again


def test_no_attempts_is_a_genericity_failure(load_quiver, two_vertex_seq, field31):
    alg = load_quiver("ex_r1s1")
    sk = enumerate_skeleta(alg, two_vertex_seq(alg, 1))[0]
    with pytest.raises(GenericityFailure, match="increase p or retries"):
        generic_module(alg, sk, 0, field31, retries=0)


# ---------------------------------------------------------
# Skeleta of a given module
# ---------------------------------------------------------
def test_generic_module_carries_every_skeleton(load_quiver, two_vertex_seq, field31):
    alg = load_quiver("ex_r2s1")
    skeleta = enumerate_skeleta(alg, two_vertex_seq(alg, 3))
    m, h = generic_module(alg, skeleta[0], 7, field31)
    assert skeleta_of(m) == skeleta
    extracted = extract_hypergraph(m, skeleta[0])
    assert extracted.supports() == h.supports()


@pytest.fixture
def lopsided(load_quiver, field31):
    """b1 kills a1.z1 but not a2.z1."""
    alg = load_quiver("ex_r2s1")
    mats = {
        "a1": np.array([[1, 0], [0, 0]]),
        "a2": np.array([[0, 0], [1, 0]]),
        "b1": np.array([[0, 0], [0, 1]]),
    }
    return RepPoint(alg, (2, 2), mats, field31)


def test_skeleta_of_skips_dependent_paths(lopsided, two_vertex_seq):
    alg = lopsided.alg
    s = two_vertex_seq(alg, 3)
    assert radical_layering(lopsided) == s
    found = skeleta_of(lopsided)
    assert [_paths(sk) for sk in found] == [_paths(enumerate_skeleta(alg, s)[1])]


def test_extract_reports_rank_deficiency(lopsided, two_vertex_seq):
    alg = lopsided.alg
    sk = enumerate_skeleta(alg, two_vertex_seq(alg, 3))[0]
    with pytest.raises(NotASkeleton, match="rank deficiency at vertex 1"):
        extract_hypergraph(lopsided, sk)


def test_extract_rejects_other_layering(uniserial, two_vertex_seq):
    sk = enumerate_skeleta(uniserial.alg, two_vertex_seq(uniserial.alg, 5))[0]
    with pytest.raises(NotASkeleton, match="differs"):
        extract_hypergraph(uniserial, sk)


# ---------------------------------------------------------
# Text and DOT
# ---------------------------------------------------------
def test_skeleton_text_format(load_quiver, two_vertex_seq):
    alg = load_quiver("ex_r2s1")
    s = two_vertex_seq(alg, 3)
    sk = enumerate_skeleta(alg, s)[1]
    assert parse_skeleton(format_skeleton(sk), alg, s) == sk
    with pytest.raises(ParseError, match="z3"):
        parse_skeleton("z1\na1*z3\n", alg, s)
    with pytest.raises(ParseError):
        parse_skeleton("z1\nb1*z1\n", alg, s)
    with pytest.raises(ParseError, match="missing"):
        parse_skeleton("z1\na1*z1\na2*z1\nb1*a1*z1\na1*b1*a2*z1\n", alg, s)


def test_dot_output(load_quiver, two_vertex_seq, field31):
    alg = load_quiver("ex_r2s1")
    sk = enumerate_skeleta(alg, two_vertex_seq(alg, 3))[0]
    _, h = generic_module(alg, sk, 0, field31)
    dot = to_dot(h)
    assert dot.startswith("digraph H {")
    assert '"1:z1"' in dot
    assert '"1:z1" -> "1:a1*z1" [label="a1",style="solid"]' in dot
    assert 'shape="point"' in dot
    assert 'style="dashed"' in dot
    assert '"1:b1*a1*z1" [style="dotted",arrowhead="none"]' in dot


@pytest.mark.parametrize("name, dims", [
    ("ex_r1s1", [(1, 1), (2, 1), (2, 2), (3, 2)]),
    ("ex_r2s1", [(1, 2), (2, 2), (3, 1)]),
    ("ex_r3s2", [(2, 2), (1, 3)]),
    ("branch2", [(1, 1, 1, 1), (2, 1, 1, 1), (1, 2, 1, 2)]),
    ("fork", [(1, 1, 1, 1, 1), (1, 2, 1, 1, 1)]),
])
def test_skeleton_exists_exactly_for_realizable_sequences(load_quiver, name, dims):
    alg = load_quiver(name)
    for d in dims:
        for s in enumerate_sequences(alg, d):
            skeleta = enumerate_skeleta(alg, s)
            assert bool(skeleta) == is_realizable(alg, s), f"{name} {d} {s}"
            assert all(sk.layering == s for sk in skeleta)


def test_concrete_modules_have_skeleta(uniserial, two_tops):
    for m in (uniserial, two_tops):
        assert skeleta_of(m)
