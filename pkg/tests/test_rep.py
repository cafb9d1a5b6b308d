import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from field import PrimeField
from quiver import ParseError, SemisimpleSequence, parse_quiver, parse_sequence
from rep import (NotASubmodule, RepPoint, TruncationError, direct_sum, dualize,
                 format_module, generated_submodule, graded_span, is_layer_stable,
                 is_submodule, parse_module, path_rank, radical_layering, restrict,
                 semisimple, socle_governing_sequence, socle_layering, theta_plus,
                 theta_plus_leq)
from skeleta import enumerate_skeleta, generic_module


DUAL_CASES = {
    3: "1,0;0,2;1,0;0,0",
    7: "1,1;1,1;0,0;0,0",
    8: "1,1;1,0;0,1;0,0",
    9: "1,1;0,1;1,0;0,0",
}


def _generic(alg, text, field, seed=0):
    sk = enumerate_skeleta(alg, parse_sequence(text, alg))[0]
    return generic_module(alg, sk, seed, field)[0]


# ---------------------------------------------------------
# Construction
# ---------------------------------------------------------
def test_matrix_shapes_are_checked(load_quiver, field31):
    alg = load_quiver("ex_r1s1")
    with pytest.raises(ValueError, match="a1"):
        RepPoint(alg, (2, 1), {"a1": np.eye(2, dtype=np.int64)}, field31)
    with pytest.raises(ValueError, match="unknown arrows"):
        RepPoint(alg, (1, 1), {"zz": [[1]]}, field31)


def test_truncation_is_enforced(field31):
    alg = parse_quiver("vertices 2\narrow a 1 -> 2\narrow b 2 -> 1\nloewy 2\n")
    with pytest.raises(TruncationError, match="length 2"):
        RepPoint(alg, (1, 1), {"a": [[1]], "b": [[1]]}, field31)
    # one nonzero arrow is fine
    RepPoint(alg, (1, 1), {"a": [[1]]}, field31)


def test_entries_are_reduced(load_quiver):
    alg = load_quiver("ex_r1s1")
    m = RepPoint(alg, (1, 1), {"a1": [[-1]]}, PrimeField(7))
    assert m.mat("a1").tolist() == [[6]]
    with pytest.raises(ValueError):
        m.mat("a1")[0, 0] = 1


# ---------------------------------------------------------
# Layerings
# ---------------------------------------------------------
def test_uniserial_layerings(uniserial):
    assert radical_layering(uniserial) == SemisimpleSequence.of([[1, 0], [0, 1], [1, 0], [0, 1]])
    assert socle_layering(uniserial) == SemisimpleSequence.of([[0, 1], [1, 0], [0, 1], [1, 0]])
    assert socle_governing_sequence(uniserial) == radical_layering(uniserial)


def test_semisimple_layerings(load_quiver, field31):
    alg = load_quiver("ex_r2s1")
    m = semisimple(alg, (2, 1), field31)
    top = SemisimpleSequence.of([[2, 1], [0, 0], [0, 0], [0, 0]])
    assert radical_layering(m) == top
    assert socle_layering(m) == top
    assert socle_governing_sequence(m) == top


def test_socle_governing_sequence_reverses_nonzero_part(two_tops):
    # S*(M) = (S2^2, S1^2, 0, 0) reversed to (S1^2, S2^2, 0, 0)
    assert socle_layering(two_tops) == SemisimpleSequence.of([[0, 2], [2, 0], [0, 0], [0, 0]])
    assert socle_governing_sequence(two_tops) == SemisimpleSequence.of([[2, 0], [0, 2], [0, 0], [0, 0]])


def test_direct_sum_adds_layerings(uniserial, load_quiver, field31):
    alg = load_quiver("ex_r1s1")
    s = semisimple(alg, (1, 0), field31)
    total = direct_sum(uniserial, s)
    assert total.d == (3, 2)
    assert radical_layering(total) == radical_layering(uniserial) + radical_layering(s)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 7, 8, 9]))
def test_dual_swaps_radical_and_socle(seed, k):
    text = "vertices 2\narrow a1 1 -> 2\narrow a2 1 -> 2\narrow b1 2 -> 1\nloewy 4\n"
    alg = parse_quiver(text)
    m = _generic(alg, DUAL_CASES[k], PrimeField(31), seed)
    d = dualize(m)
    assert radical_layering(d) == socle_layering(m)
    assert socle_layering(d) == radical_layering(m)
    assert dualize(d) == m


# ---------------------------------------------------------
# Ranks and Theta+
# ---------------------------------------------------------
def test_path_ranks_of_uniserial(uniserial):
    ranks = {str(p): r for p, r in path_rank(uniserial).items()}
    assert ranks["e1"] == 2
    assert ranks["a1"] == 2
    assert ranks["b1"] == 1
    assert ranks["a1*b1*a1"] == 1
    assert ranks["b1*a1*b1"] == 0


def test_theta_plus_orders_degenerations(uniserial, load_quiver, field31):
    alg = load_quiver("ex_r1s1")
    # the uniserial module degenerates to a sum of two copies of a1 : S1 -> S2
    split = RepPoint(alg, (2, 2), {"a1": np.eye(2, dtype=np.int64)}, field31)
    flat = semisimple(alg, (2, 2), field31)
    uni, mid, top = theta_plus(uniserial), theta_plus(split), theta_plus(flat)
    assert theta_plus_leq(uni, mid)
    assert theta_plus_leq(mid, top)
    assert theta_plus_leq(uni, top)
    assert not theta_plus_leq(mid, uni)
    assert not theta_plus_leq(top, mid)
    assert theta_plus_leq(mid, mid)


# ---------------------------------------------------------
# Submodules
# ---------------------------------------------------------
@pytest.fixture
def fork_generic(load_quiver, field31):
    alg = load_quiver("fork")
    return _generic(alg, "1,0,0,0,1;0,0,1,1,0;0,1,0,0,0", field31)


def test_cyclic_submodule_not_layer_stable(fork_generic):
    m = fork_generic
    top1 = generated_submodule(m, graded_span(m, {1: [[1]]}))
    assert top1.dims == (1, 1, 1, 0, 0)
    assert is_submodule(m, top1)
    assert not is_layer_stable(top1, m)

    top5 = generated_submodule(m, graded_span(m, {5: [[1]]}))
    assert top5.dims == (0, 1, 0, 1, 1)
    assert is_layer_stable(top5, m)


def test_layer_stability_needs_a_submodule(fork_generic):
    m = fork_generic
    with pytest.raises(NotASubmodule):
        is_layer_stable(graded_span(m, {5: [[1]]}), m)


def test_restrict_to_submodule(fork_generic):
    m = fork_generic
    sub = generated_submodule(m, graded_span(m, {5: [[1]]}))
    r = restrict(m, sub)
    assert r.d == (0, 1, 0, 1, 1)
    assert radical_layering(r) == SemisimpleSequence.of([[0, 0, 0, 0, 1], [0, 0, 0, 1, 0], [0, 1, 0, 0, 0]])


# ---------------------------------------------------------
# Text format
# ---------------------------------------------------------
def test_module_file(quivers_dir, load_quiver, field31, two_tops):
    alg = load_quiver("ex_r3s1")
    text = (quivers_dir / "r3s1_two_tops.module").read_text(encoding="utf-8")
    m = parse_module(text, alg, field31)
    assert m == two_tops
    assert parse_module(format_module(m), alg, field31) == m


def test_module_parse_errors(load_quiver, field31):
    alg = load_quiver("ex_r1s1")
    with pytest.raises(ParseError, match="line 1"):
        parse_module("mat a1\n1\n", alg, field31)
    with pytest.raises(ParseError, match="line 3"):
        parse_module("dim 1,1\nmat a1\n1 2\n", alg, field31)
    with pytest.raises(ParseError, match="unknown arrow"):
        parse_module("dim 1,1\nmat c\n1\n", alg, field31)
