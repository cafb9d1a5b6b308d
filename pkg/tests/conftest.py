import os
import tempfile
from pathlib import Path

# config creates the log directory on import
os.environ.setdefault("REPCOMP_LOGS_DIR", tempfile.mkdtemp(prefix="repcomp-logs-"))

import numpy as np
import pytest

from field import PrimeField
from quiver import parse_quiver, parse_sequence
from rep import RepPoint

QUIVERS = Path(__file__).resolve().parent.parent / "quivers"

# The nine sequences of total (2, 2) over the two-vertex quivers with Loewy length 4.
TWO_VERTEX = {
    1: "1,0;0,1;1,0;0,1",
    2: "0,1;1,0;0,1;1,0",
    3: "1,0;0,2;1,0;0,0",
    4: "0,1;2,0;0,1;0,0",
    5: "2,0;0,2;0,0;0,0",
    6: "0,2;2,0;0,0;0,0",
    7: "1,1;1,1;0,0;0,0",
    8: "1,1;1,0;0,1;0,0",
    9: "1,1;0,1;1,0;0,0",
}


@pytest.fixture
def quivers_dir():
    return QUIVERS


@pytest.fixture
def load_quiver():
    def load(name):
        path = QUIVERS / f"{name}.quiver"
        return parse_quiver(path.read_text(encoding="utf-8"), name=name)
    return load


@pytest.fixture
def two_vertex_seq():
    def make(alg, k):
        return parse_sequence(TWO_VERTEX[k], alg)
    return make


@pytest.fixture
def field31():
    return PrimeField(31)


@pytest.fixture
def uniserial(load_quiver, field31):
    """Lambda e_1 over ex_r1s1: z1 -> y1 -> z2 -> y2."""
    alg = load_quiver("ex_r1s1")
    mats = {
        "a1": np.eye(2, dtype=np.int64),
        "b1": np.array([[0, 0], [1, 0]]),
    }
    return RepPoint(alg, (2, 2), mats, field31)


@pytest.fixture
def two_tops(load_quiver, field31):
    """Two tops at vertex 1, three independent-looking maps to vertex 2, b1 = 0."""
    alg = load_quiver("ex_r3s1")
    mats = {
        "a1": np.eye(2, dtype=np.int64),
        "a2": np.array([[1, 0], [1, 2]]),
        "a3": np.array([[2, 0], [3, 4]]),
    }
    return RepPoint(alg, (2, 2), mats, field31)


def truncated_module(alg, d, field, seed):
    """Random module: each basis vector sits at a level in 0..L and arrows only raise the level."""
    rng = np.random.default_rng(seed)
    levels = [rng.integers(0, alg.loewy, size=di) for di in d]
    mats = {}
    for a in alg.arrows:
        src, tgt = levels[a.source - 1], levels[a.target - 1]
        values = field.random_matrix(rng, len(tgt), len(src))
        mats[a.id] = np.where(tgt[:, np.newaxis] > src[np.newaxis, :], values, 0)
    return RepPoint(alg, tuple(d), mats, field)


@pytest.fixture
def random_module():
    return truncated_module
