"""
Quivers, truncated path algebras and semisimple sequences.

An Algebra is a quiver together with its Loewy length L+1: all paths of
length L+1 vanish. Semisimple modules are stored as multiplicity vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

DimVector = Tuple[int, ...]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0):
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass(frozen=True)
class Arrow:
    id: str
    source: int
    target: int


@dataclass(frozen=True)
class Algebra:
    n: int
    arrows: Tuple[Arrow, ...]
    loewy: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("an algebra needs at least one vertex")
        if self.loewy < 1:
            raise ValueError(f"Loewy length must be at least 1, got {self.loewy}")
        seen = set()
        for a in self.arrows:
            if a.id in seen:
                raise ValueError(f"duplicate arrow id {a.id!r}")
            seen.add(a.id)
            for v in (a.source, a.target):
                if not 1 <= v <= self.n:
                    raise ValueError(f"arrow {a.id!r} uses vertex {v} outside 1..{self.n}")

    @property
    def L(self) -> int:
        return self.loewy - 1

    def arrow(self, arrow_id: str) -> Arrow:
        for a in self.arrows:
            if a.id == arrow_id:
                return a
        raise KeyError(f"no arrow {arrow_id!r}")

    def arrows_from(self, vertex: int) -> List[Arrow]:
        return [a for a in self.arrows if a.source == vertex]

    def adjacency(self) -> np.ndarray:
        """B with B[i-1, j-1] = number of arrows i -> j."""
        b = np.zeros((self.n, self.n), dtype=np.int64)
        for a in self.arrows:
            b[a.source - 1, a.target - 1] += 1
        return b

    def opposite(self) -> "Algebra":
        """Same arrow ids, directions reversed."""
        return Algebra(self.n, tuple(Arrow(a.id, a.target, a.source) for a in self.arrows),
                       self.loewy, name=f"{self.name}^op" if self.name else "")

    def check_dim(self, d: Sequence[int]) -> DimVector:
        d = tuple(int(x) for x in d)
        if len(d) != self.n or any(x < 0 for x in d):
            raise ValueError(f"dimension vector {d} does not fit {self.n} vertices")
        return d


@dataclass(frozen=True)
class QPath:
    """A path; arrows listed leftmost-last-applied, so ("b", "a") is b after a."""
    arrows: Tuple[str, ...]
    start: int
    end: int

    @property
    def length(self) -> int:
        return len(self.arrows)

    @property
    def applied(self) -> Tuple[str, ...]:
        return tuple(reversed(self.arrows))

    @staticmethod
    def trivial(vertex: int) -> "QPath":
        return QPath((), vertex, vertex)

    def extend(self, arrow: Arrow) -> "QPath":
        if arrow.source != self.end:
            raise ValueError(f"arrow {arrow.id} does not start at vertex {self.end}")
        return QPath((arrow.id,) + self.arrows, self.start, arrow.target)

    def sort_key(self):
        return (self.length, self.start, self.applied)

    def __str__(self) -> str:
        return "*".join(self.arrows) if self.arrows else f"e{self.start}"


def _extend_all(alg: Algebra, paths: List[QPath]) -> List[QPath]:
    return [p.extend(a) for p in paths for a in alg.arrows_from(p.end)]


def paths_of_length(alg: Algebra, length: int) -> List[QPath]:
    """All composable arrow sequences of the given length (no truncation bound)."""
    level = [QPath.trivial(i) for i in range(1, alg.n + 1)]
    for _ in range(length):
        level = _extend_all(alg, level)
    return level


def enumerate_paths(alg: Algebra, from_len: int, to_len: int) -> List[QPath]:
    if to_len > alg.L:
        raise ValueError(f"paths longer than L={alg.L} vanish; asked for length {to_len}")
    out: List[QPath] = []
    level = [QPath.trivial(i) for i in range(1, alg.n + 1)]
    for length in range(to_len + 1):
        if length >= from_len:
            out.extend(level)
        level = _extend_all(alg, level)
    return out


@dataclass(frozen=True)
class SemisimpleSequence:
    layers: Tuple[DimVector, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a semisimple sequence needs at least one layer")
        n = len(self.layers[0])
        if any(len(layer) != n for layer in self.layers):
            raise ValueError("layers of differing lengths")
        if any(x < 0 for layer in self.layers for x in layer):
            raise ValueError("negative multiplicity")

    @staticmethod
    def of(layers: Sequence[Sequence[int]]) -> "SemisimpleSequence":
        return SemisimpleSequence(tuple(tuple(int(x) for x in layer) for layer in layers))

    @property
    def n(self) -> int:
        return len(self.layers[0])

    @property
    def loewy(self) -> int:
        return len(self.layers)

    @property
    def total(self) -> DimVector:
        return tuple(sum(col) for col in zip(*self.layers))

    def prefix_sums(self) -> List[DimVector]:
        out = []
        acc = [0] * self.n
        for layer in self.layers:
            acc = [a + x for a, x in zip(acc, layer)]
            out.append(tuple(acc))
        return out

    def flat(self) -> Tuple[int, ...]:
        return tuple(x for layer in self.layers for x in layer)

    def tail(self, start: int) -> DimVector:
        """Sum of layers start..L."""
        if start >= self.loewy:
            return tuple([0] * self.n)
        return tuple(sum(col) for col in zip(*self.layers[start:]))

    def is_semisimple(self) -> bool:
        return not any(any(layer) for layer in self.layers[1:])

    def __add__(self, other: "SemisimpleSequence") -> "SemisimpleSequence":
        if self.loewy != other.loewy or self.n != other.n:
            raise ValueError("sequences of different shapes")
        return SemisimpleSequence(tuple(tuple(a + b for a, b in zip(x, y))
                                        for x, y in zip(self.layers, other.layers)))

    def __str__(self) -> str:
        return format_sequence(self)

    def pretty(self) -> str:
        """(S1⊕S2^2, 0, ...) notation."""
        parts = []
        for layer in self.layers:
            terms = []
            for i, k in enumerate(layer, start=1):
                if k == 1:
                    terms.append(f"S{i}")
                elif k > 1:
                    terms.append(f"S{i}^{k}")
            parts.append("⊕".join(terms) if terms else "0")
        return "(" + ", ".join(parts) + ")"


def _check_shape(alg: Algebra, s: SemisimpleSequence):
    if s.n != alg.n or s.loewy != alg.loewy:
        raise ValueError(f"sequence with {s.loewy} layers over {s.n} vertices does not fit "
                         f"an algebra with {alg.loewy} layers over {alg.n} vertices")


def dominance_leq(a: SemisimpleSequence, b: SemisimpleSequence) -> bool:
    """Every prefix sum of a is componentwise at most that of b."""
    if a.loewy != b.loewy or a.total != b.total:
        raise ValueError(f"dominance needs equal totals and layer counts: {a.total} vs {b.total}")
    return all(all(x <= y for x, y in zip(pa, pb))
               for pa, pb in zip(a.prefix_sums(), b.prefix_sums()))


def is_realizable(alg: Algebra, s: SemisimpleSequence) -> bool:
    """udim S_l <= udim S_{l-1} . B for every l >= 1."""
    _check_shape(alg, s)
    b = alg.adjacency()
    for prev, layer in zip(s.layers, s.layers[1:]):
        bound = np.array(prev, dtype=np.int64) @ b
        if any(x > y for x, y in zip(layer, bound)):
            return False
    return True


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_sequences(alg: Algebra, d: Sequence[int],
                        realizable_only: bool = False) -> List[SemisimpleSequence]:
    d = alg.check_dim(d)
    per_vertex = [list(_compositions(di, alg.loewy)) for di in d]
    out = []
    for choice in itertools.product(*per_vertex):
        layers = tuple(tuple(choice[i][l] for i in range(alg.n)) for l in range(alg.loewy))
        if any(d) and not any(layers[0]):
            continue
        s = SemisimpleSequence(layers)
        if realizable_only and not is_realizable(alg, s):
            continue
        out.append(s)
    out.sort(key=lambda s: s.flat())
    return out


# -- text formats ------------------------------------------------------------

def content_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_quiver(text: str, name: str = "") -> Algebra:
    n = None
    loewy = None
    arrows: List[Arrow] = []
    for number, line in content_lines(text):
        words = line.split()
        try:
            if words[0] == "vertices" and len(words) == 2:
                n = int(words[1])
            elif words[0] == "loewy" and len(words) == 2:
                loewy = int(words[1])
            elif words[0] == "arrow" and len(words) == 5 and words[3] == "->":
                arrows.append(Arrow(words[1], int(words[2]), int(words[4])))
            else:
                raise ParseError(f"unrecognized directive {line!r}", number)
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(str(e), number) from e
    if n is None:
        raise ParseError("missing 'vertices N'")
    if loewy is None:
        raise ParseError("missing 'loewy L+1'")
    try:
        return Algebra(n, tuple(arrows), loewy, name=name)
    except ValueError as e:
        raise ParseError(str(e)) from e


def format_quiver(alg: Algebra) -> str:
    lines = [f"vertices {alg.n}"]
    lines += [f"arrow {a.id} {a.source} -> {a.target}" for a in alg.arrows]
    lines.append(f"loewy {alg.loewy}")
    return "\n".join(lines) + "\n"


def parse_dim(text: str, alg: Algebra) -> DimVector:
    try:
        d = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError as e:
        raise ParseError(f"bad dimension vector {text!r}") from e
    try:
        return alg.check_dim(d)
    except ValueError as e:
        raise ParseError(str(e)) from e


def parse_sequence(text: str, alg: Algebra) -> SemisimpleSequence:
    """Layers separated by ';', entries by ','. Empty and missing trailing layers are zero."""
    zero = tuple([0] * alg.n)
    chunks = text.replace(" ", "").split(";")
    if len(chunks) > 1 and not chunks[-1]:
        chunks.pop()
    try:
        layers = [tuple(int(x) for x in chunk.split(",")) if chunk else zero for chunk in chunks]
    except ValueError as e:
        raise ParseError(f"bad sequence {text!r}") from e
    if len(layers) > alg.loewy:
        raise ParseError(f"sequence has {len(layers)} layers; the algebra allows {alg.loewy}")
    if any(len(layer) != alg.n for layer in layers):
        raise ParseError(f"every layer needs {alg.n} entries: {text!r}")
    layers += [zero] * (alg.loewy - len(layers))
    try:
        return SemisimpleSequence(tuple(layers))
    except ValueError as e:
        raise ParseError(str(e)) from e


def format_sequence(s: SemisimpleSequence) -> str:
    return ";".join(",".join(str(x) for x in layer) for layer in s.layers)

