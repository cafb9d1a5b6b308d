"""
Concrete modules over a truncated path algebra, given by one matrix per arrow.

An arrow a: i -> j carries a d_j x d_i matrix over a finite field F, normally
F_p. Submodules and the members of flags are vertex-graded: one Subspace of
F^{d_i} per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from field import DimensionMismatch, PrimeField, Subspace
from quiver import (Algebra, DimVector, ParseError, QPath, SemisimpleSequence,
                    content_lines, dominance_leq, enumerate_paths, paths_of_length)


class TruncationError(ValueError):
    def __init__(self, path: QPath):
        super().__init__(f"path {path} of length {path.length} acts nonzero; "
                         f"the module does not satisfy the truncation relations")
        self.path = path


class NotASubmodule(ValueError):
    def __init__(self, arrow_id: str):
        super().__init__(f"subspace is not closed under arrow {arrow_id}")
        self.arrow_id = arrow_id


@dataclass(frozen=True)
class GradedSubspace:
    parts: Tuple[Subspace, ...]

    @property
    def dims(self) -> DimVector:
        return tuple(s.dim for s in self.parts)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def at(self, vertex: int) -> Subspace:
        return self.parts[vertex - 1]

    def to_lists(self) -> List[List[List[int]]]:
        return [s.to_lists() for s in self.parts]


@dataclass(frozen=True, eq=False)
class RepPoint:
    alg: Algebra
    d: DimVector
    mats: Mapping[str, np.ndarray]
    field: PrimeField
    _cache: Dict[str, object] = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        d = self.alg.check_dim(self.d)
        object.__setattr__(self, "d", d)
        mats = {}
        for a in self.alg.arrows:
            shape = (d[a.target - 1], d[a.source - 1])
            given = self.mats.get(a.id)
            m = np.zeros(shape, dtype=np.int64) if given is None else np.array(given, dtype=np.int64)
            if m.size == 0:
                m = np.zeros(shape, dtype=np.int64)
            if m.shape != shape:
                raise DimensionMismatch(m.shape, shape, f"matrix of arrow {a.id}")
            m = self.field.reduce(m)
            m.setflags(write=False)
            mats[a.id] = m
        extra = set(self.mats) - set(mats)
        if extra:
            raise ValueError(f"matrices given for unknown arrows {sorted(extra)}")
        object.__setattr__(self, "mats", mats)
        if radical_layer_spaces(self)[-1].total_dim:
            for path in paths_of_length(self.alg, self.alg.loewy):
                if self.field.rank(act_path(self, path, check=False)):
                    raise TruncationError(path)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepPoint):
            return NotImplemented
        return (self.alg == other.alg and self.d == other.d and self.field == other.field
                and all(np.array_equal(self.mats[k], other.mats[k]) for k in self.mats))

    __hash__ = None

    @property
    def dim(self) -> int:
        return sum(self.d)

    def mat(self, arrow_id: str) -> np.ndarray:
        return self.mats[arrow_id]

    def over(self, field: PrimeField) -> "RepPoint":
        """The same matrices read over an extension of this module's field."""
        if field == self.field:
            return self
        if field.p != self.field.p or self.field.degree != 1:
            raise ValueError(f"cannot move a module over {self.field.label} to {field.label}")
        key = f"over:{field.label}"
        cached = self._cache.get(key)
        if cached is None:
            cached = self._cache.setdefault(key, RepPoint(self.alg, self.d, dict(self.mats), field))
        return cached


def semisimple(alg: Algebra, d: Sequence[int], field: PrimeField) -> RepPoint:
    return RepPoint(alg, tuple(d), {}, field)


# -- graded subspaces ------------------------------------------------------

def full_graded(m: RepPoint) -> GradedSubspace:
    return GradedSubspace(tuple(m.field.full(di) for di in m.d))


def zero_graded(m: RepPoint) -> GradedSubspace:
    return GradedSubspace(tuple(m.field.zero(di) for di in m.d))


def graded_span(m: RepPoint, vectors: Mapping[int, Sequence[Sequence[int]]]) -> GradedSubspace:
    """{vertex: [vectors]} -> graded subspace."""
    return GradedSubspace(tuple(m.field.span([m.field.array(v) for v in vectors.get(i, [])], di)
                                for i, di in enumerate(m.d, start=1)))


def graded_sum(f: PrimeField, a: GradedSubspace, b: GradedSubspace) -> GradedSubspace:
    return GradedSubspace(tuple(f.sum(x, y) for x, y in zip(a.parts, b.parts)))


def graded_intersect(f: PrimeField, a: GradedSubspace, b: GradedSubspace) -> GradedSubspace:
    return GradedSubspace(tuple(f.intersect(x, y) for x, y in zip(a.parts, b.parts)))


def graded_contains(f: PrimeField, a: GradedSubspace, b: GradedSubspace) -> bool:
    return all(f.contains(x, y) for x, y in zip(a.parts, b.parts))


def arrow_image(m: RepPoint, sub: GradedSubspace) -> GradedSubspace:
    """J.sub: the sum of the images of sub under all arrows."""
    f = m.field
    parts = [f.zero(di) for di in m.d]
    for a in m.alg.arrows:
        src = sub.at(a.source)
        if src.dim == 0:
            continue
        t = a.target - 1
        parts[t] = f.sum(parts[t], f.image_of(m.mats[a.id], src))
    return GradedSubspace(tuple(parts))


def flag_layering(flag: Sequence[GradedSubspace]) -> SemisimpleSequence:
    """Per-vertex dimension drops of a descending flag."""
    return SemisimpleSequence(tuple(tuple(x - y for x, y in zip(upper.dims, lower.dims))
                                    for upper, lower in zip(flag, flag[1:])))


# -- path action and layerings ---------------------------------------------

def act_path(m: RepPoint, p: QPath, check: bool = True) -> np.ndarray:
    if check and p.length > m.alg.L:
        raise ValueError(f"path {p} has length {p.length} > L={m.alg.L}; it acts as zero")
    f = m.field
    out = f.identity(m.d[p.start - 1])
    for arrow_id in p.applied:
        out = f.matmul(m.mats[arrow_id], out)
    return out


def radical_layer_spaces(m: RepPoint) -> List[GradedSubspace]:
    """[J^0 M, J^1 M, ..., J^{L+1} M]."""
    cached = m._cache.get("radical")
    if cached is None:
        layers = [full_graded(m)]
        for _ in range(m.alg.loewy):
            layers.append(arrow_image(m, layers[-1]))
        cached = m._cache.setdefault("radical", layers)
    return list(cached)


def radical_layering(m: RepPoint) -> SemisimpleSequence:
    return flag_layering(radical_layer_spaces(m))


def socle_layer_spaces(m: RepPoint) -> List[GradedSubspace]:
    """[soc_0 M, ..., soc_L M], soc_k M = {x : J x in soc_{k-1} M}."""
    f = m.field
    previous = zero_graded(m)
    out = []
    for _ in range(m.alg.loewy):
        parts = [f.full(di) for di in m.d]
        for a in m.alg.arrows:
            s = a.source - 1
            parts[s] = f.intersect(parts[s], f.preimage(m.mats[a.id], previous.at(a.target)))
        previous = GradedSubspace(tuple(parts))
        out.append(previous)
    return out


def socle_layering(m: RepPoint) -> SemisimpleSequence:
    spaces = socle_layer_spaces(m)
    zero = tuple([0] * m.alg.n)
    dims = [zero] + [s.dims for s in spaces]
    return SemisimpleSequence(tuple(tuple(y - x for x, y in zip(lo, hi))
                                    for lo, hi in zip(dims, dims[1:])))


def socle_governing_sequence(m: RepPoint) -> SemisimpleSequence:
    """(S*_k, ..., S*_0, 0, ...): the sequence governing the socle filtration."""
    layers = socle_layering(m).layers
    nonzero = [l for l, layer in enumerate(layers) if any(layer)]
    k = nonzero[-1] if nonzero else 0
    head = tuple(reversed(layers[:k + 1]))
    return SemisimpleSequence(head + layers[k + 1:])


def dualize(m: RepPoint) -> RepPoint:
    """The K-dual over the opposite quiver: arrows reversed, matrices transposed."""
    return RepPoint(m.alg.opposite(), m.d, {k: v.T for k, v in m.mats.items()}, m.field)


def direct_sum(a: RepPoint, b: RepPoint) -> RepPoint:
    if a.alg != b.alg or a.field != b.field:
        raise ValueError("direct sum needs modules over the same algebra and field")
    mats = {}
    for arrow in a.alg.arrows:
        x, y = a.mats[arrow.id], b.mats[arrow.id]
        block = np.zeros((x.shape[0] + y.shape[0], x.shape[1] + y.shape[1]), dtype=np.int64)
        block[:x.shape[0], :x.shape[1]] = x
        block[x.shape[0]:, x.shape[1]:] = y
        mats[arrow.id] = block
    return RepPoint(a.alg, tuple(p + q for p, q in zip(a.d, b.d)), mats, a.field)


# -- path ranks and theta --------------------------------------------------

def path_rank(m: RepPoint) -> Dict[QPath, int]:
    return {p: m.field.rank(act_path(m, p)) for p in enumerate_paths(m.alg, 0, m.alg.L)}


def theta(m: RepPoint) -> Tuple[SemisimpleSequence, SemisimpleSequence]:
    return radical_layering(m), socle_layering(m)


@dataclass(frozen=True)
class ThetaPlus:
    radical: SemisimpleSequence
    socle: SemisimpleSequence
    path_ranks: Tuple[int, ...]       # negated, in enumerate_paths order
    dual_path_ranks: Tuple[int, ...]  # negated, over the opposite quiver

    def to_json(self) -> Dict[str, object]:
        return {
            "radical": str(self.radical),
            "socle": str(self.socle),
            "path_ranks": list(self.path_ranks),
            "dual_path_ranks": list(self.dual_path_ranks),
        }


def theta_plus(m: RepPoint) -> ThetaPlus:
    ranks = path_rank(m)
    dual_ranks = path_rank(dualize(m))
    return ThetaPlus(radical_layering(m), socle_layering(m),
                     tuple(-r for r in ranks.values()),
                     tuple(-r for r in dual_ranks.values()))


def theta_plus_leq(a: ThetaPlus, b: ThetaPlus) -> bool:
    """Componentwise: dominance on both layerings, <= on the negated ranks."""
    return (dominance_leq(a.radical, b.radical)
            and dominance_leq(a.socle, b.socle)
            and all(x <= y for x, y in zip(a.path_ranks, b.path_ranks))
            and all(x <= y for x, y in zip(a.dual_path_ranks, b.dual_path_ranks)))


def theta_plus_less(a: ThetaPlus, b: ThetaPlus) -> bool:
    return theta_plus_leq(a, b) and a != b


# -- submodules ------------------------------------------------------------

def violating_arrow(m: RepPoint, sub: GradedSubspace) -> Optional[str]:
    f = m.field
    for a in m.alg.arrows:
        if not f.contains(sub.at(a.target), f.image_of(m.mats[a.id], sub.at(a.source))):
            return a.id
    return None


def is_submodule(m: RepPoint, sub: GradedSubspace) -> bool:
    return violating_arrow(m, sub) is None


def generated_submodule(m: RepPoint, gens: GradedSubspace) -> GradedSubspace:
    """Smallest submodule containing gens."""
    current = gens
    while True:
        grown = graded_sum(m.field, current, arrow_image(m, current))
        if grown.dims == current.dims:
            return current
        current = grown


def is_layer_stable(sub: GradedSubspace, m: RepPoint) -> bool:
    """J^l sub = sub ∩ J^l M for every l."""
    bad = violating_arrow(m, sub)
    if bad is not None:
        raise NotASubmodule(bad)
    f = m.field
    layer = sub
    for big in radical_layer_spaces(m):
        if layer != graded_intersect(f, sub, big):
            return False
        layer = arrow_image(m, layer)
    return True


def restrict(m: RepPoint, sub: GradedSubspace) -> RepPoint:
    """The submodule sub as a module in its own echelon basis."""
    bad = violating_arrow(m, sub)
    if bad is not None:
        raise NotASubmodule(bad)
    f = m.field
    mats = {}
    for a in m.alg.arrows:
        src, tgt = sub.at(a.source), sub.at(a.target)
        cols = []
        for v in src.basis:
            image = f.matmul(m.mats[a.id], v.reshape(-1, 1)).ravel()
            cols.append(f.solve(tgt.basis.T, image))
        mats[a.id] = np.array(cols, dtype=np.int64).T if cols else np.zeros((tgt.dim, 0), dtype=np.int64)
    return RepPoint(m.alg, sub.dims, mats, f)


# -- text format -----------------------------------------------------------

def format_module(m: RepPoint) -> str:
    lines = ["dim " + ",".join(str(x) for x in m.d)]
    for a in m.alg.arrows:
        mat = m.mats[a.id]
        if not mat.any():
            continue
        lines.append(f"mat {a.id}")
        lines += [" ".join(str(int(x)) for x in row) for row in mat]
    return "\n".join(lines) + "\n"


def parse_module(text: str, alg: Algebra, field: PrimeField) -> RepPoint:
    lines = list(content_lines(text))
    if not lines or not lines[0][1].startswith("dim "):
        raise ParseError("module file must start with 'dim d_1,...,d_n'", lines[0][0] if lines else 0)
    number, header = lines[0]
    try:
        d = alg.check_dim(int(x) for x in header[4:].replace(" ", "").split(","))
    except ValueError as e:
        raise ParseError(str(e), number) from e
    mats: Dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        number, line = lines[i]
        words = line.split()
        if words[0] != "mat" or len(words) != 2:
            raise ParseError(f"expected 'mat <arrow-id>', got {line!r}", number)
        try:
            arrow = alg.arrow(words[1])
        except KeyError as e:
            raise ParseError(f"unknown arrow {words[1]!r}", number) from e
        if arrow.id in mats:
            raise ParseError(f"arrow {arrow.id} given twice", number)
        rows, cols = d[arrow.target - 1], d[arrow.source - 1]
        i += 1
        entries = []
        if rows and cols:
            for _ in range(rows):
                if i >= len(lines):
                    raise ParseError(f"matrix of {arrow.id} needs {rows} rows", number)
                row_number, row = lines[i]
                try:
                    values = [int(x) for x in row.split()]
                except ValueError as e:
                    raise ParseError(f"non-integer entry in {row!r}", row_number) from e
                if len(values) != cols:
                    raise ParseError(f"row needs {cols} entries, got {len(values)}", row_number)
                entries.append(values)
                i += 1
        mats[arrow.id] = np.array(entries, dtype=np.int64).reshape(rows, cols)
    try:
        return RepPoint(alg, d, mats, field)
    except TruncationError as e:
        raise ParseError(str(e)) from e
