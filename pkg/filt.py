"""
Decide whether a module has a filtration governed by a semisimple sequence.

A filtration governed by S is a flag M = M_0 ⊇ M_1 ⊇ ... ⊇ M_{L+1} = 0 of
submodules with J M_l ⊆ M_{l+1} and M_l / M_{l+1} ≅ S_l. The search walks
the layers top-down; at layer l the next member is J M_l plus a lift of a
vertex-graded subspace of the semisimple quotient M_l / J M_l.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Iterator, List, Optional, Tuple, TypeVar, Union

import numpy as np

from config import ENUMERATION_BUDGET, EXTENSION_DEGREE, LINE_SAMPLES, MAX_FIELD_ORDER
from field import EnumerationBudgetExceeded, PrimeField, Subspace
from logger import run_logger
from quiver import SemisimpleSequence, dominance_leq, enumerate_sequences
from rep import (GradedSubspace, RepPoint, arrow_image, dualize, flag_layering,
                 full_graded, graded_contains, radical_layer_spaces, radical_layering)

T = TypeVar("T")
R = TypeVar("R")


class FiltrationError(ValueError):
    pass


class Verdict(Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Filtration:
    module: RepPoint
    sequence: SemisimpleSequence
    flag: Tuple[GradedSubspace, ...]  # M_0, ..., M_{L+1}

    def validate(self):
        m = self.module
        f = m.field
        if len(self.flag) != m.alg.loewy + 1:
            raise FiltrationError(f"flag needs {m.alg.loewy + 1} members, has {len(self.flag)}")
        if self.flag[0] != full_graded(m):
            raise FiltrationError("M_0 is not the whole module")
        if self.flag[-1].total_dim:
            raise FiltrationError("M_{L+1} is not zero")
        for l, (upper, lower) in enumerate(zip(self.flag, self.flag[1:])):
            if not graded_contains(f, upper, lower):
                raise FiltrationError(f"M_{l + 1} is not inside M_{l}")
            if not graded_contains(f, lower, arrow_image(m, upper)):
                raise FiltrationError(f"J M_{l} is not inside M_{l + 1}")
        if flag_layering(self.flag) != self.sequence:
            raise FiltrationError(f"layer dimensions {flag_layering(self.flag)} differ from {self.sequence}")

    def to_json(self):
        return [member.to_lists() for member in self.flag]


@dataclass(frozen=True)
class Cofiltration:
    """Ascending chain 0 = M'_{-1} ⊆ M'_0 ⊆ ... ⊆ M'_L = M with M'_l / M'_{l-1} ≅ S*_l."""
    module: RepPoint
    sequence: SemisimpleSequence
    chain: Tuple[GradedSubspace, ...]  # M'_{-1}, ..., M'_L

    def validate(self):
        m = self.module
        f = m.field
        if len(self.chain) != m.alg.loewy + 1:
            raise FiltrationError(f"chain needs {m.alg.loewy + 1} members, has {len(self.chain)}")
        if self.chain[0].total_dim or self.chain[-1] != full_graded(m):
            raise FiltrationError("chain must run from 0 to the whole module")
        for l, (lower, upper) in enumerate(zip(self.chain, self.chain[1:])):
            if not graded_contains(f, upper, lower):
                raise FiltrationError(f"M'_{l - 1} is not inside M'_{l}")
            if not graded_contains(f, lower, arrow_image(m, upper)):
                raise FiltrationError(f"J M'_{l} is not inside M'_{l - 1}")
        steps = SemisimpleSequence(tuple(tuple(y - x for x, y in zip(lo.dims, hi.dims))
                                         for lo, hi in zip(self.chain, self.chain[1:])))
        if steps != self.sequence:
            raise FiltrationError(f"layer dimensions {steps} differ from {self.sequence}")

    def to_json(self):
        return [member.to_lists() for member in self.chain]


@dataclass(frozen=True)
class FiltrationDecision:
    verdict: Verdict
    witness: Optional[Union[Filtration, Cofiltration]] = None
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.YES


def _check_sequence(m: RepPoint, s: SemisimpleSequence):
    if s.loewy != m.alg.loewy or s.total != m.d:
        raise ValueError(f"sequence {s} has total {s.total}; the module has dimension vector {m.d}")


class _FlagSearch:
    """Depth-first search for a flag, one layer and then one vertex at a time.

    Vertices not yet chosen at the current layer hold their radical part, the
    smallest value they can take, so fits() is a necessary condition for every
    completion of the layer and the exact condition once the last vertex is set.
    """

    def __init__(self, m: RepPoint, s: SemisimpleSequence, budget: int):
        self.m = m
        self.s = s
        self.f = m.field
        self.budget = budget
        self.undecided = ""
        self.nodes = 0

    def feasible(self, l: int, member: GradedSubspace) -> bool:
        """J^k M_l must fit inside M_{l+k}, whose dimensions are fixed by the tail of s."""
        layer = member
        k = 0
        while layer.total_dim:
            k += 1
            layer = arrow_image(self.m, layer)
            bound = self.s.tail(l + k)
            if any(x > y for x, y in zip(layer.dims, bound)):
                return False
        return True

    def fits(self, l: int, parts: List[Subspace], i: int, u: Subspace) -> bool:
        trial = list(parts)
        trial[i - 1] = u
        return self.feasible(l, GradedSubspace(tuple(trial)))

    def line_parameters(self, l: int, parts: List[Subspace], i: int,
                        c0: np.ndarray, c1: np.ndarray) -> np.ndarray:
        """Finite t for which radical + <c0 + t c1> at vertex i passes fits() at layer l.

        The images of c0 and c1 under paths of length k are carried as the
        rows [A c0 | A c1]; their rank modulo J^k of the fixed part gives one
        rank condition on a pencil per vertex and k.
        """
        f, m = self.f, self.m
        alive = f.elements()
        layer = GradedSubspace(tuple(parts))
        images = {i: f.span([np.concatenate([c0, c1])], 2 * m.d[i - 1]).basis}
        for k in range(1, m.alg.loewy + 1):
            layer = arrow_image(m, layer)
            stepped = {}
            for j, rows in images.items():
                dj = m.d[j - 1]
                for a in m.alg.arrows_from(j):
                    mat = m.mats[a.id].T
                    moved = np.hstack([f.matmul(rows[:, :dj], mat), f.matmul(rows[:, dj:], mat)])
                    stepped.setdefault(a.target, []).append(moved)
            images = {j: f.span(np.vstack(blocks), 2 * m.d[j - 1]).basis
                      for j, blocks in stepped.items()}
            bound = self.s.tail(l + k)
            for j in range(1, m.alg.n + 1):
                fixed = layer.at(j)
                room = bound[j - 1] - fixed.dim
                if room < 0:
                    return alive[:0]
                rows = images.get(j)
                if rows is None or rows.shape[0] <= room:
                    continue
                dj = m.d[j - 1]
                alive = f.rank_at_most(f.reduce_mod(fixed, rows[:, :dj]),
                                       f.reduce_mod(fixed, rows[:, dj:]), room, alive)
                if alive.size == 0:
                    return alive
            if not layer.total_dim and not images:
                break
        return alive

    def line_choices(self, l: int, parts: List[Subspace], i: int, radical: Subspace,
                     lift: np.ndarray) -> Optional[List[Subspace]]:
        """Lines of a two-dimensional quotient, as radical + <c0 + t c1> and radical + <c1>."""
        f = self.f
        c0, c1 = lift[0], lift[1]
        n = radical.ambient_dim
        alive = self.line_parameters(l + 1, parts, i, c0, c1)
        if f.degree > 1 and alive.size == f.order:
            rng = np.random.default_rng((f.order, l, i, self.nodes))
            alive = rng.choice(alive, size=min(LINE_SAMPLES, alive.size), replace=False)
        if alive.size + 1 > self.budget:
            self.undecided = (f"undecided over {f.label}: {alive.size + 1} lines exceed the "
                              f"enumeration budget {self.budget}; reduce p for this query or raise budget")
            return None
        options = [f.sum(radical, f.span([f.add(c0, f.mul(c1, t))], n)) for t in alive]
        at_infinity = f.sum(radical, f.span([c1], n))
        if self.fits(l + 1, parts, i, at_infinity):
            options.append(at_infinity)
        return options

    def vertex_choices(self, l: int, parts: List[Subspace], i: int, member: Subspace,
                       radical: Subspace, drop: int) -> Optional[List[Subspace]]:
        """Subspaces U with radical ⊆ U ⊆ member, dim member/U = drop, passing fits()."""
        f = self.f
        q = member.dim - radical.dim
        if drop > q:
            return []
        keep = q - drop
        if keep == q:
            options = [member]
        elif keep == 0:
            options = [radical]
        else:
            lift = f.complement(radical, member)
            if q == 2:
                return self.line_choices(l, parts, i, radical, lift)
            try:
                subspaces = f.enumerate_subspaces(f.full(q), keep, self.budget)
            except EnumerationBudgetExceeded as e:
                self.undecided = str(e)
                return None
            n = member.ambient_dim
            options = (f.sum(radical, f.span(f.matmul(w.basis, lift), n)) for w in subspaces)
        return [u for u in options if self.fits(l + 1, parts, i, u)]

    def search(self, l: int, flag: List[GradedSubspace]) -> Optional[List[GradedSubspace]]:
        self.nodes += 1
        if l == self.m.alg.loewy:
            return flag
        member = flag[-1]
        radical = arrow_image(self.m, member)
        return self.choose(l, flag, member, radical, list(radical.parts), 1)

    def choose(self, l: int, flag: List[GradedSubspace], member: GradedSubspace,
               radical: GradedSubspace, parts: List[Subspace], i: int) -> Optional[List[GradedSubspace]]:
        if i > self.m.alg.n:
            return self.search(l + 1, flag + [GradedSubspace(tuple(parts))])
        choices = self.vertex_choices(l, parts, i, member.at(i), radical.at(i), self.s.layers[l][i - 1])
        for u in choices or ():
            parts[i - 1] = u
            found = self.choose(l, flag, member, radical, parts, i + 1)
            if found is not None:
                return found
        parts[i - 1] = radical.at(i)
        return None


def search_fields(field: PrimeField, extension_degree: int) -> Iterator[PrimeField]:
    """The field itself, then F_{p^k} for k up to extension_degree within MAX_FIELD_ORDER."""
    yield field
    if field.degree != 1:
        return
    for k in range(2, extension_degree + 1):
        if field.p ** k > MAX_FIELD_ORDER:
            run_logger.logger.warning(f"F_{field.p}^{k} exceeds {MAX_FIELD_ORDER} elements; "
                                      f"flags searched up to degree {k - 1}")
            return
        yield field.extension(k)


def has_filtration(m: RepPoint, s: SemisimpleSequence, budget: int = ENUMERATION_BUDGET,
                   extension_degree: int = EXTENSION_DEGREE) -> FiltrationDecision:
    """Search for a flag over the module's field and then over its extensions.

    A flag may need the roots of a quadratic, so NO over F_p alone is not NO
    over the algebraic closure; a YES carries a witness over the field it was
    found in.
    """
    _check_sequence(m, s)
    radical = radical_layering(m)
    if not dominance_leq(s, radical):
        return FiltrationDecision(Verdict.NO, reason=f"{s} is not dominated by S(M) = {radical}")
    if s == radical:
        return FiltrationDecision(Verdict.YES, Filtration(m, s, tuple(radical_layer_spaces(m))),
                                  "radical filtration")
    searched = []
    for field in search_fields(m.field, extension_degree):
        mk = m.over(field)
        search = _FlagSearch(mk, s, budget)
        flag = search.search(0, [full_graded(mk)])
        if flag is not None:
            return FiltrationDecision(Verdict.YES, Filtration(mk, s, tuple(flag)),
                                      f"found over {field.label} after {search.nodes} nodes")
        if search.undecided:
            run_logger.logger.warning(f"filtration query for {s} undecided: {search.undecided}")
            return FiltrationDecision(Verdict.UNDECIDED,
                                      reason="; ".join(searched + [search.undecided]))
        searched.append(f"no flag over {field.label} ({search.nodes} nodes)")
    return FiltrationDecision(Verdict.NO, reason="; ".join(searched))


def has_cofiltration(m: RepPoint, s_star: SemisimpleSequence, budget: int = ENUMERATION_BUDGET,
                     extension_degree: int = EXTENSION_DEGREE) -> FiltrationDecision:
    """Ascending chains of m with quotients s_star, via descending flags of D(m)."""
    _check_sequence(m, s_star)
    decision = has_filtration(dualize(m), s_star, budget, extension_degree)
    if not decision.found:
        return FiltrationDecision(decision.verdict, reason=decision.reason)
    f = decision.witness.module.field
    chain = tuple(GradedSubspace(tuple(f.annihilator(part) for part in member.parts))
                  for member in decision.witness.flag)
    return FiltrationDecision(Verdict.YES, Cofiltration(m.over(f), s_star, chain), decision.reason)


def map_ordered(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """map, optionally on a thread pool; results keep the input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GammaReport:
    governing: Tuple[Tuple[SemisimpleSequence, Filtration], ...]
    undecided: Tuple[SemisimpleSequence, ...]
    realizable_only: bool = True

    @property
    def low(self) -> int:
        return len(self.governing)

    @property
    def high(self) -> int:
        return len(self.governing) + len(self.undecided)

    @property
    def value(self) -> Optional[int]:
        return self.low if not self.undecided else None

    def sequences(self) -> List[SemisimpleSequence]:
        return [s for s, _ in self.governing]


def governing_sequences(m: RepPoint, realizable_only: bool = True,
                        budget: int = ENUMERATION_BUDGET, workers: int = 1,
                        extension_degree: int = EXTENSION_DEGREE) -> GammaReport:
    radical = radical_layering(m)
    candidates = [s for s in enumerate_sequences(m.alg, m.d, realizable_only)
                  if dominance_leq(s, radical)]
    decisions = map_ordered(lambda s: has_filtration(m, s, budget, extension_degree), candidates, workers)
    governing = tuple((s, dec.witness) for s, dec in zip(candidates, decisions) if dec.found)
    undecided = tuple(s for s, dec in zip(candidates, decisions) if dec.verdict is Verdict.UNDECIDED)
    return GammaReport(governing, undecided, realizable_only)


def gamma(m: RepPoint, budget: int = ENUMERATION_BUDGET, workers: int = 1,
          extension_degree: int = EXTENSION_DEGREE) -> GammaReport:
    """Realizable sequences governing some filtration of m."""
    return governing_sequences(m, True, budget, workers, extension_degree)
