"""
Skeleta of coordinatized projective covers and the generic modules they span.

A ProjPath is p.z_r: the path p applied to the r-th top element. A Skeleton
is a set of ProjPaths closed under initial subpaths whose layer counts match
a semisimple sequence. Critical paths leave the skeleton by one arrow; in a
generic module each of them is a combination of the longer skeleton paths
ending at the same vertex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import GENERIC_RETRIES, LIFT_ATTEMPTS
from field import PrimeField
from logger import run_logger
from quiver import Algebra, Arrow, ParseError, QPath, SemisimpleSequence, content_lines
from rep import RepPoint, act_path, radical_layer_spaces, radical_layering

Seed = Union[int, Sequence[int]]


class GenericityFailure(RuntimeError):
    def __init__(self, prime: int, retries: int):
        super().__init__(f"genericity failure at p = {prime} after {retries} attempts; "
                         f"increase p or retries")
        self.prime = prime
        self.retries = retries


class NotASkeleton(ValueError):
    pass


@dataclass(frozen=True)
class ProjPath:
    gen: int
    path: QPath

    @property
    def length(self) -> int:
        return self.path.length

    @property
    def end(self) -> int:
        return self.path.end

    def extend(self, arrow: Arrow) -> "ProjPath":
        return ProjPath(self.gen, self.path.extend(arrow))

    def sort_key(self):
        return (self.length, self.gen, self.path.applied)

    def __str__(self) -> str:
        return "*".join(self.path.arrows + (f"z{self.gen}",))


@dataclass(frozen=True)
class Skeleton:
    generators: Tuple[int, ...]  # vertex norming z_1, z_2, ...
    paths: Tuple[ProjPath, ...]
    loewy: int
    n: int
    members: frozenset = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(sorted(self.paths, key=ProjPath.sort_key)))
        object.__setattr__(self, "members", frozenset(self.paths))

    def __contains__(self, pp: ProjPath) -> bool:
        return pp in self.members

    @property
    def layering(self) -> SemisimpleSequence:
        layers = [[0] * self.n for _ in range(self.loewy)]
        for pp in self.paths:
            layers[pp.length][pp.end - 1] += 1
        return SemisimpleSequence.of(layers)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.layering.total

    def basis_at(self, vertex: int) -> List[ProjPath]:
        return [pp for pp in self.paths if pp.end == vertex]

    def validate(self, alg: Algebra):
        """Initial-subpath closure, generator presence, exact layer counts."""
        for r, v in enumerate(self.generators, start=1):
            if ProjPath(r, QPath.trivial(v)) not in self:
                raise NotASkeleton(f"generator z{r} missing")
        for pp in self.paths:
            if pp.gen < 1 or pp.gen > len(self.generators) or \
                    pp.path.start != self.generators[pp.gen - 1]:
                raise NotASkeleton(f"{pp} does not start at the vertex of z{pp.gen}")
            if pp.length > alg.L:
                raise NotASkeleton(f"{pp} is longer than L={alg.L}")
            if pp.length:
                head = alg.arrow(pp.path.arrows[0])
                parent = ProjPath(pp.gen, QPath(pp.path.arrows[1:], pp.path.start, head.source))
                if parent not in self:
                    raise NotASkeleton(f"initial subpath {parent} of {pp} missing")
        top = self.layering.layers[0]
        expected = [self.generators.count(i) for i in range(1, self.n + 1)]
        if list(top) != expected:
            raise NotASkeleton("layer 0 must consist of the generators")


@dataclass(frozen=True)
class CriticalPath:
    q: ProjPath
    sigma_q: Tuple[ProjPath, ...]


@dataclass(frozen=True)
class Relation:
    """q = sum of c_{q,p} p over the support tau_q."""
    q: ProjPath
    coefficients: Tuple[Tuple[ProjPath, int], ...]

    @property
    def support(self) -> Tuple[ProjPath, ...]:
        return tuple(p for p, _ in self.coefficients)


@dataclass(frozen=True)
class Hypergraph:
    skeleton: Skeleton
    relations: Tuple[Relation, ...]

    def supports(self) -> Dict[ProjPath, Tuple[ProjPath, ...]]:
        return {r.q: r.support for r in self.relations}


def generators_for(s: SemisimpleSequence) -> Tuple[int, ...]:
    return tuple(v for v, k in enumerate(s.layers[0], start=1) for _ in range(k))


def enumerate_skeleta(alg: Algebra, s: SemisimpleSequence) -> List[Skeleton]:
    gens = generators_for(s)
    top = [ProjPath(r, QPath.trivial(v)) for r, v in enumerate(gens, start=1)]
    return [Skeleton(gens, tuple(paths), alg.loewy, alg.n)
            for paths in _grow(alg, s, 1, top, list(top))]


def _grow(alg: Algebra, s: SemisimpleSequence, l: int, previous: List[ProjPath],
          acc: List[ProjPath]) -> Iterator[List[ProjPath]]:
    if l == alg.loewy:
        yield acc
        return
    candidates = [pp.extend(a) for pp in previous for a in alg.arrows_from(pp.end)]
    per_vertex = []
    for i in range(1, alg.n + 1):
        ending = [q for q in candidates if q.end == i]
        need = s.layers[l][i - 1]
        if len(ending) < need:
            return
        per_vertex.append(itertools.combinations(ending, need))
    for choice in itertools.product(*per_vertex):
        chosen = [q for group in choice for q in group]
        yield from _grow(alg, s, l + 1, chosen, acc + chosen)


def critical_paths(alg: Algebra, sk: Skeleton) -> List[CriticalPath]:
    out = []
    for pp in sk.paths:
        if pp.length >= alg.L:
            continue
        for a in alg.arrows_from(pp.end):
            q = pp.extend(a)
            if q in sk:
                continue
            sigma_q = tuple(p for p in sk.paths if p.length >= q.length and p.end == q.end)
            out.append(CriticalPath(q, sigma_q))
    return out


def _rng(seed: Seed, attempt: int) -> np.random.Generator:
    entropy = [seed] if isinstance(seed, int) else list(seed)
    return np.random.default_rng(entropy + [attempt])


def module_from_relations(alg: Algebra, sk: Skeleton, relations: Sequence[Relation],
                          field: PrimeField) -> RepPoint:
    """The quotient of the projective cover with basis sk, cut out by the relations."""
    index = {pp: k for i in range(1, alg.n + 1) for k, pp in enumerate(sk.basis_at(i))}
    expansion = {r.q: r.coefficients for r in relations}
    d = sk.dims
    mats = {}
    for a in alg.arrows:
        mat = np.zeros((d[a.target - 1], d[a.source - 1]), dtype=np.int64)
        for col, pp in enumerate(sk.basis_at(a.source)):
            if pp.length >= alg.L:
                continue
            q = pp.extend(a)
            if q in sk:
                mat[index[q], col] = 1
            else:
                for target, c in expansion.get(q, ()):
                    mat[index[target], col] = c
        mats[a.id] = mat
    return RepPoint(alg, d, mats, field)


def generic_module(alg: Algebra, sk: Skeleton, rng_seed: Seed, field: PrimeField,
                   retries: int = GENERIC_RETRIES) -> Tuple[RepPoint, Hypergraph]:
    """G = P/C with random nonzero coefficients on every sigma_q."""
    crit = critical_paths(alg, sk)
    for attempt in range(retries):
        rng = _rng(rng_seed, attempt)
        relations = tuple(
            Relation(c.q, tuple((p, int(rng.integers(1, field.order))) for p in c.sigma_q))
            for c in crit
        )
        m = module_from_relations(alg, sk, relations, field)
        if radical_layering(m) == sk.layering:
            return m, Hypergraph(sk, relations)
        run_logger.logger.warning(f"generic module for {sk.layering} degenerate at attempt {attempt}; reseeding")
    raise GenericityFailure(field.p, retries)


# -- skeleta of a given module ---------------------------------------------

Lift = Tuple[np.ndarray, ...]  # one vector per generator


def _top_lifts(m: RepPoint, attempts: int, seed: Seed) -> Iterator[Lift]:
    """Greedy echelon lift of a basis of M/JM, then randomized lifts."""
    f = m.field
    s = radical_layering(m)
    gens = generators_for(s)
    jm = radical_layer_spaces(m)[1]
    complements = {i: f.complement(jm.at(i), f.full(di)) for i, di in enumerate(m.d, start=1)}

    def assemble(per_vertex: Dict[int, np.ndarray]) -> Lift:
        used = {i: 0 for i in per_vertex}
        out = []
        for v in gens:
            out.append(per_vertex[v][used[v]])
            used[v] += 1
        return tuple(out)

    yield assemble(complements)
    for attempt in range(attempts):
        rng = _rng(seed, attempt)
        per_vertex = {}
        for i, c in complements.items():
            t = c.shape[0]
            if t == 0:
                per_vertex[i] = c
                continue
            mix = f.random_matrix(rng, t, t)
            while f.rank(mix) < t:
                mix = f.random_matrix(rng, t, t)
            z = f.matmul(mix, c)
            j = jm.at(i)
            if j.dim:
                z = f.add(z, f.matmul(f.random_matrix(rng, t, j.dim), j.basis))
            per_vertex[i] = z
        yield assemble(per_vertex)


def _basis_matrix(m: RepPoint, sk: Skeleton, lift: Lift, vertex: int) -> np.ndarray:
    f = m.field
    cols = [f.matmul(act_path(m, pp.path), lift[pp.gen - 1][:, np.newaxis])[:, 0]
            for pp in sk.basis_at(vertex)]
    di = m.d[vertex - 1]
    return np.array(cols, dtype=np.int64).T if cols else np.zeros((di, 0), dtype=np.int64)


def _rank_deficits(m: RepPoint, sk: Skeleton, lift: Lift) -> Dict[int, int]:
    out = {}
    for i, di in enumerate(m.d, start=1):
        b = _basis_matrix(m, sk, lift, i)
        r = m.field.rank(b) if b.size else 0
        if r < di:
            out[i] = di - r
    return out


def find_lift(m: RepPoint, sk: Skeleton, attempts: int = LIFT_ATTEMPTS,
              seed: Seed = 0) -> Optional[Lift]:
    if sk.layering != radical_layering(m):
        return None
    for lift in _top_lifts(m, attempts, seed):
        if not _rank_deficits(m, sk, lift):
            return lift
    return None


def skeleta_of(m: RepPoint, attempts: int = LIFT_ATTEMPTS, seed: Seed = 0) -> List[Skeleton]:
    s = radical_layering(m)
    lifts = list(_top_lifts(m, attempts, seed))
    out = []
    for sk in enumerate_skeleta(m.alg, s):
        if any(not _rank_deficits(m, sk, lift) for lift in lifts):
            out.append(sk)
    return out


def extract_hypergraph(m: RepPoint, sk: Skeleton, attempts: int = LIFT_ATTEMPTS,
                       seed: Seed = 0) -> Hypergraph:
    if sk.layering != radical_layering(m):
        raise NotASkeleton(f"skeleton layering {sk.layering} differs from S(M) = {radical_layering(m)}")
    lift = find_lift(m, sk, attempts, seed)
    if lift is None:
        greedy = next(_top_lifts(m, 0, seed))
        deficits = _rank_deficits(m, sk, greedy)
        detail = ", ".join(f"vertex {i} short by {k}" for i, k in sorted(deficits.items()))
        raise NotASkeleton(f"skeleton paths are not a basis of M: rank deficiency at {detail}")
    f = m.field
    relations = []
    for c in critical_paths(m.alg, sk):
        v = f.matmul(act_path(m, c.q.path), lift[c.q.gen - 1][:, np.newaxis])[:, 0]
        coords = f.solve(_basis_matrix(m, sk, lift, c.q.end), v)
        allowed = set(c.sigma_q)
        coefficients = tuple((pp, int(x)) for pp, x in zip(sk.basis_at(c.q.end), coords)
                             if x and pp in allowed)
        relations.append(Relation(c.q, coefficients))
    return Hypergraph(sk, tuple(relations))


# -- text and DOT output ---------------------------------------------------

def format_skeleton(sk: Skeleton) -> str:
    return "\n".join(str(pp) for pp in sk.paths) + "\n"


def parse_skeleton(text: str, alg: Algebra, s: SemisimpleSequence) -> Skeleton:
    """One ProjPath per line; the generator vertices come from the top of s."""
    generators = generators_for(s)
    paths = []
    for number, line in content_lines(text):
        words = line.split("*")
        gen = words[-1]
        if not gen.startswith("z") or not gen[1:].isdigit():
            raise ParseError(f"path must end in z<r>: {line!r}", number)
        r = int(gen[1:])
        if not 1 <= r <= len(generators):
            raise ParseError(f"z{r} is not among the {len(generators)} generators", number)
        path = QPath.trivial(generators[r - 1])
        try:
            for arrow_id in reversed(words[:-1]):
                path = path.extend(alg.arrow(arrow_id))
        except (KeyError, ValueError) as e:
            raise ParseError(str(e), number) from e
        paths.append(ProjPath(r, path))
    sk = Skeleton(generators, tuple(paths), alg.loewy, alg.n)
    try:
        sk.validate(alg)
    except NotASkeleton as e:
        raise ParseError(str(e)) from e
    if sk.layering != s:
        raise ParseError(f"skeleton has layering {sk.layering}, expected {s}")
    return sk


class DotGraph:
    """Minimal DOT digraph builder."""

    def __init__(self, name: str = "H"):
        self.name = name
        self.nodes: List[str] = []
        self.edges: List[str] = []

    def _unpack(self, args: Dict[str, str]) -> str:
        return ",".join(f"{k}=\"{v}\"" for k, v in args.items())

    def node(self, identifier: str, **kwargs):
        self.nodes.append(f"\"{identifier}\" [{self._unpack(kwargs)}]")

    def edge(self, a: str, b: str, **kwargs):
        self.edges.append(f"\"{a}\" -> \"{b}\" [{self._unpack(kwargs)}]")

    def render(self) -> str:
        lines = [f"digraph {self.name} {{"]
        lines += [f"  {line};" for line in self.nodes + self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


def _node_id(pp: ProjPath) -> str:
    return f"{pp.gen}:{pp}"


def to_dot(h: Hypergraph) -> str:
    """Solid edges along the skeleton, dashed critical arrows into one pool node per tau_q."""
    g = DotGraph()
    by_word = {(pp.gen, pp.path.arrows): pp for pp in h.skeleton.paths}

    def parent(pp: ProjPath) -> ProjPath:
        return by_word[(pp.gen, pp.path.arrows[1:])]

    for pp in h.skeleton.paths:
        g.node(_node_id(pp), label=str(pp.end))
    for pp in h.skeleton.paths:
        if pp.length:
            g.edge(_node_id(parent(pp)), _node_id(pp), label=pp.path.arrows[0], style="solid")
    for k, rel in enumerate(h.relations, start=1):
        pool = f"tau{k}:{rel.q}"
        g.node(pool, label="", shape="point")
        g.edge(_node_id(parent(rel.q)), pool, label=rel.q.path.arrows[0], style="dashed")
        for p in rel.support:
            g.edge(pool, _node_id(p), style="dotted", arrowhead="none")
    return g.render()
