"""
Irreducible components of Rep_d for a truncated path algebra.

Every realizable sequence S contributes the closure of Rep S. That closure
is a component exactly when the generic module G(S) has no filtration
governed by a realizable S' != S; a governing S' is the rejection
certificate. Generic coefficients are random in F_p and flags are searched
over F_p and its extensions up to a fixed degree, so every report carries
the prime, the seed, the retry count and that degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config import Config
from field import PrimeField
from filt import Filtration, Verdict, has_filtration, map_ordered
from logger import run_logger
from quiver import (Algebra, DimVector, SemisimpleSequence, dominance_leq,
                    enumerate_sequences, is_realizable)
from rep import RepPoint, ThetaPlus, format_module, theta_plus, theta_plus_less
from skeleta import GenericityFailure, Hypergraph, enumerate_skeleta, generic_module, to_dot


@dataclass(frozen=True)
class Component:
    layering: SemisimpleSequence
    witness: RepPoint
    theta_plus: ThetaPlus
    hypergraph: Hypergraph
    seed: Tuple[int, ...]


@dataclass(frozen=True)
class Rejection:
    layering: SemisimpleSequence
    governed_by: SemisimpleSequence
    witness: RepPoint
    filtration: Filtration
    seed: Tuple[int, ...]


@dataclass(frozen=True)
class Undetermined:
    layering: SemisimpleSequence
    query: Optional[SemisimpleSequence]
    reason: str


Outcome = Any  # Component | Rejection | Undetermined


@dataclass(frozen=True)
class ComponentReport:
    algebra: Algebra
    d: DimVector
    prime: int
    seed: int
    retries: int
    extension_degree: int
    components: Tuple[Component, ...]
    rejected: Tuple[Rejection, ...]
    undetermined: Tuple[Undetermined, ...]

    def accepted(self) -> List[SemisimpleSequence]:
        return [c.layering for c in self.components]

    @property
    def decided(self) -> bool:
        return not self.undetermined


@dataclass(frozen=True)
class _Witness:
    module: RepPoint
    hypergraph: Hypergraph
    theta: ThetaPlus
    seed: Tuple[int, ...]


def _witness(alg: Algebra, sk, seed: Tuple[int, ...], field: PrimeField, config: Config) -> _Witness:
    m, h = generic_module(alg, sk, seed, field, config.generic_retries)
    return _Witness(m, h, theta_plus(m), seed)


def _order_candidates(s: SemisimpleSequence, candidates: List[SemisimpleSequence],
                      thetas: Dict[SemisimpleSequence, ThetaPlus]) -> List[SemisimpleSequence]:
    """Candidates whose generic Θ⁺ lies strictly below that of s first."""
    mine = thetas.get(s)
    if mine is None:
        return candidates

    def below(t: SemisimpleSequence) -> bool:
        other = thetas.get(t)
        return other is not None and theta_plus_less(other, mine)

    return [t for t in candidates if below(t)] + [t for t in candidates if not below(t)]


def _test_skeleton(alg: Algebra, s: SemisimpleSequence, index: int, sk_index: int, sk,
                   first: Optional[_Witness], candidates: List[SemisimpleSequence],
                   field: PrimeField, config: Config) -> Outcome:
    certificate: Optional[Rejection] = None
    for attempt in range(config.retries):
        seed = (config.seed, index, sk_index, attempt)
        try:
            w = first if attempt == 0 and first is not None else _witness(alg, sk, seed, field, config)
        except GenericityFailure as e:
            return Undetermined(s, None, str(e))
        governing = None
        open_query = None
        for t in candidates:
            decision = has_filtration(w.module, t, config.budget, config.extension_degree)
            if decision.found:
                governing = (t, decision.witness)
                break
            if decision.verdict is Verdict.UNDECIDED and open_query is None:
                open_query = (t, decision.reason)
        if governing is None:
            if open_query is not None:
                return Undetermined(s, open_query[0], open_query[1])
            return Component(s, w.module, w.theta, w.hypergraph, w.seed)
        if certificate is None:
            certificate = Rejection(s, governing[0], w.module, governing[1], w.seed)
        run_logger.logger.info(f"{s.pretty()} governed by {governing[0].pretty()} (attempt {attempt})")
    return certificate


def _classify_one(alg: Algebra, s: SemisimpleSequence, index: int, sequences: List[SemisimpleSequence],
                  firsts: Dict[SemisimpleSequence, _Witness], field: PrimeField,
                  config: Config) -> Outcome:
    skeleta = enumerate_skeleta(alg, s)
    if not config.sweep_skeleta:
        skeleta = skeleta[:1]
    thetas = {t: w.theta for t, w in firsts.items()}
    candidates = _order_candidates(
        s, [t for t in sequences if t != s and dominance_leq(t, s)], thetas)
    outcomes = []
    for sk_index, sk in enumerate(skeleta):
        first = firsts.get(s) if sk_index == 0 else None
        outcomes.append(_test_skeleton(alg, s, index, sk_index, sk, first, candidates, field, config))
    if len(outcomes) == 1:
        return outcomes[0]
    undetermined = [o for o in outcomes if isinstance(o, Undetermined)]
    if undetermined:
        return undetermined[0]
    accepted = [o for o in outcomes if isinstance(o, Component)]
    if 2 * len(accepted) > len(outcomes):
        return accepted[0]
    return next(o for o in outcomes if isinstance(o, Rejection))


def classify(alg: Algebra, d: Sequence[int], config: Optional[Config] = None) -> ComponentReport:
    config = config or Config()
    d = alg.check_dim(d)
    field = PrimeField(config.prime)
    sequences = enumerate_sequences(alg, d, realizable_only=True)

    firsts: Dict[SemisimpleSequence, _Witness] = {}
    for index, s in enumerate(sequences):
        sk = enumerate_skeleta(alg, s)[0]
        try:
            firsts[s] = _witness(alg, sk, (config.seed, index, 0, 0), field, config)
        except GenericityFailure as e:
            run_logger.log_error(str(e), "generic module", prime=config.prime,
                                 seed=config.seed, sequence=str(s))

    outcomes = map_ordered(
        lambda item: _classify_one(alg, item[1], item[0], sequences, firsts, field, config),
        list(enumerate(sequences)), config.workers)

    report = ComponentReport(
        algebra=alg, d=d, prime=config.prime, seed=config.seed, retries=config.retries,
        extension_degree=config.extension_degree,
        components=tuple(o for o in outcomes if isinstance(o, Component)),
        rejected=tuple(o for o in outcomes if isinstance(o, Rejection)),
        undetermined=tuple(o for o in outcomes if isinstance(o, Undetermined)),
    )
    run_logger.log_classification(alg.name, d, len(report.components), len(report.rejected),
                                  len(report.undetermined), config.prime)
    return report


@dataclass(frozen=True)
class MultiPrimeReport:
    reports: Tuple[ComponentReport, ...]

    @property
    def consistent(self) -> bool:
        accepted = [r.accepted() for r in self.reports if r.decided]
        return all(a == accepted[0] for a in accepted)


def classify_multi(alg: Algebra, d: Sequence[int], config: Optional[Config] = None) -> MultiPrimeReport:
    config = config or Config()
    return MultiPrimeReport(tuple(classify(alg, d, config.with_prime(p)) for p in config.all_primes()))


# -- closures and allocation -----------------------------------------------

@dataclass(frozen=True)
class ClosureDecision:
    verdict: Verdict
    witness: Optional[RepPoint]
    filtration: Optional[Filtration]
    note: str


def closure_contains(alg: Algebra, s: SemisimpleSequence, s_prime: SemisimpleSequence,
                     config: Optional[Config] = None) -> ClosureDecision:
    """Is the closure of Rep s inside the closure of Rep s_prime?"""
    config = config or Config()
    for t in (s, s_prime):
        if not is_realizable(alg, t):
            raise ValueError(f"{t.pretty()} is not realizable")
    if s.total != s_prime.total:
        raise ValueError(f"dimension vectors differ: {s.total} vs {s_prime.total}")
    if not dominance_leq(s_prime, s):
        return ClosureDecision(Verdict.NO, None, None,
                               f"{s_prime.pretty()} is not dominated by {s.pretty()}")
    field = PrimeField(config.prime)
    sk = enumerate_skeleta(alg, s)[0]
    evidence = None
    undecided = ""
    for attempt in range(config.retries):
        try:
            g, _ = generic_module(alg, sk, (config.seed, attempt), field, config.generic_retries)
        except GenericityFailure as e:
            run_logger.log_error(str(e), "closure", prime=config.prime,
                                 seed=config.seed, sequence=str(s))
            return ClosureDecision(Verdict.UNDECIDED, None, None, str(e))
        decision = has_filtration(g, s_prime, config.budget, config.extension_degree)
        if decision.verdict is Verdict.NO:
            return ClosureDecision(Verdict.NO, g, None,
                                   "the generic module has no governed filtration; non-containment is certified")
        if decision.verdict is Verdict.UNDECIDED:
            undecided = decision.reason
        elif evidence is None:
            evidence = (g, decision.witness)
    if undecided:
        return ClosureDecision(Verdict.UNDECIDED, None, None, undecided)
    return ClosureDecision(Verdict.YES, evidence[0], evidence[1],
                           f"generic-level evidence at p={config.prime} over {config.retries} seeds")


@dataclass(frozen=True)
class Allocation:
    containing: Tuple[Tuple[SemisimpleSequence, Filtration], ...]
    undetermined: Tuple[Tuple[SemisimpleSequence, str], ...]

    def layerings(self) -> List[SemisimpleSequence]:
        return [s for s, _ in self.containing]


def allocate(m: RepPoint, report: ComponentReport, budget: Optional[int] = None,
             workers: int = 1, extension_degree: Optional[int] = None) -> Allocation:
    """Components whose generic layering governs a filtration of m."""
    if m.d != report.d:
        raise ValueError(f"module has dimension vector {m.d}; the report is for {report.d}")
    kwargs = {"budget": budget, "extension_degree": extension_degree}
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    layerings = report.accepted()
    decisions = map_ordered(lambda s: has_filtration(m, s, **kwargs), layerings, workers)
    return Allocation(
        tuple((s, dec.witness) for s, dec in zip(layerings, decisions) if dec.found),
        tuple((s, dec.reason) for s, dec in zip(layerings, decisions)
              if dec.verdict is Verdict.UNDECIDED),
    )


# -- JSON ------------------------------------------------------------------

def algebra_to_json(alg: Algebra) -> Dict[str, Any]:
    return {
        "n": alg.n,
        "arrows": [[a.id, a.source, a.target] for a in alg.arrows],
        "loewy": alg.loewy,
    }


def report_to_json(report: ComponentReport) -> Dict[str, Any]:
    return {
        "algebra": algebra_to_json(report.algebra),
        "d": list(report.d),
        "prime": report.prime,
        "seed": report.seed,
        "retries": report.retries,
        "extension_degree": report.extension_degree,
        "components": [
            {
                "layering": str(c.layering),
                "theta_plus": c.theta_plus.to_json(),
                "witness": format_module(c.witness),
                "hypergraph_dot": to_dot(c.hypergraph),
                "seed": list(c.seed),
            }
            for c in report.components
        ],
        "rejected": [
            {"layering": str(r.layering), "governed_by": str(r.governed_by)}
            for r in report.rejected
        ],
        "undetermined": [
            {"layering": str(u.layering),
             "query": str(u.query) if u.query is not None else None,
             "reason": u.reason}
            for u in report.undetermined
        ],
    }
