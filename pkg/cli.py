#!/usr/bin/env python3
"""
Command-line front end for the component classifier.
Reads quiver, module and sequence text files and prints human-readable or
JSON results. Exit codes: 0 decided, 2 undecided, 1 usage or parse error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from components import (algebra_to_json, allocate, classify, classify_multi,
                        closure_contains, report_to_json)
from config import (DEFAULT_PRIME, DEFAULT_SEED, CLASSIFY_RETRIES, ENUMERATION_BUDGET,
                    EXTENSION_DEGREE, WORKERS, Config)
from field import EnumerationBudgetExceeded, PrimeField
from filt import Verdict, governing_sequences, has_cofiltration, has_filtration
from logger import run_logger
from quiver import (Algebra, enumerate_sequences, format_sequence, is_realizable,
                    parse_dim, parse_quiver, parse_sequence)
from rep import format_module, parse_module, path_rank, theta, theta_plus
from skeleta import (GenericityFailure, enumerate_skeleta, format_skeleton, generic_module,
                     skeleta_of, to_dot)

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2

# (payload, human text, undecided)
Result = Tuple[Dict[str, Any], str, bool]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def _load_algebra(path: str) -> Algebra:
    return parse_quiver(Path(path).read_text(encoding="utf-8"), name=Path(path).stem)


def _load_module(path: str, alg: Algebra, prime: int):
    return parse_module(Path(path).read_text(encoding="utf-8"), alg, PrimeField(prime))


def _config(args) -> Config:
    primes = tuple(int(p) for p in args.primes.split(",")) if args.primes else ()
    return Config(prime=args.prime, seed=args.seed, retries=args.retries, budget=args.budget,
                  primes=primes, output="json" if args.json else "human",
                  sweep_skeleta=args.sweep_skeleta, workers=args.workers,
                  extension_degree=args.extension_degree)


def _base(config: Config, alg: Algebra) -> Dict[str, Any]:
    return {"algebra": algebra_to_json(alg), "prime": config.prime, "seed": config.seed}


# -- commands ----------------------------------------------------------------

def cmd_components(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    d = parse_dim(args.dim, alg)
    if config.primes:
        multi = classify_multi(alg, d, config)
        payload = {"reports": [report_to_json(r) for r in multi.reports],
                   "consistent": multi.consistent}
        lines = [f"p={r.prime}: {len(r.components)} components "
                 f"{[c.layering.pretty() for c in r.components]}" for r in multi.reports]
        lines.append("✅ primes agree" if multi.consistent else "❌ primes disagree")
        return payload, "\n".join(lines), any(not r.decided for r in multi.reports)
    report = classify(alg, d, config)
    lines = [f"{len(report.components)} irreducible components of Rep_{list(d)} "
             f"(p={report.prime}, seed={report.seed}, retries={report.retries}):"]
    lines += [f"  ✅ {c.layering.pretty()}" for c in report.components]
    lines += [f"  ✗ {r.layering.pretty()} governed by {r.governed_by.pretty()}" for r in report.rejected]
    lines += [f"  ? {u.layering.pretty()}: {u.reason}" for u in report.undetermined]
    return report_to_json(report), "\n".join(lines), not report.decided


def cmd_realizable(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    s = parse_sequence(args.seq, alg)
    ok = is_realizable(alg, s)
    payload = {**_base(config, alg), "sequence": str(s), "realizable": ok}
    return payload, f"{s.pretty()} is {'realizable' if ok else 'not realizable'}", False


def cmd_sequences(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    d = parse_dim(args.dim, alg)
    seqs = enumerate_sequences(alg, d, realizable_only=args.realizable)
    payload = {**_base(config, alg), "d": list(d), "realizable_only": args.realizable,
               "sequences": [str(s) for s in seqs]}
    text = "\n".join(f"{format_sequence(s):<24} {s.pretty()}" for s in seqs)
    return payload, text + f"\n{len(seqs)} sequences", False


def cmd_skeleta(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    if args.module:
        m = _load_module(args.module, alg, config.prime)
        skeleta = skeleta_of(m, config.lift_attempts, config.seed)
    else:
        if not args.seq:
            raise UsageError("skeleta needs --seq or --module")
        skeleta = enumerate_skeleta(alg, parse_sequence(args.seq, alg))
    payload = {**_base(config, alg), "skeleta": [[str(pp) for pp in sk.paths] for sk in skeleta]}
    text = "\n".join(f"# skeleton {k}\n{format_skeleton(sk)}" for k, sk in enumerate(skeleta, start=1))
    return payload, text + f"{len(skeleta)} skeleta", False


def cmd_generic(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    s = parse_sequence(args.seq, alg)
    skeleta = enumerate_skeleta(alg, s)
    if not skeleta:
        raise UsageError(f"{s.pretty()} is not realizable; Rep S is empty")
    m, h = generic_module(alg, skeleta[0], (config.seed,), PrimeField(config.prime),
                          config.generic_retries)
    dot = to_dot(h)
    if args.dot:
        Path(args.dot).write_text(dot, encoding="utf-8")
    if args.out:
        Path(args.out).write_text(format_module(m), encoding="utf-8")
    payload = {**_base(config, alg), "sequence": str(s), "module": format_module(m),
               "skeleton": [str(pp) for pp in skeleta[0].paths], "hypergraph_dot": dot}
    return payload, format_module(m) + ("" if args.dot else "\n" + dot), False


def _gamma_once(args, config: Config, alg: Algebra, prime: int) -> Dict[str, Any]:
    if args.module:
        m = _load_module(args.module, alg, prime)
    else:
        s = parse_sequence(args.seq, alg)
        skeleta = enumerate_skeleta(alg, s)
        if not skeleta:
            raise UsageError(f"{s.pretty()} is not realizable; Rep S is empty")
        m, _ = generic_module(alg, skeleta[0], (config.seed,), PrimeField(prime), config.generic_retries)
    report = governing_sequences(m, not args.all_sequences, config.budget, config.workers,
                                 config.extension_degree)
    return {"prime": prime, "gamma": report.value, "gamma_low": report.low, "gamma_high": report.high,
            "realizable_only": report.realizable_only,
            "governing": [{"sequence": str(s), "field": f.module.field.label, "filtration": f.to_json()}
                          for s, f in report.governing],
            "undecided": [str(s) for s in report.undecided]}


def cmd_gamma(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    if not (args.module or args.seq):
        raise UsageError("gamma needs --module or --seq")
    runs = [_gamma_once(args, config, alg, p) for p in config.all_primes()]
    lines = []
    for run in runs:
        value = run["gamma"] if run["gamma"] is not None else f"[{run['gamma_low']}, {run['gamma_high']}]"
        lines.append(f"p={run['prime']}: Γ = {value}")
        lines += [f"  {g['sequence']}" for g in run["governing"]]
    payload = {**_base(config, alg), "runs": runs}
    return payload, "\n".join(lines), any(run["undecided"] for run in runs)


def _decide_over_primes(args, config: Config, alg: Algebra, decide) -> Tuple[Verdict, List[Dict[str, Any]]]:
    runs = []
    for p in config.all_primes():
        m = _load_module(args.module, alg, p)
        s = parse_sequence(args.seq, alg)
        decision = decide(m, s, config.budget, config.extension_degree)
        witness = decision.witness
        runs.append({"prime": p, "verdict": decision.verdict.value, "reason": decision.reason,
                     "field": witness.module.field.label if witness else None,
                     "witness": witness.to_json() if witness else None})
    verdicts = {run["verdict"] for run in runs}
    if Verdict.YES.value in verdicts:
        return Verdict.YES, runs
    if Verdict.UNDECIDED.value in verdicts:
        return Verdict.UNDECIDED, runs
    return Verdict.NO, runs


def _verdict_result(config: Config, alg: Algebra, args, verdict: Verdict, runs, what: str) -> Result:
    payload = {**_base(config, alg), "sequence": args.seq, "verdict": verdict.value, "runs": runs}
    mark = {"yes": "✅", "no": "❌", "undecided": "?"}[verdict.value]
    return payload, f"{mark} {what}: {verdict.value}", verdict is Verdict.UNDECIDED


def cmd_filt(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    verdict, runs = _decide_over_primes(args, config, alg, has_filtration)
    return _verdict_result(config, alg, args, verdict, runs, "filtration governed by " + args.seq)


def cmd_cofilt(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    verdict, runs = _decide_over_primes(args, config, alg, has_cofiltration)
    return _verdict_result(config, alg, args, verdict, runs, "filtration cogoverned by " + args.seq)


def cmd_allocate(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    d = parse_dim(args.dim, alg)
    m = _load_module(args.module, alg, config.prime)
    report = classify(alg, d, config)
    allocation = allocate(m, report, config.budget, config.workers, config.extension_degree)
    payload = {**_base(config, alg), "d": list(d),
               "components": [str(s) for s in report.accepted()],
               "containing": [{"layering": str(s), "filtration": f.to_json()}
                              for s, f in allocation.containing],
               "undetermined": [{"layering": str(s), "reason": r} for s, r in allocation.undetermined]}
    lines = [f"module lies in {len(allocation.containing)} of {len(report.components)} components:"]
    lines += [f"  ✅ {s.pretty()}" for s in allocation.layerings()]
    lines += [f"  ? {s.pretty()}" for s, _ in allocation.undetermined]
    return payload, "\n".join(lines), bool(allocation.undetermined) or not report.decided


def cmd_theta(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    m = _load_module(args.module, alg, config.prime)
    radical, socle = theta(m)
    payload = {**_base(config, alg), "radical": str(radical), "socle": str(socle)}
    lines = [f"S(M)  = {radical.pretty()}", f"S*(M) = {socle.pretty()}"]
    if args.plus:
        payload["theta_plus"] = theta_plus(m).to_json()
        ranks = path_rank(m)
        payload["path_ranks"] = {str(p): r for p, r in ranks.items()}
        lines += [f"  rank {p} = {r}" for p, r in ranks.items()]
    return payload, "\n".join(lines), False


def cmd_closure(args, config: Config) -> Result:
    alg = _load_algebra(args.algebra)
    s = parse_sequence(args.seq, alg)
    s_prime = parse_sequence(args.target, alg)
    decision = closure_contains(alg, s, s_prime, config)
    payload = {**_base(config, alg), "sequence": str(s), "target": str(s_prime),
               "verdict": decision.verdict.value, "note": decision.note}
    mark = {"yes": "✅", "no": "❌", "undecided": "?"}[decision.verdict.value]
    text = f"{mark} closure of Rep {s.pretty()} inside closure of Rep {s_prime.pretty()}: " \
           f"{decision.verdict.value} ({decision.note})"
    return payload, text, decision.verdict is Verdict.UNDECIDED


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--prime', type=int, default=DEFAULT_PRIME,
                        help='Field size p (env REPCOMP_PRIME)')
    common.add_argument('--primes', type=str, default='',
                        help='Comma-separated primes for multi-prime mode')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Seed for generic coefficients')
    common.add_argument('--retries', type=int, default=CLASSIFY_RETRIES,
                        help='Fresh generic modules tried before rejecting')
    common.add_argument('--budget', type=int, default=ENUMERATION_BUDGET,
                        help='Subspace enumeration budget per layer and vertex')
    common.add_argument('--extension-degree', type=int, default=EXTENSION_DEGREE,
                        help='Search flags over F_{p^k} for k up to this degree')
    common.add_argument('--workers', type=int, default=WORKERS, help='Worker threads')
    common.add_argument('--sweep-skeleta', action='store_true',
                        help='Test every skeleton and take a majority vote')
    common.add_argument('--json', action='store_true', help='Emit JSON')

    parser = _Parser(description='Irreducible components of module varieties over truncated path algebras')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument('algebra', help='Quiver file')
        p.set_defaults(func=func)
        return p

    p = add('components', cmd_components, 'Classify the irreducible components of Rep_d')
    p.add_argument('--dim', required=True, help='Dimension vector, e.g. 2,2')

    p = add('realizable', cmd_realizable, 'Check whether a sequence is a radical layering')
    p.add_argument('--seq', required=True, help='Sequence, e.g. "1,0;0,1;1,0;0,1"')

    p = add('sequences', cmd_sequences, 'List the semisimple sequences of dimension d')
    p.add_argument('--dim', required=True)
    p.add_argument('--realizable', action='store_true', help='Only realizable sequences')

    p = add('skeleta', cmd_skeleta, 'List skeleta with a layering, or of a module')
    p.add_argument('--seq')
    p.add_argument('--module', help='Module file')

    p = add('generic', cmd_generic, 'Build the generic module of a sequence')
    p.add_argument('--seq', required=True)
    p.add_argument('--dot', help='Write the hypergraph as DOT to this file')
    p.add_argument('--out', help='Write the module to this file')

    p = add('gamma', cmd_gamma, 'Count the realizable sequences governing a filtration')
    p.add_argument('--module')
    p.add_argument('--seq', help='Use the generic module of this sequence')
    p.add_argument('--all-sequences', action='store_true',
                   help='Drop the realizability filter')

    for name, func, help_text in (('filt', cmd_filt, 'Decide a governed filtration'),
                                  ('cofilt', cmd_cofilt, 'Decide a cogoverned filtration')):
        p = add(name, func, help_text)
        p.add_argument('--module', required=True)
        p.add_argument('--seq', required=True)

    p = add('allocate', cmd_allocate, 'List the components containing a module')
    p.add_argument('--module', required=True)
    p.add_argument('--dim', required=True)

    p = add('theta', cmd_theta, 'Radical and socle layerings of a module')
    p.add_argument('--module', required=True)
    p.add_argument('--plus', action='store_true', help='Add path ranks')

    p = add('closure', cmd_closure, 'Compare closures of two strata')
    p.add_argument('--seq', required=True)
    p.add_argument('--target', required=True, help='Sequence whose closure should contain --seq')

    return parser


def _report_failure(args, e: Exception):
    error_msg = f"{args.command} failed: {str(e)}"
    print(f"❌ {error_msg}", file=sys.stderr)
    run_logger.log_error(error_msg, args.command, prime=getattr(args, "prime", None),
                         seed=getattr(args, "seed", None), sequence=getattr(args, "seq", None))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k != 'func'}

    try:
        config = _config(args)
        payload, text, undecided = args.func(args, config)
    except (GenericityFailure, EnumerationBudgetExceeded) as e:
        _report_failure(args, e)
        return EXIT_UNDECIDED
    except Exception as e:
        _report_failure(args, e)
        return EXIT_ERROR

    if config.output == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)
    code = EXIT_UNDECIDED if undecided else EXIT_DECIDED
    run_logger.log_run(args.command, params, "undecided" if undecided else "decided")
    return code


if __name__ == "__main__":
    sys.exit(main())
