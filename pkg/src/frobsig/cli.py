"""Command line entry point.

Exit codes: 0 success, 1 invalid config, 2 action not small, 3 resource cap
exceeded, 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import config as cfgmod
from . import diagmu, fsig
from .equivmod import counts_csv, frobenius_pushforward, summand_count
from .errors import ConfigError, FrobsigError, NotSmallError
from .groupscheme import infinitesimal_e0, is_linearly_reductive, is_small, order
from .invariants import InvariantRing, hilbert_function_compare


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: cfgmod.RunConfig, args, payload: dict, csv_text: str | None = None) -> None:
    fmt = args.format or cfg.output_format
    path = args.output or cfg.output_path
    if path is None:
        return
    if fmt == "both":
        stem = Path(path).with_suffix("")
        if csv_text is not None:
            _write_atomic(f"{stem}.csv", csv_text)
        _write_atomic(f"{stem}.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv" and csv_text is not None:
        _write_atomic(path, csv_text)
    else:
        _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _require_small(cfg: cfgmod.RunConfig):
    verdict = is_small(cfg.descriptor)
    if not verdict.small:
        raise NotSmallError(f"action not small: {verdict.witness}", verdict)
    return verdict


def _table(rows: list[list], header: list[str]) -> str:
    cols = [header] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cols)


# ----------------------------------------------------------------------
def cmd_check_small(cfg, args) -> int:
    D = cfg.descriptor
    verdict = is_small(D)
    payload = {"config_hash": cfg.hash, **verdict.to_dict(), "order": order(D),
               "linearly_reductive": is_linearly_reductive(D), "e0": infinitesimal_e0(D)}
    print(f"small: {verdict.small}")
    if not verdict.small:
        print(f"witness: {verdict.witness}")
    if verdict.factorwise:
        print("note: constant and diagonalizable parts were tested separately")
    _emit(cfg, args, payload)
    return 0 if verdict.small else 2


def cmd_predict(cfg, args) -> int:
    rank = args.rank or fsig.module_rank(cfg.descriptor, cfg.module)
    pred = fsig.predict(cfg.descriptor, rank, reflexive_only=cfg.module.kind == "reflexive")
    payload = {"config_hash": cfg.hash, **pred.to_dict()}
    print(_table([[L.label, L.coefficient, L.s_value, L.u] for L in pred.labels],
                 ["label", "FL coefficient", "s", "u"]))
    print(f"s(A) = {pred.s_A}")
    _emit(cfg, args, payload)
    return 0


def _e_values(cfg, args) -> list[int]:
    e_max = args.e_max or cfg.e_max
    if not 1 <= e_max <= cfgmod.GLOBAL_E_MAX:
        raise ConfigError(f"e_max must be in [1, {cfgmod.GLOBAL_E_MAX}]")
    return list(range(1, e_max + 1))


def cmd_fsig(cfg, args) -> int:
    _require_small(cfg)
    report = fsig.measure(cfg.descriptor, _e_values(cfg, args), cfg.module, cfg.slice_max)
    report.config_hash = cfg.hash
    print(_table([[r.e, r.label, r.count, f"{float(r.normalized):.4f}", f"{float(r.predicted):.4f}",
                   f"{float(r.deviation):.4g}"] for r in report.rows],
                 ["e", "label", "count", "normalized", "predicted", "deviation"]))
    if report.prediction.reflexive_only:
        print("note: reflexive non-free module; predictions only")
    if report.truncated_at is not None:
        print(f"note: stopped at e={report.truncated_at}: {report.truncation_reason}")
    _emit(cfg, args, report.to_dict(), report.to_csv())
    return 3 if report.truncated_at is not None and not report.rows else 0


def cmd_frobenius(cfg, args) -> int:
    D = cfg.descriptor
    es = _e_values(cfg, args)
    if not D.has_constant and D.has_diag and cfg.module.kind == "S":
        results = [diagmu.veronese_summand_counts(D.diag_orders, D.diag_weights, D.field.p, D.dim, e)
                   for e in es]
        text = diagmu.counts_csv(results)
        payload = {"config_hash": cfg.hash, "counts": {str(r.e): r.labelled() for r in results}}
    else:
        gd = fsig.group_data(D)
        L = fsig.build_module(D, cfg.module, cfg.slice_max)
        rows = []
        for e in es:
            M = frobenius_pushforward(L, e, allow_infinitesimal=True)
            for std in gd.labels:
                rows.append((e, summand_count(std, M)))
        text = counts_csv(rows, D.field.p, D.dim)
        payload = {"config_hash": cfg.hash,
                   "counts": {str(e): {sc.label: sc.total for e2, sc in rows if e2 == e} for e in es}}
    sys.stdout.write(text)
    _emit(cfg, args, payload, text)
    return 0


def cmd_invariants(cfg, args) -> int:
    bound = args.degree_bound if args.degree_bound is not None else cfg.degree_bound
    ring = InvariantRing(cfg.descriptor)
    data = ring.generators_up_to(bound)
    payload = {"config_hash": cfg.hash, **data.to_json()}
    if cfg.descriptor.constant_group.order <= 64:
        cmp = hilbert_function_compare(ring, fsig.group_data(cfg.descriptor).simples, min(bound, 6))
        payload["hilbert_compare"] = cmp.to_dict()
    for n, f in data.generators:
        print(f"deg {n}: {f}")
    print(f"hilbert: {data.hilbert}  (generation beyond degree {bound} not certified)")
    _emit(cfg, args, payload)
    return 0


def cmd_regular_summand(cfg, args) -> int:
    r_max = args.r_max if args.r_max is not None else 2
    res = fsig.find_regular_summand(cfg.descriptor, r_max)
    if res.found:
        print(f"found at r={res.r}: " + ", ".join(f"{lab} in degrees {degs}" for lab, degs in res.placements))
    else:
        print(f"not found up to r={r_max}")
    _emit(cfg, args, {"config_hash": cfg.hash, **res.to_dict()})
    return 0


def cmd_crosscheck(cfg, args) -> int:
    D = cfg.descriptor
    if D.has_constant or len(D.diag_orders) != 1:
        raise ConfigError("crosscheck needs a single diagonalizable factor and no constant part")
    n = D.diag_orders[0]
    W = [int(w) for w in D.diag_weights[:, 0]]
    reports = [diagmu.crosscheck_constant_realization(n, W, D.field.p, e, D.field.m, D.field.modulus)
               for e in _e_values(cfg, args)]
    for r in reports:
        print(f"e={r.e} agree={r.agree} diag={r.diag} equivariant={r.equivariant}")
    _emit(cfg, args, {"config_hash": cfg.hash, "reports": [r.to_dict() for r in reports]})
    return 0 if all(r.agree for r in reports) else 4


COMMANDS = {
    "check-small": cmd_check_small,
    "predict": cmd_predict,
    "fsig": cmd_fsig,
    "frobenius": cmd_frobenius,
    "invariants": cmd_invariants,
    "regular-summand": cmd_regular_summand,
    "crosscheck": cmd_crosscheck,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frobsig", description="Frobenius summand counts for finite group schemes")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--output", help="report path (overrides output.path)")
        sp.add_argument("--format", choices=["csv", "json", "both"], help="report format (overrides output.format)")
        if name in ("fsig", "frobenius", "crosscheck"):
            sp.add_argument("--e-max", type=int)
        if name == "predict":
            sp.add_argument("--rank", type=int)
        if name == "invariants":
            sp.add_argument("--degree-bound", type=int)
        if name == "regular-summand":
            sp.add_argument("--r-max", type=int)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(args.config)
        return COMMANDS[args.command](cfg, args)
    except NotSmallError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FrobsigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())
