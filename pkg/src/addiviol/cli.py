"""Command-line front end: ``addiviol {verify,scan,multicopy,upb,screen}``.

Every command writes one JSON report (stdout, or ``--out``); tabular results
are also written as CSV next to it (``--csv``, or ``--out`` with a ``.csv``
suffix). Reports are deterministic for a given configuration except for the
``timing`` block.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .conjpair import INCONCLUSIVE, NOT_VIOLATED, VIOLATED, scan_violation, violation_report
from .minentropy import screen_subspace, vn_violation_condition
from .multicopy import (
    PAIRING,
    TOTALLY_ANTISYMMETRIC,
    multicopy_min_search,
    multicopy_output_entropy,
    pairing_input,
    totally_antisymmetric_input,
)
from .renyi import DEFAULT_RANK_EPS, format_order, parse_order
from .subspace import antisymmetric_subspace, load_subspace, parthasarathy_subspace
from .upb import (
    NonOrthogonalError,
    genericity_check,
    is_upb_partition_criterion,
    load_product_basis,
    p0_additivity_report,
    tiles_upb,
)

SCHEMA = 1
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66
VERDICT_EXIT = {VIOLATED: 0, NOT_VIOLATED: 1, INCONCLUSIVE: 2}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    p: float = 1.0
    d: int = 3
    n: int = 2
    d_max: int = 12
    restarts: int | None = None
    max_iter: int = 1000
    tol: float = 1e-10
    rank_eps: float = DEFAULT_RANK_EPS
    seed: int = 0
    out_path: str | None = None
    csv_path: str | None = None
    large_ok: bool = False
    subspace: str | None = None
    input_kind: str | None = None
    basis: str | None = None
    check: str | None = None

    def __post_init__(self):
        for name in ("d", "n", "d_max", "max_iter"):
            if getattr(self, name) < 1:
                raise CliError(f"--{name.replace('_', '-')} must be positive")
        if self.restarts is not None and self.restarts < 1:
            raise CliError("--restarts must be positive")
        if self.tol <= 0 or self.rank_eps <= 0:
            raise CliError("--tol and --rank-eps must be positive")
        if self.seed < 0:
            raise CliError("--seed must be nonnegative")

    def echo(self) -> dict:
        out = asdict(self)
        out["p"] = format_order(self.p)
        return out

    def opt_kwargs(self) -> dict:
        kw = {"tol": self.tol, "max_iter": self.max_iter, "seed": self.seed}
        if self.restarts is not None:
            kw["restarts"] = self.restarts
        return kw


def _load(path: str, loader, what: str):
    p = Path(path)
    if not p.is_file():
        raise CliError(f"{what} file not found: {path}", EXIT_NOINPUT)
    try:
        return loader(p)
    except NonOrthogonalError as err:
        raise CliError(f"invalid {what} file {path}: {err} (pair {list(err.pair)})", EXIT_DATAERR) from err
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as err:
        raise CliError(f"malformed {what} file {path}: {err}", EXIT_DATAERR) from err


def select_subspace(selector: str, d: int):
    if selector == "antisym":
        return antisymmetric_subspace(d)
    if selector == "parthasarathy":
        return parthasarathy_subspace(d)
    if selector.startswith("file:"):
        return _load(selector[5:], load_subspace, "subspace")
    raise CliError(f"unknown subspace selector {selector!r} (antisym, parthasarathy, file:<path>)")


def select_basis(selector: str):
    if selector == "tiles":
        return tiles_upb()
    if selector.startswith("file:"):
        return _load(selector[5:], load_product_basis, "product basis")
    raise CliError(f"unknown basis selector {selector!r} (tiles, file:<path>)")


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def cmd_verify(cfg: RunConfig):
    s = select_subspace(cfg.subspace, cfg.d)
    rep = violation_report(s, cfg.p, **cfg.opt_kwargs())
    return rep.to_dict(), None, VERDICT_EXIT[rep.verdict]


SCAN_COLUMNS = ["d", "lambda_max_exact", "hayden_bound", "joint_entropy", "twice_single_min", "verdict"]


def cmd_scan(cfg: RunConfig):
    reports, first = scan_violation(cfg.p, cfg.d_max)
    rows = [
        [r.d, r.lambda_max_exact, r.hayden_lambda_bound, r.joint_entropy, 2 * r.single_copy_min, r.verdict]
        for r in reports
    ]
    result = {
        "p": format_order(cfg.p),
        "d_max": cfg.d_max,
        "min_violating_d": first,
        "rows": [dict(zip(SCAN_COLUMNS, row)) for row in rows],
    }
    return result, (SCAN_COLUMNS, rows), 0


INPUT_KINDS = {"antisym-total": TOTALLY_ANTISYMMETRIC, "pairing": PAIRING, "search": "optimized"}


def cmd_multicopy(cfg: RunConfig):
    kind = cfg.input_kind
    if kind not in INPUT_KINDS:
        raise CliError(f"unknown input kind {kind!r} ({', '.join(INPUT_KINDS)})")
    k = cfg.d * (cfg.d - 1) // 2
    try:
        if kind == "search":
            if not math.isinf(cfg.p):
                raise CliError("--input search supports --p inf only")
            res = multicopy_min_search(cfg.d, cfg.n, large_ok=cfg.large_ok, **cfg.opt_kwargs())
        else:
            if kind == "antisym-total":
                if cfg.n != k:
                    raise CliError(f"antisym-total needs n = d(d-1)/2 = {k}")
                x = totally_antisymmetric_input(k)
            else:
                x = pairing_input(cfg.d, cfg.n)
            res = multicopy_output_entropy(cfg.d, cfg.n, x, cfg.p, INPUT_KINDS[kind], cfg.large_ok,
                                           orders=(0, 1, 2, math.inf))
    except ValueError as err:
        raise CliError(str(err), EXIT_USAGE) from err
    rows = [[i, float(v)] for i, v in enumerate(res.spectrum)]
    return res.to_dict(), (["index", "eigenvalue"], rows), 0


def cmd_upb(cfg: RunConfig):
    pb = select_basis(cfg.basis)
    check = cfg.check or "all"
    if check == "partition":
        cert = is_upb_partition_criterion(pb, restarts=cfg.restarts or 32, seed=cfg.seed)
        return {"members": pb.size, "certificate": cert.to_dict()}, None, 0
    if check == "genericity":
        try:
            ok, subset = genericity_check(pb)
        except ValueError as err:
            raise CliError(str(err), EXIT_DATAERR) from err
        return {"members": pb.size, "generic": ok, "failing_subset": None if ok else list(subset)}, None, 0
    if check != "all":
        raise CliError(f"unknown check {check!r} (all, partition, genericity)")
    rep = p0_additivity_report(pb, restarts=cfg.restarts or 32, seed=cfg.seed, eps=cfg.rank_eps,
                               tol=cfg.tol, max_iter=cfg.max_iter)
    out = rep.to_dict()
    out["members"] = pb.size
    out["target_s0"] = 2 * math.log2(pb.d_B)
    return out, None, 0


def cmd_screen(cfg: RunConfig):
    s = select_subspace(cfg.subspace, cfg.d)
    res = screen_subspace(s, cfg.p, eps=cfg.rank_eps, **cfg.opt_kwargs())
    cond = vn_violation_condition(s.d_A, s.k) if s.d_A == s.d_B else None
    result = {
        "p": format_order(cfg.p),
        "d_A": s.d_A,
        "d_B": s.d_B,
        "k": s.k,
        "min_entropy": res.value,
        "converged": res.converged,
        "restarts_used": res.restarts_used,
        "spectrum_at_argmin": [float(v) for v in res.spectrum_at_argmin],
        "vn_condition": cond,
        "vn_condition_holds": None if cond is None else cond < 2,
    }
    return result, None, 0


COMMANDS = {
    "verify": cmd_verify,
    "scan": cmd_scan,
    "multicopy": cmd_multicopy,
    "upb": cmd_upb,
    "screen": cmd_screen,
}


def _order(text: str) -> float:
    try:
        return parse_order(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_order, default=1.0, help="Renyi order; accepts 0, inf and decimals")
    common.add_argument("--restarts", type=int, default=None,
                        help="optimizer restarts (default 32; 64 for p < 1)")
    common.add_argument("--max-iter", type=int, default=1000)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--rank-eps", type=float, default=DEFAULT_RANK_EPS)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", dest="out_path", default=None, help="write the JSON report here")
    common.add_argument("--csv", dest="csv_path", default=None, help="write the CSV table here")

    parser = _Parser(prog="addiviol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"addiviol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="pair-state violation check for one subspace")
    p.add_argument("--subspace", default="antisym")
    p.add_argument("--d", type=int, default=3)

    p = sub.add_parser("scan", parents=[common], help="antisymmetric violation scan over d")
    p.add_argument("--dmax", dest="d_max", type=int, default=12)

    p = sub.add_parser("multicopy", parents=[common], help="n copies of the antisymmetric channel")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--input", dest="input_kind", default="pairing", help="antisym-total, pairing or search")
    p.add_argument("--large", dest="large_ok", action="store_true", help="allow more than 1e7 amplitudes")

    p = sub.add_parser("upb", parents=[common], help="UPB checks and the p=0 additivity pipeline")
    p.add_argument("--basis", default="tiles")
    p.add_argument("--check", default="all", help="all, partition or genericity")

    p = sub.add_parser("screen", parents=[common], help="minimum entanglement of a subspace")
    p.add_argument("--subspace", default="antisym")
    p.add_argument("--d", type=int, default=3)
    return parser


def build_report(cfg: RunConfig, result: dict, duration: float) -> dict:
    return {
        "schema": SCHEMA,
        "tool": "addiviol",
        "version": __version__,
        "command": cfg.command,
        "seed": cfg.seed,
        "config": cfg.echo(),
        "result": result,
        "timing": {
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "duration_s": round(duration, 6),
        },
    }


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    try:
        cfg = RunConfig(**args)
        started = time.perf_counter()
        result, table, code = COMMANDS[cfg.command](cfg)
    except CliError as err:
        print(f"addiviol: error: {err}", file=sys.stderr)
        return err.code
    report = build_report(cfg, result, time.perf_counter() - started)
    text = json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if cfg.out_path:
        Path(cfg.out_path).write_text(text)
    else:
        sys.stdout.write(text)
    csv_path = cfg.csv_path or (str(Path(cfg.out_path).with_suffix(".csv")) if cfg.out_path else None)
    if table is not None and csv_path:
        _write_csv(Path(csv_path), *table)
    return code


if __name__ == "__main__":
    sys.exit(main())
