"""Command line front end: ``intheffter construct|verify|classify|sweep|oracle|appendix``.

Exit codes: 0 ok, 2 invalid parameters, 3 out of scope (known elsewhere, open,
or an inconclusive search), 4 a self-check or verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from math import gcd
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .core import (
    PartialArray,
    SupportSet,
    array_from_json,
    array_to_json,
    format_text,
    ihs_from_json,
    ihs_to_json,
    interval_set,
    parse_text,
    support_of,
    verify_ihs,
    verify_integer_heffter,
)
from .errors import ConstructionError, ExternalConstruction, HeffterError, InvalidParameters, OpenCase
from .heffter import build_integer_heffter, classify, necessary_conditions
from .ihs import appendix_ihs, appendix_manifest, build_ihs, check_ihs_params
from .oracle import SearchBudget, brute_heffter_small, brute_partition, cross_check_lemma

EXIT_OK, EXIT_PARAMS, EXIT_SCOPE, EXIT_FAIL = 0, 2, 3, 4

SWEEP_FIELDS = ["kind", "m", "n", "s", "k", "c", "verdict", "verified", "members", "support_max", "seconds"]


# ---------------------------------------------------------------------------
# rendering

def _csv_rows(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _array_csv(a: PartialArray, member: Optional[int] = None) -> List[list]:
    prefix = [] if member is None else [member]
    return [prefix + ["" if v == 0 else v for v in row] for row in a.cells.tolist()]


def render_array(a: PartialArray, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(array_to_json(a)) + "\n"
    if fmt == "csv":
        return _csv_rows(_array_csv(a))
    return format_text(a) + "\n"


def render_ihs(arrays: Sequence[PartialArray], m: int, n: int, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(ihs_to_json(arrays, m, n)) + "\n"
    if fmt == "csv":
        rows: List[list] = []
        for idx, a in enumerate(arrays):
            rows += _array_csv(a, idx)
        return _csv_rows(rows)
    return "\n\n".join(format_text(a) for a in arrays) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, msg: str) -> int:
    print(msg, file=sys.stderr)
    return code


def _parse_range(text: str) -> range:
    """``7``, ``7:15`` or ``7:15:2``, inclusive."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] < 1:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    lo, hi, step = parts
    return range(lo, hi + 1, step)


# ---------------------------------------------------------------------------
# construct

def run_construct(args) -> int:
    try:
        if args.kind == "ihs":
            m, n, c = args.params
            arrays = build_ihs(m, n, c)
            report = verify_ihs(arrays, m, n, c)
            text = render_ihs(arrays, m, n, args.format)
        else:
            m, n, s, k = args.params
            arr = build_integer_heffter(m, n, s, k)
            report = verify_integer_heffter(arr, s, k)
            text = render_array(arr, args.format)
    except InvalidParameters as exc:
        return _fail(EXIT_PARAMS, f"invalid parameters: {exc}")
    except (ExternalConstruction, OpenCase) as exc:
        verdict = getattr(exc, "verdict", None)
        return _fail(EXIT_SCOPE, f"{verdict or 'unsupported'}: {exc}")
    except ConstructionError as exc:
        return _fail(EXIT_FAIL, f"internal error: {exc}")
    if not report.passed:
        return _fail(EXIT_FAIL, f"output failed verification\n{report.summary()}")
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def _load(path: str, fmt: Optional[str]):
    """Return ``("ihs", arrays, m, n, c)`` or ``("array", arr)``."""
    raw = Path(path).read_text()
    fmt = fmt or {".json": "json", ".csv": "csv"}.get(Path(path).suffix, "text")
    if fmt == "json":
        doc = json.loads(raw)
        if "arrays" in doc:
            arrays, m, n, c = ihs_from_json(doc)
            return ("ihs", arrays, m, n, c)
        return ("array", array_from_json(doc))
    if fmt == "csv":
        rows = [r for r in csv.reader(io.StringIO(raw)) if r]
        cells = [[None if v.strip() == "" else int(v) for v in r] for r in rows]
        return ("array", PartialArray(cells))
    arrays = parse_text(raw)
    if len(arrays) == 1:
        return ("array", arrays[0])
    m, n = arrays[0].shape
    return ("ihs", arrays, m, n, len(arrays))


def run_verify(args) -> int:
    try:
        loaded = _load(args.path, args.input_format)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(EXIT_PARAMS, f"cannot read {args.path}: {exc}")
    if loaded[0] == "ihs":
        _, arrays, m, n, c = loaded
        label = f"IHS({m},{n};{c})"
        report = verify_ihs(arrays, m, n, c)
    else:
        arr = loaded[1]
        filled = arr.filled()
        s = args.s if args.s is not None else int(filled[0].sum())
        k = args.k if args.k is not None else int(filled[:, 0].sum())
        label = f"H({arr.m},{arr.n};{s},{k})"
        report = verify_integer_heffter(arr, s, k)
    if args.format == "json":
        doc = {"object": label, "passed": report.passed, "violations": [asdict(v) for v in report.violations]}
        _emit(json.dumps(doc) + "\n", args.out)
    elif args.format == "csv":
        rows = [["axiom", "location", "detail"]] + [[v.axiom, v.location, v.detail] for v in report.violations]
        _emit(_csv_rows(rows), args.out)
    else:
        _emit(f"{label}: {report.summary(limit=50)}\n", args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# classify

def run_classify(args) -> int:
    m, n, s, k = args.params
    f = classify(m, n, s, k)
    doc = {"m": m, "n": n, "s": s, "k": k, "verdict": f.verdict, "case": f.case, "reason": f.reason,
           "transposed": f.transposed, "detail": f.detail}
    if args.format == "json":
        _emit(json.dumps(doc) + "\n", args.out)
    elif args.format == "csv":
        _emit(_csv_rows([list(doc), list(doc.values())]), args.out)
    else:
        extra = f" [{f.detail}]" if f.detail else ""
        flip = " (via transpose)" if f.transposed else ""
        _emit(f"H({m},{n};{s},{k}): {f}{flip}{extra}\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

def _ihs_row(task) -> dict:
    m, n, c = task
    row = {"kind": "ihs", "m": m, "n": n, "s": n, "k": m, "c": c}
    t0 = time.perf_counter()
    try:
        arrays = build_ihs(m, n, c)
        ok = verify_ihs(arrays, m, n, c).passed
        row.update(verdict="ConstructedHere", verified="yes" if ok else "FAILED", members=len(arrays),
                   support_max=max(support_of(arrays).values_set()))
    except ExternalConstruction:
        row.update(verdict="KnownElsewhere", verified="skipped", members=0, support_max=0)
    except HeffterError as exc:
        row.update(verdict=f"error: {type(exc).__name__}", verified="FAILED", members=0, support_max=0)
    row["seconds"] = f"{time.perf_counter() - t0:.3f}"
    return row


def _heffter_row(task) -> dict:
    m, n, s, k = task
    d = gcd(s, k)
    row = {"kind": "heffter", "m": m, "n": n, "s": s, "k": k, "c": m // (k // d)}
    t0 = time.perf_counter()
    f = classify(m, n, s, k)
    row.update(verdict=str(f), verified="skipped", members=0, support_max=0)
    if f.buildable:
        try:
            arr = build_integer_heffter(m, n, s, k)
            ok = verify_integer_heffter(arr, s, k).passed
            row.update(verified="yes" if ok else "FAILED", members=1, support_max=int(np.abs(arr.cells).max()))
        except HeffterError as exc:
            row.update(verdict=f"error: {type(exc).__name__}", verified="FAILED")
    row["seconds"] = f"{time.perf_counter() - t0:.3f}"
    return row


def _ihs_tasks(args) -> List[tuple]:
    out = []
    for m in args.m:
        for n in args.n:
            for c in args.c:
                try:
                    check_ihs_params(m, n, c)
                except InvalidParameters:
                    continue
                out.append((m, n, c))
    return out


def _heffter_tasks(args) -> List[tuple]:
    out = []
    for k in args.k:
        for s in args.s:
            if s < 3 or k < 3:
                continue
            d = gcd(s, k)
            k1, s1 = k // d, s // d
            quads = [(c * k1, c * s1, s, k) for c in args.c]
            quads = [q for q in quads if not necessary_conditions(*q)]
            if args.min_c and quads:
                # smallest c built here, else the smallest admissible one
                quads = [next((q for q in quads if classify(*q).buildable), quads[0])]
            out.extend(quads)
    return out


def run_sweep(args) -> int:
    tasks = _ihs_tasks(args) if args.kind == "ihs" else _heffter_tasks(args)
    worker = _ihs_row if args.kind == "ihs" else _heffter_row
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(worker, tasks))
    else:
        rows = [worker(t) for t in tasks]

    target = Path(args.out) if args.out else None
    fresh = target is None or not target.exists() or target.stat().st_size == 0
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    if fresh:
        writer.writeheader()
    writer.writerows(rows)
    if target is None:
        sys.stdout.write(buf.getvalue())
    else:
        with target.open("a") as fh:
            fh.write(buf.getvalue())
    failed = [r for r in rows if r["verified"] == "FAILED"]
    if failed:
        return _fail(EXIT_FAIL, f"{len(failed)} of {len(rows)} builds failed verification")
    print(f"{len(rows)} rows, {sum(r['verified'] == 'yes' for r in rows)} verified", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle

def _parse_set(text: str) -> SupportSet:
    out = SupportSet()
    for chunk in text.split(","):
        r = _parse_range(chunk.strip())
        out.update(interval_set(r.start, r.stop - 1, r.step))
    return out


def _parse_spec(text: str) -> dict:
    spec = {}
    for chunk in text.split(","):
        kind, _, count = chunk.partition("=")
        spec[kind.strip()] = int(count or 1)
    return spec


def run_oracle(args) -> int:
    budget = SearchBudget(args.budget_nodes, args.budget_seconds)
    if args.what == "lemma":
        try:
            report = cross_check_lemma(args.family, trials=args.trials, seed=args.seed)
        except InvalidParameters as exc:
            return _fail(EXIT_PARAMS, str(exc))
        if args.format == "json":
            _emit(json.dumps({"family": report.family, "instances": report.instances,
                              "mismatches": report.mismatches}) + "\n", args.out)
        else:
            _emit(report.summary() + "\n", args.out)
        return EXIT_OK if report.ok else EXIT_FAIL

    try:
        if args.what == "heffter":
            result = brute_heffter_small(*args.params, budget=budget)
        else:
            result = brute_partition(_parse_set(args.set), _parse_spec(args.spec), budget)
    except (InvalidParameters, argparse.ArgumentTypeError) as exc:
        return _fail(EXIT_PARAMS, str(exc))
    name = type(result).__name__
    if args.format == "json":
        doc = {"result": name, "nodes": result.nodes}
        if name == "Exists":
            w = result.witness
            doc["witness"] = array_to_json(w) if isinstance(w, PartialArray) else [list(p.elements) for p in w]
        else:
            doc["reason"] = result.reason
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        lines = [f"{name} after {result.nodes} nodes"]
        if name == "Exists":
            w = result.witness
            lines.append(format_text(w) if isinstance(w, PartialArray)
                         else "\n".join(" ".join(map(str, p.elements)) for p in w))
        else:
            lines[0] += f" ({result.reason})"
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_SCOPE if name == "Inconclusive" else EXIT_OK


# ---------------------------------------------------------------------------
# appendix

def run_appendix(args) -> int:
    if args.action == "list":
        rows = appendix_manifest()
        if args.format == "json":
            _emit(json.dumps([{"m": m, "n": n, "c": c} for m, n, c in rows]) + "\n", args.out)
        elif args.format == "csv":
            _emit(_csv_rows([["m", "n", "c"]] + [list(r) for r in rows]), args.out)
        else:
            _emit("".join(f"IHS({m},{n};{c})\n" for m, n, c in rows), args.out)
        return EXIT_OK
    try:
        arrays = appendix_ihs(args.c)
    except InvalidParameters as exc:
        return _fail(EXIT_PARAMS, str(exc))
    _emit(render_ihs(arrays, 7, 7, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--budget-nodes", type=int, default=10_000_000, metavar="N")
    common.add_argument("--budget-seconds", type=float, default=60.0, metavar="S")

    p = argparse.ArgumentParser(prog="intheffter", description="Integer Heffter arrays and IHS sets.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build and verify an IHS or an integer Heffter array")
    csub = c.add_subparsers(dest="kind", required=True)
    ci = csub.add_parser("ihs", parents=[common], help="IHS(m,n;c)")
    ci.add_argument("params", type=int, nargs=3, metavar=("M", "N", "C"))
    ch = csub.add_parser("heffter", parents=[common], help="integer H(m,n;s,k)")
    ch.add_argument("params", type=int, nargs=4, metavar=("M", "N", "S", "K"))
    c.set_defaults(func=run_construct)

    v = sub.add_parser("verify", parents=[common], help="check a stored array or IHS")
    v.add_argument("path")
    v.add_argument("--input-format", choices=["text", "json", "csv"], help="default: from the file suffix")
    v.add_argument("--s", type=int, help="filled cells per row (default: read from row 0)")
    v.add_argument("--k", type=int, help="filled cells per column (default: read from column 0)")
    v.set_defaults(func=run_verify)

    cl = sub.add_parser("classify", parents=[common], help="where does H(m,n;s,k) stand")
    cl.add_argument("params", type=int, nargs=4, metavar=("M", "N", "S", "K"))
    cl.set_defaults(func=run_classify)

    sw = sub.add_parser("sweep", help="build and verify a parameter grid, CSV report")
    swsub = sw.add_subparsers(dest="kind", required=True)
    si = swsub.add_parser("ihs", parents=[common])
    si.add_argument("--m", type=_parse_range, required=True, metavar="LO:HI[:STEP]")
    si.add_argument("--n", type=_parse_range, required=True, metavar="LO:HI[:STEP]")
    si.add_argument("--c", type=_parse_range, required=True, metavar="LO:HI[:STEP]")
    sh = swsub.add_parser("heffter", parents=[common])
    sh.add_argument("--s", type=_parse_range, required=True, metavar="LO:HI[:STEP]")
    sh.add_argument("--k", type=_parse_range, required=True, metavar="LO:HI[:STEP]")
    sh.add_argument("--c", type=_parse_range, default=range(1, 41), metavar="LO:HI[:STEP]")
    sh.add_argument("--min-c", action="store_true", help="one c per (s,k): the smallest built here, else the smallest admissible")
    for q in (si, sh):
        q.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=run_sweep)

    o = sub.add_parser("oracle", help="brute-force checks on small instances")
    osub = o.add_subparsers(dest="what", required=True)
    oh = osub.add_parser("heffter", parents=[common], help="exhaustive search for H(m,n;s,k)")
    oh.add_argument("params", type=int, nargs=4, metavar=("M", "N", "S", "K"))
    op = osub.add_parser("partition", parents=[common], help="exhaustive piece partition")
    op.add_argument("set", help="comma separated ranges, e.g. 18:32:2,40:47")
    op.add_argument("spec", help="piece counts, e.g. G=2,H=1 (kinds F G H K M)")
    ol = osub.add_parser("lemma", parents=[common], help="cross-check a block family")
    ol.add_argument("family")
    ol.add_argument("--trials", type=int, default=50)
    ol.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=run_oracle)

    a = sub.add_parser("appendix", help="tabulated IHS(7,7;c) sets")
    asub = a.add_subparsers(dest="action", required=True)
    asub.add_parser("list", parents=[common])
    ae = asub.add_parser("export", parents=[common])
    ae.add_argument("c", type=int)
    a.set_defaults(func=run_appendix)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
