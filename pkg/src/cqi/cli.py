"""Command-line front end.

Commands: ``analyze``, ``count``, ``verify``, ``perm``, ``sweep``. Reports go
to stdout (or ``--out``), diagnostics to stderr. Exit codes: 0 success, 1 a
check disagreed, 2 usage or parse error, 3 a required check hit its cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from cqi.counting import (
    closed_form_report,
    count_X_bruteforce,
    count_X_composite,
    count_X_enumeration,
    homocyclic_verdicts,
)
from cqi.errors import CapExceeded, CQIError, ParseError, TooLarge
from cqi.extension import DEFAULT_END_CAP
from cqi.groups import DEFAULT_ENUM_CAP, PrimePowerSignature, crt_decompose, is_prime
from cqi.permstat import verify_triple_identity
from cqi.specs import parse_spec
from cqi.verify import check_composite, signatures_up_to_order, verify_signature

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

SWEEP_MODES = ("classes", "subgroups", "cqi", "verify")


@dataclass(frozen=True)
class SweepConfig:
    max_order: int
    primes: tuple[int, ...] = (2,)
    modes: frozenset[str] = field(default_factory=lambda: frozenset({"classes", "subgroups", "cqi"}))
    output_format: str = "csv"
    enum_cap: int = DEFAULT_ENUM_CAP
    end_cap: int = DEFAULT_END_CAP

    def __post_init__(self) -> None:
        if self.max_order < 2:
            raise ValueError("max_order must be >= 2")
        if self.enum_cap < 1 or self.end_cap < 1:
            raise ValueError("caps must be positive")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {bad}")
        unknown = set(self.modes) - set(SWEEP_MODES)
        if unknown:
            raise ValueError(f"unknown modes: {sorted(unknown)}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.output_format!r}")


@dataclass
class Result:
    payload: dict | list
    code: int = EXIT_OK
    csv_header: list[str] | None = None
    csv_rows: list[list] = field(default_factory=list)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(text: str) -> Result:
    spec = parse_spec(text)
    if isinstance(spec, PrimePowerSignature):
        comps = {spec.p: spec}
        order = spec.order
    else:
        comps = crt_decompose(spec)
        order = spec.order
    components = {
        str(p): {"signature": sig.text(), "parts": [list(x) for x in sig.parts], "homocyclic": sig.is_homocyclic}
        for p, sig in comps.items()
    }
    cqi = all(sig.is_homocyclic for sig in comps.values())
    payload = {"spec": spec.text(), "order": order, "components": components, "cqi": cqi}
    rows = [[p, c["signature"], str(c["homocyclic"]).lower()] for p, c in components.items()]
    return Result(payload, csv_header=["p", "signature", "homocyclic"], csv_rows=rows)


def cmd_count(text: str, *, oracle: bool = False, enum_cap: int = DEFAULT_ENUM_CAP, end_cap: int = DEFAULT_END_CAP) -> Result:
    spec = parse_spec(text)
    code = EXIT_OK
    if isinstance(spec, PrimePowerSignature):
        report = closed_form_report(spec)
        payload = report.to_json()
        if oracle:
            try:
                if spec.endomorphism_space() > end_cap:
                    raise CapExceeded("End(G)", spec.endomorphism_space(), end_cap)
                e = count_X_enumeration(spec, verify=True, cap=enum_cap)
                payload["oracle"] = {"subgroups": e.oracle_subgroups, "classes": e.oracle_classes}
                if (e.oracle_subgroups, e.oracle_classes) != (report.subgroups, report.classes):
                    code = EXIT_MISMATCH
            except CapExceeded as exc:
                _warn(f"oracle cross-check not run: {exc}")
                code = EXIT_CAP
    else:
        report = count_X_composite(spec)
        payload = report.to_json()
        verdicts = homocyclic_verdicts(spec)
        payload["cqi_by_prime"] = {str(p): v for p, v in verdicts.items()}
        if oracle:
            try:
                brute = count_X_bruteforce(spec.group(), enum_cap)
                payload["oracle"] = {"subgroups": brute}
                if brute != report.subgroups:
                    code = EXIT_MISMATCH
            except CapExceeded as exc:
                _warn(f"oracle cross-check not run: {exc}")
                code = EXIT_CAP
    return Result(payload, code, csv_header=["spec", "p", "classes", "subgroups", "cqi"], csv_rows=[report.csv_row()])


def cmd_verify(text: str, *, oracle: bool = False, enum_cap: int = DEFAULT_ENUM_CAP, end_cap: int = DEFAULT_END_CAP) -> Result:
    spec = parse_spec(text)
    checks = []
    if isinstance(spec, PrimePowerSignature):
        for c in verify_signature(spec, end_cap, enum_cap):
            checks.append({"scope": spec.text(), **c.to_json()})
    else:
        try:
            for c in check_composite(spec, enum_cap):
                checks.append({"scope": spec.text(), **c.to_json()})
        except CapExceeded as exc:
            checks.append({"scope": spec.text(), "name": "composite", "status": "skipped", "values": {}, "note": str(exc)})
        for p, sig in crt_decompose(spec).items():
            for c in verify_signature(sig, end_cap, enum_cap):
                checks.append({"scope": sig.text(), **c.to_json()})
    failed = [c for c in checks if c["status"] == "fail"]
    skipped = [c for c in checks if c["status"] == "skipped"]
    for c in skipped:
        _warn(f"check {c['name']} on {c['scope']} skipped: {c.get('note', '')}")
    if failed:
        code = EXIT_MISMATCH
    elif skipped and oracle:
        code = EXIT_CAP
    else:
        code = EXIT_OK
    payload = {"spec": spec.text(), "checks": checks, "passed": not failed, "skipped": len(skipped)}
    rows = [[c["scope"], c["name"], c["status"], json.dumps(c["values"], sort_keys=True)] for c in checks]
    return Result(payload, code, csv_header=["scope", "check", "status", "values"], csv_rows=rows)


def cmd_perm(n: int) -> Result:
    rep = verify_triple_identity(n)
    payload = rep.to_json()
    row = [payload[k] for k in ("n", "brute", "closed", "classes", "y_size")] + [str(rep.equal).lower()]
    return Result(
        payload,
        EXIT_OK if rep.equal else EXIT_MISMATCH,
        csv_header=["n", "brute", "closed", "classes", "y_size", "equal"],
        csv_rows=[row],
    )


def _sweep_row(args: tuple[PrimePowerSignature, SweepConfig]) -> dict:
    sig, cfg = args
    rep = closed_form_report(sig)
    row: dict = {"spec": rep.spec, "p": sig.p}
    if "classes" in cfg.modes:
        row["classes"] = rep.classes
    if "subgroups" in cfg.modes:
        row["subgroups"] = rep.subgroups
    if "cqi" in cfg.modes:
        row["cqi"] = rep.cqi
    if "verify" in cfg.modes:
        checks = verify_signature(sig, cfg.end_cap, cfg.enum_cap)
        if any(c.status == "fail" for c in checks):
            row["verified"] = False
        elif any(c.status == "skipped" for c in checks):
            row["verified"] = "skipped"
        else:
            row["verified"] = True
    return row


def sweep_signatures(cfg: SweepConfig) -> list[PrimePowerSignature]:
    sigs = [s for p in cfg.primes for s in signatures_up_to_order(p, cfg.max_order)]
    return sorted(sigs, key=lambda s: (s.order, s.p, s.parts))


def cmd_sweep(cfg: SweepConfig, jobs: int = 1) -> Iterator[dict]:
    """Rows in deterministic order (group order, then prime, then parts)."""
    work = [(s, cfg) for s in sweep_signatures(cfg)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            # map yields in submission order
            yield from pool.map(_sweep_row, work, chunksize=8)
    else:
        yield from map(_sweep_row, work)


def sweep_header(cfg: SweepConfig) -> list[str]:
    head = ["spec", "p", "classes", "subgroups", "cqi"]
    return head + ["verified"] if "verify" in cfg.modes else head


# ---------------------------------------------------------------------------
# output


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _cell(v) -> str:
    return str(v).lower() if isinstance(v, bool) else str(v)


def render_json(payload, timestamps: bool = False) -> str:
    if timestamps and isinstance(payload, dict):
        payload = {**payload, "timestamp": datetime.now(timezone.utc).isoformat()}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(c) for c in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report to this path instead of stdout")
    common.add_argument("--cap-enum", type=int, default=DEFAULT_ENUM_CAP, help="group-order cap for enumeration")
    common.add_argument("--cap-end", type=int, default=DEFAULT_END_CAP, help="cap on |End(G)| for the brute-force oracle")
    common.add_argument("--oracle", action="store_true", help="require the brute-force cross-check")
    common.add_argument("--timestamps", action="store_true", help="add a timestamp to JSON reports")

    ap = argparse.ArgumentParser(prog="cqi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("analyze", "CRT decomposition and the homocyclic verdicts"),
        ("count", "closed-form counts of X(G)"),
        ("verify", "run every cross-check on one group"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("spec", help='e.g. "Z(6)+Z(12)", "p=2: 4^1+32^1" or JSON')
    p = sub.add_parser("perm", parents=[common], help="max-jump identity for S_n")
    p.add_argument("n", type=int)
    p = sub.add_parser("sweep", parents=[common], help="closed forms over every p-group up to an order")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--primes", type=_int_list, default=(2,))
    p.add_argument("--modes", default="classes,subgroups,cqi", help=f"comma list from {','.join(SWEEP_MODES)}")
    p.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "sweep":
            return _run_sweep(args)
        if args.command == "perm":
            res = cmd_perm(args.n)
        elif args.command == "analyze":
            res = cmd_analyze(args.spec)
        else:
            fn = cmd_count if args.command == "count" else cmd_verify
            res = fn(args.spec, oracle=args.oracle, enum_cap=args.cap_enum, end_cap=args.cap_end)
    except (ParseError, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CQIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        text = render_csv(res.csv_header or [], res.csv_rows)
    else:
        text = render_json(res.payload, args.timestamps)
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return res.code


def _run_sweep(args: argparse.Namespace) -> int:
    try:
        cfg = SweepConfig(
            max_order=args.max_order,
            primes=args.primes,
            modes=frozenset(m.strip() for m in args.modes.split(",") if m.strip()),
            output_format=args.format,
            enum_cap=args.cap_enum,
            end_cap=args.cap_end,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = list(cmd_sweep(cfg, args.jobs))
    if cfg.output_format == "csv":
        header = sweep_header(cfg)
        text = render_csv(header, [[r.get(k, "") for k in header] for r in rows])
    else:
        text = render_json({"config": {"max_order": cfg.max_order, "primes": list(cfg.primes), "modes": sorted(cfg.modes)}, "rows": rows}, args.timestamps)
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = any(r.get("verified") is False for r in rows)
    return EXIT_MISMATCH if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
