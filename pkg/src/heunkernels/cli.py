"""Command-line front end: tables, verification suites, confluence sweeps, catalog dumps."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import kernel_catalog as kc
from . import transform_group as tg
from .errors import HeunKernelError
from .kernel_engine import che_draws, heun_draws, to_json
from .verification import (SUITES, ConfigError, DEFAULT_LAMBDA, Report, RunConfig,
                           confluence_report, confluence_rows, dumps, run_suite, to_csv)

OUTPUT_DIR_ENV = "HEUNKERNELS_OUTPUT_DIR"
TABLE_KINDS = ("homotopic", "mobius", "full", "kernel-N", "kernel-K", "che")
_CHE_NAMES = ("rho", "alpha", "gamma", "delta")


# tables --------------------------------------------------------------------

def _power(base: str, form, names=tg._NAMES) -> str | None:
    if not any(form):
        return None
    return f"{base}^({tg.affine_str(form, names)})"


def _prefactor(t: tg.TransformRecord, kernel: bool) -> str:
    if kernel:
        bases = ("(x*y)", "((1-x)*(1-y))", "((1-x/a)*(1-y/a))")
    else:
        bases = ("x", "(1-x)", "(1-x/a)")
    parts = [s for s in (_power(b, f) for b, f in zip(bases, t.exponents)) if s]
    return " * ".join(parts) or "1"


def _param_map(forms, names=tg._NAMES) -> dict:
    return {n + "'": tg.affine_str(f, names) for n, f in zip(names, forms)}


def _heun_row(t: tg.TransformRecord, kernel: bool = False) -> dict:
    row = {
        "id": t.name,
        "rho": t.mobius.formula,
        "a_target": t.mobius.a_target_tag,
        "prefactor": _prefactor(t, kernel),
        "params": _param_map(t.param_map),
    }
    if kernel:
        row["rho"] = f"x -> {t.mobius.formula}, y -> {t.mobius.formula.replace('x', 'y')}"
    else:
        c0, c1 = tg.accessory_exact(t)
        row["accessory"] = {"q_coefficient": str(c1), "constant": str(c0)}
    return row


def _che_row(t: tg.CheRecord) -> dict:
    parts = [s for s in (_power(b, f, _CHE_NAMES) for b, f in zip(("x", "(1-x)"), t.exponents[:2])) if s]
    if any(t.exponents[2]):
        parts.append(f"exp(({tg.affine_str(t.exponents[2], _CHE_NAMES)})*x)")
    return {
        "id": t.name,
        "rho": "1-x" if t.flip else "x",
        "a_target": "",
        "prefactor": " * ".join(parts) or "1",
        "params": _param_map(t.param_map, _CHE_NAMES),
        "accessory": {"sigma'": str(t.accessory)},
    }


def table_rows(kind: str) -> list:
    if kind == "homotopic":
        return [_heun_row(tg.homotopic(i)) for i in range(1, 9)]
    if kind == "mobius":
        return [_heun_row(tg.mobius(j)) for j in range(1, 25)]
    if kind == "full":
        return [_heun_row(t) for t in tg.generate_group().elements]
    if kind == "kernel-N":
        return [dict(_heun_row(tg.homotopic(i), True), id=f"N{i}") for i in range(1, 9)]
    if kind == "kernel-K":
        return [dict(_heun_row(tg.mobius(j), True), id=f"K{j}") for j in range(1, 25)]
    if kind == "che":
        return [_che_row(t) for t in tg.che_group()]
    raise ConfigError(f"unknown table kind {kind!r}")


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            out.update({f"{k}.{kk}": vv for kk, vv in v.items()})
        else:
            out[k] = v
    return out


def render_table(kind: str, fmt: str) -> str:
    rows = table_rows(kind)
    if fmt == "json":
        return dumps({"schema_version": 1, "kind": kind, "rows": rows, "count": len(rows)})
    flat = [_flatten(r) for r in rows]
    columns = list(dict.fromkeys(c for r in flat for c in r))
    return to_csv(flat, columns)


# catalog -------------------------------------------------------------------

def catalog_document(family: str, dump: bool, seed: int = 0, lam=DEFAULT_LAMBDA) -> dict:
    if family not in kc.FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {', '.join(kc.FAMILIES)}")
    che = family.startswith("CHE")
    if che:
        p, kernels = che_draws(seed, 1)[0].with_(sigma=0), kc.che_catalog_kernels(lam)
    else:
        p, kernels = heun_draws(seed, 1)[0], kc.heun_catalog_kernels(lam)
    rows = []
    for fid, kernel in kernels:
        if fid.family != family:
            continue
        row = {"id": fid.tag(), "label": kernel.label}
        try:
            e = kc.entry(fid, kernel, p, provenance="catalog", seed=seed)
            row.update(status="pass", max_residual=e.certificate.max_residual)
            if dump:
                row["expr"] = to_json(e.expr)
        except HeunKernelError as exc:
            row.update(status="fail", reason=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return {"schema_version": 1, "family": family, "params": asdict(p), "lambda": lam, "entries": rows}


# output --------------------------------------------------------------------

def _emit(text: str, out: str | None, default_name: str) -> None:
    target = out
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = str(Path(os.environ[OUTPUT_DIR_ENV]) / default_name)
    if target is None:
        sys.stdout.write(text)
        return
    path = Path(target)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _report_text(rep: Report, fmt: str, csv_rows=None) -> str:
    if fmt == "json":
        return dumps(rep.document())
    if csv_rows is not None:
        return to_csv(csv_rows, ["family", "a", "sup_error"])
    rows = [{"key": c.key, "status": c.status, "residual": c.residual, "reason": c.reason}
            for c in sorted(rep.cases, key=lambda c: c.key)]
    return to_csv(rows, ["key", "status", "residual", "reason"])


def _complex_list(text: str) -> tuple:
    try:
        return tuple(complex(s.strip().replace(" ", "")) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad complex list {text!r}") from exc


def _families(text: str | None) -> tuple:
    if not text:
        return ()
    fams = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in fams if f not in kc.FAMILIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown families: {', '.join(bad)}")
    return fams


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heunkernels", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", "-o", help=f"output file (default: stdout or ${OUTPUT_DIR_ENV})")

    t = sub.add_parser("table", help="emit a transformation table")
    t.add_argument("--kind", choices=TABLE_KINDS, required=True)
    common(t)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--tol", type=float)
    v.add_argument("--samples", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--draws", type=int, default=5)
    v.add_argument("--families", type=_families, default=())
    v.add_argument("--closure", action="store_true", help="also sweep every N_i and K_j image")
    common(v)

    c = sub.add_parser("confluence", help="confluence error-vs-a sweep")
    c.add_argument("--a-values", type=_complex_list, default=(1e3, 1e4))
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--families", type=_families, default=())
    common(c)

    k = sub.add_parser("catalog", help="list (and optionally dump) a kernel family")
    k.add_argument("--family", choices=kc.FAMILIES, required=True)
    k.add_argument("--dump", action="store_true", help="include expression trees")
    k.add_argument("--seed", type=int, default=0)
    common(k, fmt=False)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table":
            _emit(render_table(args.kind, args.format), args.output, f"table-{args.kind}.{args.format}")
            return 0
        if args.command == "catalog":
            doc = catalog_document(args.family, args.dump, args.seed)
            _emit(dumps(doc), args.output, f"catalog-{args.family}.json")
            return int(any(r["status"] == "fail" for r in doc["entries"]))
        if args.command == "verify":
            cfg = RunConfig(seed=args.seed, tol=args.tol, samples=args.samples, draws=args.draws,
                            output_format=args.format, families=args.families,
                            closure=args.closure).validate()
            rep = run_suite(args.suite, cfg)
            _emit(_report_text(rep, args.format), args.output, f"verify-{args.suite}.{args.format}")
        else:
            cfg = RunConfig(seed=args.seed, a_values=args.a_values, output_format=args.format,
                            families=args.families).validate()
            rep = confluence_report(cfg)
            rows = confluence_rows(rep) if args.format == "csv" else None
            _emit(_report_text(rep, args.format, rows), args.output, f"confluence.{args.format}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    s = rep.summary()
    print(f"{rep.suite}: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped", file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
