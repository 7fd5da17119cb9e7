"""Command-line front end.

Exit codes: 0 success, 1 check or validation failure, 2 usage, IO or parse
error. Results go to stdout (or ``--output``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import connections as cx
from .catalog import CATALOG, catalog_json, catalog_names
from .classify import classify
from .exprlang import EvalDomainError
from .structure import (
    DegenerateMetricError, ManifoldSpec, SpecError, frame_at, load_spec, validate_structure,
)
from .structure import fundamental_tensor, nabla_g_phi, nijenhuis, second_nijenhuis
from .tensor import TensorValue
from .verify import render_report, run_suite

__all__ = ["main", "run_command", "build_parser", "SEED_ENV"]

SEED_ENV = "AESTRUCT_SEED"
DISPLAY_ZERO = 1e-12
KIND_NAMES = ("levi-civita", "first-canonical", "kobayashi-nomizu", "yano", "chern",
              "well-adapted", "bismut", "skew", "canonical")
WHAT = ("christoffel", "nablaJ", "phi", "nablaPhi", "nijenhuis", "second-nijenhuis")
SHOW = ("gamma", "torsion", "potential", "naturality", "f-tensor")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ output helpers

def _fmt_json_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and stable key order."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_dumps_str(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_json_float(float(obj))
    return _dumps_str(str(obj))


def _dumps_str(s: str) -> str:
    return json.dumps(s)


def _component_lines(label: str, t: TensorValue) -> list[str]:
    """Nonzero components with 1-based indices, e.g. ``nablaJ^1_{21} = 2``."""
    data = t.data
    scale = max(1.0, float(np.max(np.abs(data), initial=0.0)))
    lines = []
    for idx in np.ndindex(*data.shape):
        v = float(data[idx])
        if abs(v) <= DISPLAY_ZERO * scale:
            continue
        up = "".join(str(i + 1) for i, c in zip(idx, t.valence) if c == "u")
        low = "".join(str(i + 1) for i, c in zip(idx, t.valence) if c == "l")
        name = label + (f"^{up}" if up else "") + (f"_{{{low}}}" if low else "")
        lines.append(f"{name} = {v:.6g}")
    return lines or [f"{label}: all components zero"]


def _tensor_json(label: str, t: TensorValue) -> dict:
    return {"name": label, "valence": t.valence, "components": t.data.tolist()}


# ------------------------------------------------------------------ argument handling

def _parse_point(text: str, dim: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--point must be comma-separated reals, got {text!r}") from None
    if len(values) != dim:
        raise UsageError(f"--point has {len(values)} coordinates but the spec has dimension {dim}")
    if not all(math.isfinite(v) for v in values):
        raise UsageError("--point coordinates must be finite")
    return np.array(values)


def _seed_override(args, err) -> int | None:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    if raw.isdigit():
        return int(raw)
    print(f"warning: ignoring {SEED_ENV}={raw!r} (not an unsigned integer)", file=err)
    return None


def _load(args, err) -> ManifoldSpec:
    ref = args.spec
    path = Path(ref)
    if path.is_file():
        try:
            text = path.read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {ref}: {exc}") from None
        spec = load_spec(text)
    elif ref in CATALOG:
        spec = load_spec(catalog_json(ref))
    elif ref.endswith(".json") and Path(ref).stem in CATALOG and not path.exists():
        spec = load_spec(catalog_json(Path(ref).stem))
    else:
        raise UsageError(f"no spec file or catalog entry named {ref!r}")
    seed = _seed_override(args, err)
    return spec if seed is None else spec.with_seed(seed)


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _unsigned(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError("must be an unsigned integer")
    return int(text)


def _positive_real(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive real")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aestruct", description="Numerical toolkit for (alpha, epsilon)-structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec(p):
        p.add_argument("spec", help="spec JSON path or catalog name")
        p.add_argument("--seed", type=_unsigned, default=None, help="override the spec seed")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", default=None, help="write results to this path instead of stdout")

    def add_sampling(p):
        p.add_argument("--samples", type=_positive_int, default=64)
        p.add_argument("--tol", type=_positive_real, default=1e-8)

    p = sub.add_parser("validate", help="check the structure axioms at sample points")
    add_spec(p)
    add_sampling(p)

    p = sub.add_parser("eval", help="evaluate a structure tensor at a point")
    add_spec(p)
    p.add_argument("--point", required=True)
    p.add_argument("--what", choices=WHAT, required=True)

    p = sub.add_parser("connection", help="build a connection at a point")
    add_spec(p)
    p.add_argument("--point", required=True)
    p.add_argument("--kind", choices=KIND_NAMES, required=True)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--show", choices=SHOW, default="gamma")
    p.add_argument("--tol", type=_positive_real, default=1e-8)

    p = sub.add_parser("classify", help="structural type at sample points")
    add_spec(p)
    add_sampling(p)

    p = sub.add_parser("check", help="run the identity suite")
    add_spec(p)
    add_sampling(p)

    p = sub.add_parser("catalog", help="list bundled specs")
    p.add_argument("--emit", default=None, metavar="DIR", help="write every bundled spec to DIR")
    return parser


# ------------------------------------------------------------------ commands

def _cmd_validate(args, out, err) -> int:
    spec = _load(args, err)
    rep = validate_structure(spec, args.samples, args.tol)
    if args.format == "json":
        out.write(dumps({
            "spec": rep.spec_name, "samples": rep.samples, "tol": rep.tol,
            "residuals": rep.residuals, "min_abs_det": rep.min_abs_det,
            "positive_definite": rep.positive_definite, "errors": list(rep.errors),
            "status": "pass" if rep.passed else "fail",
        }) + "\n")
    else:
        for name, value in rep.residuals.items():
            out.write(f"{name} = {value:.6g}\n")
        out.write(f"min_abs_det = {rep.min_abs_det:.6g}\n")
        if rep.positive_definite is not None:
            out.write(f"positive_definite = {str(rep.positive_definite).lower()}\n")
        for e in rep.errors:
            out.write(f"error: {e}\n")
        out.write(("PASS" if rep.passed else "FAIL") + f" {rep.spec_name}\n")
    return 0 if rep.passed else 1


def _eval_tensor(frame, what: str) -> tuple[str, TensorValue]:
    if what == "christoffel":
        return "Gamma", TensorValue("ull", frame.gamma_g)
    if what == "nablaJ":
        return "nablaJ", frame.nabla_g_J
    if what == "phi":
        return "phi", fundamental_tensor(frame)
    if what == "nablaPhi":
        return "nablaPhi", nabla_g_phi(frame)
    if what == "nijenhuis":
        return "N", nijenhuis(frame)
    return "Ntilde", second_nijenhuis(frame)


def _emit_tensor(args, out, spec, point, label, t, extra=None):
    if args.format == "json":
        doc = {"spec": spec.name, "point": point.tolist()}
        doc.update(extra or {})
        doc.update(_tensor_json(label, t))
        out.write(dumps(doc) + "\n")
    else:
        out.write("\n".join(_component_lines(label, t)) + "\n")


def _frame(spec, point, err):
    frame = frame_at(spec, point)
    for w in frame.warnings:
        print(f"warning: {w}", file=err)
    return frame


def _cmd_eval(args, out, err) -> int:
    spec = _load(args, err)
    point = _parse_point(args.point, spec.dimension)
    frame = _frame(spec, point, err)
    label, t = _eval_tensor(frame, args.what)
    _emit_tensor(args, out, spec, point, label, t, {"what": args.what})
    return 0


def _cmd_connection(args, out, err) -> int:
    spec = _load(args, err)
    point = _parse_point(args.point, spec.dimension)
    kind = args.kind.replace("-", "_")
    if args.s is not None and kind != "canonical":
        raise UsageError("--s is only valid with --kind canonical")
    if kind == "canonical" and args.s is None:
        raise UsageError("--kind canonical needs --s")
    frame = _frame(spec, point, err)
    conn = cx.build_connection(frame, kind, s=args.s, tol=args.tol)
    extra = {"kind": args.kind, "s": args.s, "show": args.show}
    if args.show == "naturality":
        rj, rg = cx.naturality_residuals(conn)
        if args.format == "json":
            doc = {"spec": spec.name, "point": point.tolist(), **extra,
                   "nabla_J_residual": rj, "nabla_g_residual": rg}
            out.write(dumps(doc) + "\n")
        else:
            out.write(f"nabla_J_residual = {rj:.6g}\nnabla_g_residual = {rg:.6g}\n")
        return 0
    if args.show == "gamma":
        label, t = "Gamma", TensorValue("ull", conn.gamma)
    elif args.show == "torsion":
        label, t = "T", cx.torsion(conn)
    elif args.show == "potential":
        label, t = "S", cx.potential(conn)
    else:
        label, t = "F", cx.f_tensor(conn)
    _emit_tensor(args, out, spec, point, label, t, extra)
    return 0


def _cmd_classify(args, out, err) -> int:
    spec = _load(args, err)
    rep = classify(spec, args.samples, args.tol)
    if args.format == "json":
        out.write(dumps(rep.to_dict()) + "\n")
    else:
        for r in rep.results:
            if r.verdict is None:
                out.write(f"{r.name}: not applicable (alpha*epsilon=+1)\n")
                continue
            verdict = "holds" if r.verdict else "fails"
            out.write(f"{r.name}: {verdict} at {r.samples} sampled points "
                      f"(max_residual={r.max_residual:.6g}, tol={rep.tol:.6g})\n")
        for v in rep.violations():
            out.write(f"inconsistent: {v}\n")
    return 1 if rep.violations() else 0


def _cmd_check(args, out, err) -> int:
    spec = _load(args, err)
    reports = run_suite(spec, args.samples, args.tol)
    out.write(render_report(reports, args.format).decode())
    return 1 if any(r.status == "fail" for r in reports) else 0


def _cmd_catalog(args, out, err) -> int:
    if args.emit is not None:
        target = Path(args.emit)
        try:
            target.mkdir(parents=True, exist_ok=True)
            for name in catalog_names():
                (target / f"{name}.json").write_text(catalog_json(name))
        except OSError as exc:
            raise UsageError(f"cannot write to {target}: {exc}") from None
    for name in catalog_names():
        e = CATALOG[name]
        out.write(f"{name}\tdim={e['dimension']}\talpha={e['alpha']}\tepsilon={e['epsilon']}\n")
    return 0


COMMANDS = {
    "validate": _cmd_validate,
    "eval": _cmd_eval,
    "connection": _cmd_connection,
    "classify": _cmd_classify,
    "check": _cmd_check,
    "catalog": _cmd_catalog,
}


def _dispatch(argv: Sequence[str], out, err) -> int:
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    buffer = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buffer, err)
    except (UsageError, SpecError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except cx.WrongSignatureError as exc:
        print(str(exc), file=err)
        return 2
    except (cx.ConnectionBuildError, DegenerateMetricError, EvalDomainError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    text = buffer.getvalue()
    output = getattr(args, "output", None)
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            print(f"error: cannot write {output}: {exc}", file=err)
            return 2
    else:
        out.write(text)
    return code


def run_command(argv: Sequence[str]) -> tuple[int, bytes, bytes]:
    """Run one invocation in-process; returns (exit code, stdout bytes, stderr bytes)."""
    out, err = io.StringIO(), io.StringIO()
    code = _dispatch(argv, out, err)
    return code, out.getvalue().encode(), err.getvalue().encode()


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    return _dispatch(argv, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
