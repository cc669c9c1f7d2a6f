"""Command-line interface: structure-file I/O, verification reports, invariant
evaluation, signature-curve export, equivalence and classification.

Structure files are JSON with a versioned schema ("format": 1); unknown
fields are rejected so that archived inputs stay reproducible.  All reports
are emitted as deterministic JSON on stdout (sorted keys, no timestamps);
wall time goes to stderr.  Exit codes: 0 all checks met, 1 checks failed,
2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, catalog as cat, exprlang
from .catalog import (
    DIM_GE4,
    HOMOGENEOUS_MODEL,
    MAINTH_FORM,
    THREED_CASE1,
    THREED_CASE2,
    CatalogEntry,
    CatalogError,
    make_3d_case1,
    make_3d_case2,
    make_dim_ge4,
    make_homogeneous_model,
    make_mainth_form,
    standard_catalog,
)
from .einsteinweyl import ew_residual
from .invariants import (
    SingularStratumError,
    equivalence_test,
    pair_invariants,
    pair_jet_from_exprs,
    pair_signature_curve,
    psi_invariants,
    psi_jet_from_expr,
    psi_signature_curve,
    surface_invariants,
    f_jet_from_expr,
    surface_signature_curve,
)
from .symmetry import classify_3d2, classify_psi
from .tensor import (
    conformal_weyl_tensor,
    holonomy_span_dim,
    one_form_jets,
    recurrence_theta,
    weyl_compatibility_residual,
)

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    pass


# ----------------------------------------------------------------------
# structure files
# ----------------------------------------------------------------------

_FAMILY_FIELDS = {
    DIM_GE4: {"psi", "n", "branch"},
    MAINTH_FORM: {"F", "a", "n"},
    THREED_CASE1: {"F"},
    THREED_CASE2: {"a", "c"},
    HOMOGENEOUS_MODEL: {"n"},
}
_COMMON_FIELDS = {"format", "family", "box", "seed", "constraints", "key"}


def structure_file_payload(entry: CatalogEntry) -> Dict:
    payload: Dict[str, object] = {
        "format": FORMAT_VERSION,
        "family": entry.family,
        "key": entry.key,
        "box": {k: list(v) for k, v in entry.box.items()},
        "seed": entry.seed,
    }
    params = entry.params
    if entry.family == DIM_GE4:
        payload.update({"psi": params["psi"], "n": params["n"], "branch": params["branch"]})
    elif entry.family == MAINTH_FORM:
        payload.update({"F": params["F"], "a": params["a"], "n": params["n"]})
    elif entry.family == THREED_CASE1:
        payload.update({"F": params["F"]})
    elif entry.family == THREED_CASE2:
        payload.update({"a": params["a"], "c": params["c"]})
    elif entry.family == HOMOGENEOUS_MODEL:
        payload.update({"n": params["n"]})
    constraints = [exprlang.to_source(c) for c in entry.structure.chart.constraints]
    if constraints:
        payload["constraints"] = constraints
    return payload


def load_structure_file(path: str) -> CatalogEntry:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        data = json.loads(raw.decode("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    if data.get("format") != FORMAT_VERSION:
        raise InputError(f"{path}: unsupported format {data.get('format')!r} (expected {FORMAT_VERSION})")
    family = data.get("family")
    if family not in _FAMILY_FIELDS:
        raise InputError(f"{path}: unknown family {family!r}; known: {sorted(_FAMILY_FIELDS)}")
    allowed = _COMMON_FIELDS | _FAMILY_FIELDS[family]
    unknown = set(data) - allowed
    if unknown:
        raise InputError(f"{path}: unknown fields {sorted(unknown)} (schema is closed)")
    missing = _FAMILY_FIELDS[family] - set(data)
    if missing - {"branch"}:
        raise InputError(f"{path}: missing fields {sorted(missing)} for family {family!r}")
    box = None
    if "box" in data:
        box = {k: (float(v[0]), float(v[1])) for k, v in data["box"].items()}
    seed = int(data.get("seed", 0))
    key = data.get("key", family)
    constraints = tuple(data.get("constraints", ()))
    try:
        if family == DIM_GE4:
            return make_dim_ge4(
                data["psi"], int(data["n"]), branch=int(data.get("branch", 1)), box=box, key=key, seed=seed
            )
        if family == MAINTH_FORM:
            return make_mainth_form(
                data["F"], data["a"], int(data["n"]), box=box, key=key, seed=seed, constraints=constraints
            )
        if family == THREED_CASE1:
            return make_3d_case1(data["F"], box=box, key=key, seed=seed, constraints=constraints)
        if family == THREED_CASE2:
            return make_3d_case2(data["a"], data["c"], box=box, key=key, seed=seed, constraints=constraints)
        return make_homogeneous_model(int(data["n"]), box=box, key=key, seed=seed)
    except (CatalogError, exprlang.ExprError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _emit_json(payload: Dict, out: Optional[str] = None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_catalog(args) -> int:
    entries = standard_catalog()
    if args.action == "list":
        header = f"{'key':18s} {'family':14s} {'dim':>3s} {'holonomy':>8s}  description"
        print(header)
        print("-" * len(header))
        for e in entries.values():
            hol = e.expected.get("holonomy_dim")
            print(f"{e.key:18s} {e.family:14s} {e.dim:3d} {str(hol):>8s}  {e.description}")
        return EXIT_OK
    # emit
    if args.key not in entries:
        print(f"error: unknown catalog entry {args.key!r}; run 'catalog list'", file=sys.stderr)
        return EXIT_INPUT_ERROR
    _emit_json(structure_file_payload(entries[args.key]), args.path)
    return EXIT_OK


def _verify_checks(entry: CatalogEntry, tol: float, samples: int, seed: int, order: int) -> Tuple[List[Dict], bool]:
    checks: List[Dict] = []
    expected = entry.expected
    points = entry.sample_points(samples, seed)

    compat = max(weyl_compatibility_residual(entry.structure, p) for p in points)
    checks.append(
        {
            "name": "metric_compatibility",
            "status": "pass" if compat <= 1e-10 else "fail",
            "max_residual": compat,
            "tolerance": 1e-10,
        }
    )

    rec_pts = points[: max(2, min(len(points), 5))]
    reports = [recurrence_theta(entry.structure, p, tol=tol, jet_order=order) for p in rec_pts]
    recurrent = all(r.status == "ok" and r.recurrent for r in reports)
    rec_check = {
        "name": "recurrence",
        "status": "pass" if recurrent == expected.get("recurrent", True) else "fail",
        "recurrent": recurrent,
        "expected": expected.get("recurrent", True),
        "max_residual": max(r.max_residual for r in reports),
        "tolerance": tol,
    }
    if expected.get("is_preferred_rep") and reports[0].theta is not None:
        worst = 0.0
        for p, r in zip(rec_pts, reports):
            w = np.array([float(x.value) for x in one_form_jets(entry.structure, p, 0)])
            worst = max(worst, float(np.max(np.abs(r.theta + 3.0 * w))))
        rec_check["theta_plus_3omega"] = worst
        if worst > 1e-8 and expected.get("recurrent", True):
            rec_check["status"] = "fail"
    probe = entry.preferred if entry.preferred is not None else None
    if probe is not None and expected.get("weight") is not None:
        wrep = recurrence_theta(probe, rec_pts[0], tol=tol, jet_order=order)
        rec_check["weight_fit"] = wrep.weight
        if wrep.weight is None or abs(wrep.weight - float(expected["weight"])) > 1e-6:
            rec_check["status"] = "fail"
    checks.append(rec_check)

    if expected.get("holonomy_dim") is not None:
        dims = sorted({holonomy_span_dim(entry.structure, p).span_dim for p in rec_pts})
        ok = dims == [expected["holonomy_dim"]]
        checks.append(
            {
                "name": "holonomy_span_dim",
                "status": "pass" if ok else "fail",
                "observed": dims,
                "expected": expected["holonomy_dim"],
            }
        )

    if entry.dim >= 4 and "conformally_flat" in expected:
        worst = max(conformal_weyl_tensor(entry.structure, p).norm() for p in rec_pts)
        ok = (worst <= 1e-9) == bool(expected["conformally_flat"])
        checks.append(
            {
                "name": "conformal_flatness",
                "status": "pass" if ok else "fail",
                "max_weyl_norm": worst,
                "expected_flat": bool(expected["conformally_flat"]),
            }
        )

    if "einstein_weyl" in expected:
        reports = [ew_residual(entry.structure, p) for p in rec_pts]
        worst = max(r.residual for r in reports)
        if expected["einstein_weyl"]:
            ok = worst <= 1e-9
            rec = {"name": "einstein_weyl", "status": "pass" if ok else "fail", "max_residual": worst}
            dkps = [r.dkp_residual for r in reports if r.dkp_residual is not None]
            if dkps:
                rec["max_dkp_residual"] = max(abs(v) for v in dkps)
                if rec["max_dkp_residual"] > 1e-10:
                    rec["status"] = "fail"
        else:
            ok = worst > 1e-3
            rec = {"name": "not_einstein_weyl", "status": "pass" if ok else "fail", "min_residual": worst}
        checks.append(rec)

    all_ok = all(c["status"] == "pass" for c in checks)
    return checks, all_ok


def cmd_verify(args) -> int:
    t0 = time.monotonic()
    if args.order < 3:
        raise InputError("--order must be >= 3 (curvature checks need third metric derivatives)")
    entry = load_structure_file(args.file)
    seed = _seed(args)
    checks, ok = _verify_checks(entry, args.tol, args.samples, seed, args.order)
    report = {
        "format": FORMAT_VERSION,
        "tool": f"weylrec {__version__}",
        "input": os.path.basename(args.file),
        "input_digest": _digest(args.file),
        "family": entry.family,
        "key": entry.key,
        "seed": seed,
        "samples": args.samples,
        "tolerance": args.tol,
        "checks": checks,
        "pass": ok,
    }
    if args.timing:
        report["wall_time_ms"] = round(1000 * (time.monotonic() - t0), 3)
    _emit_json(report, args.json)
    print(f"wall time: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECKS_FAILED


def _invariant_record(entry: CatalogEntry, at: float, second: Optional[float]) -> Dict:
    if entry.family == DIM_GE4:
        jet = psi_jet_from_expr(entry.params["psi"], at, order=5)
        inv = psi_invariants(jet)
        return {"family": entry.family, "at": at, "I": float(inv.I), "J": float(inv.J), "sign_D": inv.sign_disc}
    if entry.family == THREED_CASE2:
        inv = pair_invariants(pair_jet_from_exprs(entry.params["a"], entry.params["c"], at, order=2))
        return {"family": entry.family, "at": at, "I": float(inv.I), "J": float(inv.J), "K": float(inv.K)}
    if entry.family == THREED_CASE1:
        if second is None:
            raise InputError("the two-variable family needs --at X,U (two values)")
        inv = surface_invariants(f_jet_from_expr(entry.params["F"], at, second, order=4))
        return {"family": entry.family, "at": [at, second], "I": float(inv.I), "J": float(inv.J)}
    raise InputError(f"invariants are not defined for family {entry.family!r}")


def cmd_invariants(args) -> int:
    entry = load_structure_file(args.file)
    vals = [float(v) for v in args.at.split(",")]
    try:
        record = _invariant_record(entry, vals[0], vals[1] if len(vals) > 1 else None)
    except SingularStratumError as exc:
        record = {"family": entry.family, "at": vals if len(vals) > 1 else vals[0], "singular": str(exc)}
    _emit_json(record, args.json)
    return EXIT_OK


def _parse_range(text: str) -> Tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise InputError(f"bad range {text!r}; expected LO:HI") from exc


def _curve_for(entry: CatalogEntry, rng: Tuple[float, float], samples: int):
    if entry.family == DIM_GE4:
        return psi_signature_curve(entry.params["psi"], rng[0], rng[1], samples)
    if entry.family == THREED_CASE2:
        return pair_signature_curve(entry.params["a"], entry.params["c"], rng[0], rng[1], samples)
    if entry.family == THREED_CASE1:
        xr = entry.box["x"]
        ur = entry.box["u"]
        side = max(2, int(round(samples**0.5)))
        return surface_signature_curve(entry.params["F"], xr, ur, side, side)
    raise InputError(f"signature curves are not defined for family {entry.family!r}")


def cmd_signature(args) -> int:
    entry = load_structure_file(args.file)
    rng = _parse_range(args.range) if args.range else _default_range(entry)
    curve = _curve_for(entry, rng, args.samples)
    lines = []
    if curve.kind == "psi":
        lines.append("param,I,J,sign_D,singular_flag")
        for p, tup, s in zip(curve.params, curve.tuples, curve.signs):
            lines.append(f"{p!r},{tup[0]!r},{tup[1]!r},{s},0")
    elif curve.kind == "pair":
        lines.append("param,I,J,K,singular_flag")
        for p, tup in zip(curve.params, curve.tuples):
            lines.append(f"{p!r},{tup[0]!r},{tup[1]!r},{tup[2]!r},0")
    else:
        lines.append("param_x,param_u,I,J,dI_1,dI_2,singular_flag")
        for (x, u), tup in zip(curve.params, curve.tuples):
            lines.append(f"{x!r},{u!r},{tup[0]!r},{tup[1]!r},{tup[2]!r},{tup[3]!r},0")
    lines.append(f"# singular_samples_dropped,{curve.n_singular}")
    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _default_range(entry: CatalogEntry) -> Tuple[float, float]:
    if entry.family == DIM_GE4:
        return entry.box["t"]
    if entry.family in (THREED_CASE2,):
        return entry.box["u"]
    return entry.box.get("u", (0.5, 1.5))


def cmd_equiv(args) -> int:
    e1 = load_structure_file(args.file1)
    e2 = load_structure_file(args.file2)
    if e1.family != e2.family:
        print(f"error: cannot compare families {e1.family!r} and {e2.family!r}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    r1 = _parse_range(args.range) if args.range else _default_range(e1)
    r2 = _parse_range(args.range2) if args.range2 else (_parse_range(args.range) if args.range else _default_range(e2))
    c1 = _curve_for(e1, r1, args.samples)
    c2 = _curve_for(e2, r2, args.samples)
    verdict = equivalence_test(c1, c2, tol=args.tol)
    payload = {
        "format": FORMAT_VERSION,
        "tool": f"weylrec {__version__}",
        "verdict": verdict.verdict,
        "hausdorff": verdict.hausdorff,
        "discriminant_signs": [list(s) for s in verdict.signs],
        "reason": verdict.reason,
        "inputs": [os.path.basename(args.file1), os.path.basename(args.file2)],
        "input_digests": [_digest(args.file1), _digest(args.file2)],
    }
    _emit_json(payload, args.json)
    return EXIT_OK


def cmd_classify(args) -> int:
    entry = load_structure_file(args.file)
    if entry.family == DIM_GE4:
        lo, hi = entry.box["t"]
        result = classify_psi(entry.params["psi"], interval=(lo, hi), seed=entry.seed)
    elif entry.family == THREED_CASE2:
        lo, hi = entry.box["u"]
        result = classify_3d2(entry.params["a"], entry.params["c"], interval=(lo, hi), seed=entry.seed)
    else:
        print(
            f"error: classification needs a one-function or pair family input, got {entry.family!r}",
            file=sys.stderr,
        )
        return EXIT_INPUT_ERROR
    payload = {
        "format": FORMAT_VERSION,
        "tool": f"weylrec {__version__}",
        "family": entry.family,
        "cohomogeneity": result.cohomogeneity,
        "kind": result.kind,
        "consistent": result.consistent,
        "kernel_dim": result.kernel.dim,
        "kernel_basis": [[float(x) for x in row] for row in result.kernel.basis],
        "kernel_singular_values": [float(v) for v in result.kernel.singular_values],
        "invariant_spread": result.evidence.get("invariant_spread"),
        "input_digest": _digest(args.file),
    }
    if result.parameter is not None:
        payload["A"] = result.parameter
    _emit_json(payload, args.json)
    return EXIT_OK if result.consistent else EXIT_CHECKS_FAILED


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


def _seed(args) -> int:
    env = os.environ.get("WEYL_SEED")
    if env is not None:
        return int(env)
    return args.seed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weylrec", description=__doc__)
    p.add_argument("--version", action="version", version=f"weylrec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("catalog", help="list the built-in models or emit one as a structure file")
    pcsub = pc.add_subparsers(dest="action", required=True)
    pcsub.add_parser("list", help="table of catalog entries")
    pe = pcsub.add_parser("emit", help="write a structure file for an entry")
    pe.add_argument("key")
    pe.add_argument("path", nargs="?", default=None)

    pv = sub.add_parser("verify", help="run the geometric checks on a structure file")
    pv.add_argument("file")
    pv.add_argument("--tol", type=float, default=1e-8, help="recurrence tolerance")
    pv.add_argument("--samples", type=int, default=20, help="sample-point count")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--order", type=int, default=3, help="metric jet order for the curvature checks (>= 3)")
    pv.add_argument("--json", default=None, help="write the report here instead of stdout")
    pv.add_argument("--timing", action="store_true", help="include wall time in the JSON report")

    pi = sub.add_parser("invariants", help="evaluate the generating invariants at a parameter value")
    pi.add_argument("file")
    pi.add_argument("--at", required=True, help="parameter value (or X,U for the two-variable family)")
    pi.add_argument("--json", default=None)

    ps = sub.add_parser("signature", help="sample a signature curve as CSV")
    ps.add_argument("file")
    ps.add_argument("--range", default=None, help="parameter range LO:HI")
    ps.add_argument("--samples", type=int, default=64)
    ps.add_argument("--csv", default=None, help="write CSV here instead of stdout")

    pq = sub.add_parser("equiv", help="decide local equivalence of two structure files")
    pq.add_argument("file1")
    pq.add_argument("file2")
    pq.add_argument("--range", default=None, help="parameter range for the first input")
    pq.add_argument("--range2", default=None, help="parameter range for the second input")
    pq.add_argument("--samples", type=int, default=64)
    pq.add_argument("--tol", type=float, default=1e-6)
    pq.add_argument("--json", default=None)

    pk = sub.add_parser("classify", help="cohomogeneity / normal-form classification")
    pk.add_argument("file")
    pk.add_argument("--json", default=None)

    return p


_DISPATCH = {
    "catalog": cmd_catalog,
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "signature": cmd_signature,
    "equiv": cmd_equiv,
    "classify": cmd_classify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (exprlang.ExprError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
