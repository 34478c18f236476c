"""``abel-orbits`` command-line front end.

Every invocation prints one JSON report with sorted keys and floats at 17
significant digits, so identical requests give byte-identical output.
Exit codes: 0 success, 2 parse or usage error, 3 inconsistency flagged.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import criteria, lyapunov, perturb, poincare, sweep
from .coeffs import AbelEquation, SignClass
from .integrate import DEFAULT_ATOL, DEFAULT_RTOL
from .specio import SpecError, equation_to_dict, parse_document, serialize

__all__ = ["COMMANDS", "AnalysisRequest", "Report", "UsageError", "run", "dumps", "main"]

COMMANDS = ("analyze", "orbits", "criterion", "lyapunov", "bifurcate", "perturb", "transform")
EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT = 0, 2, 3

# options each command accepts besides the scan window and --tol
_EXTRA = {
    "analyze": {"witness"},
    "orbits": set(),
    "criterion": {"witness", "sweep"},
    "lyapunov": set(),
    "bifurcate": set(),
    "perturb": {"epsilon"},
    "transform": set(),
}
_SCAN_OPTS = {"tol", "scan_min", "scan_max", "scan_n"}
_NO_SCAN = {"lyapunov", "transform", "perturb"}


class UsageError(ValueError):
    pass


@dataclass
class AnalysisRequest:
    command: str
    equation: AbelEquation | None
    options: dict[str, Any] = field(default_factory=dict)
    design: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        allowed = _EXTRA[self.command] | ({"timings"})
        if self.command not in _NO_SCAN:
            allowed |= _SCAN_OPTS
        bad = sorted(set(self.options) - allowed)
        if bad:
            raise UsageError(f"{self.command} does not accept {', '.join('--' + b.replace('_', '-') for b in bad)}")
        if self.command == "bifurcate" and not self.design:
            raise UsageError("bifurcate needs a design block in the equation document")
        if self.command == "perturb" and not self.perturbation:
            raise UsageError("perturb needs a perturbation block in the equation document")
        if self.command not in ("bifurcate", "perturb") and self.equation is None:
            raise UsageError(f"{self.command} needs A and B in the equation document")
        w = self.options.get("witness")
        if w is not None and len(w) not in (2, 3):
            raise UsageError("--witness takes a,b or a,b,c")
        tol = self.options.get("tol")
        if tol is not None and not 0 < tol < 1:
            raise UsageError("--tol must lie in (0, 1)")
        if self.options.get("sweep") is not None and self.options["sweep"] < 1:
            raise UsageError("--sweep must be positive")

    def scan_config(self, **overrides) -> poincare.ScanConfig:
        o = self.options
        kw = {}
        if "scan_min" in o:
            kw["x_min"] = o["scan_min"]
        if "scan_max" in o:
            kw["x_max"] = o["scan_max"]
        if "scan_n" in o:
            kw["n_points"] = o["scan_n"]
        if "tol" in o:
            kw["rel_tol"] = kw["abs_tol"] = o["tol"]
        kw.update(overrides)
        try:
            return poincare.ScanConfig(**kw)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


@dataclass
class Report:
    request: dict
    results: dict
    diagnostics: dict
    inconsistencies: list[str] = field(default_factory=list)

    @property
    def inconsistent(self) -> bool:
        return bool(self.inconsistencies)

    def to_dict(self) -> dict:
        return {"INCONSISTENCY": self.inconsistent, "inconsistencies": self.inconsistencies,
                "request": self.request, "results": self.results,
                "diagnostics": self.diagnostics}


# ---------------------------------------------------------------------------
# deterministic serialisation


def _plain(obj: Any) -> Any:
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return obj


def _emit(obj: Any, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return format(obj, ".17g")
        return json.dumps("nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf"))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_emit(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, str)) or v is None for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _emit(v, indent, level + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """JSON with sorted keys and ``.17g`` floats; non-finite floats become strings."""
    return _emit(_plain(obj), 2, 0) + "\n"


# ---------------------------------------------------------------------------
# payload builders


def _sign(sc: SignClass | None) -> dict | None:
    if sc is None:
        return None
    return {"sign": sc.sign.value, "minimum": sc.minimum, "maximum": sc.maximum,
            "method": sc.method, "evidence": [list(e) for e in sc.evidence]}


def _region(r: criteria.Region | None) -> dict | None:
    if r is None:
        return None
    return {"lo": r.lo, "hi": r.hi, "case": r.case, "guaranteed": r.guaranteed,
            "flipped_x": r.flipped_x, "flipped_t": r.flipped_t, "description": r.describe()}


def _criterion(rep: criteria.CriterionReport) -> dict:
    w = rep.witness
    return {
        "criterion": rep.criterion,
        "applies": rep.applies,
        "witness": None if w is None else {"a": w.a, "b": w.b, "c": w.c, "kind": w.kind.value},
        "sign_evidence": _sign(rep.sign_evidence),
        "orbit_bound": rep.orbit_bound,
        "hyperbolic_guarantee": rep.hyperbolic_guarantee,
        "location": _region(rep.location),
        "notes": list(rep.notes),
        "details": rep.details,
    }


def _orbit(o: poincare.OrbitRecord) -> dict:
    return {"x0": o.x0, "multiplier": o.multiplier, "stability": o.stability.value,
            "residual": o.residual, "divergence_integral": o.divergence_integral}


def _scan(res: poincare.ScanResult) -> dict:
    return {"orbits": [_orbit(o) for o in res.orbits],
            "nonzero_count": len(res.nonzero_orbits),
            "center_bands": [list(b) for b in res.center_bands],
            "grid_points": int(len(res.x0)),
            "completed_points": int(np.sum(res.status == 0))}


def _lyap(c: lyapunov.LyapunovConstants) -> dict:
    return {"v2": c.v2, "v3": c.v3, "v4": c.v4, "method": c.method.value,
            "center_verdict": c.center_verdict.value, "tolerance": c.tolerance,
            "first_nonzero": c.first_nonzero()}


def _zero(z) -> dict:
    out = {"kind": type(z).__name__, "evidence": z.evidence}
    if isinstance(z, poincare.SemiStable):
        out.update(multiplicity=2, sign=z.sign)
    elif isinstance(z, poincare.OrdinaryMultiplicity):
        out.update(multiplicity=z.k, exact=z.exact)
    return out


def _criteria_for(eq: AbelEquation, witness: tuple | None) -> list[criteria.CriterionReport]:
    reps: list[criteria.CriterionReport] = []
    hint = tuple(witness[:2]) if witness is not None and len(witness) == 2 else None
    if eq.C.is_zero:
        reps.append(criteria.thm_a_check(eq))
        poly = lyapunov.poly3_coefficients(eq)
        if poly is not None:
            reps.append(criteria.corollary_periodic_ends(*poly.coefficients, poly.j, poly.k))
        trig = lyapunov.trig1_coefficients(eq)
        if trig is not None and criteria.no_orbit_test_trig1(*trig.coefficients):
            reps.append(criteria.CriterionReport(
                "no_orbit_trig1", True, orbit_bound=0, hyperbolic_guarantee=True,
                location=criteria.Region(0.0, 0.0, "none"),
                notes=("strict amplitude inequalities exclude non-zero orbits",)))
        if hint is not None:
            sc = criteria.certify_witness(eq, *hint)
            if sc.definite:
                w = criteria.Witness(hint[0], hint[1], criteria.WitnessKind.THM_A)
                loc = criteria.locate_orbit(eq, w) if hint[0] and hint[1] else None
                reps.append(criteria.CriterionReport("thm_a_user_witness", True, w, sc, 1, True, loc))
            else:
                reps.append(criteria.CriterionReport("thm_a_user_witness", False, sign_evidence=sc,
                                                     notes=("a A + b B is not sign-definite",)))
    else:
        reps.append(criteria.thm51_check(eq, hint))
    if witness is not None and len(witness) == 3:
        reps.append(criteria.thm52_check(eq, *witness))
    return reps


def _consistency(reps, res: poincare.ScanResult) -> list[str]:
    nz = res.nonzero_orbits
    issues = []
    for rep in reps:
        if not rep.applies or rep.orbit_bound is None:
            continue
        if len(nz) > rep.orbit_bound:
            issues.append(f"{rep.criterion} bounds non-zero orbits by {rep.orbit_bound} "
                          f"but the scan found {len(nz)}")
        if rep.hyperbolic_guarantee and any(not o.hyperbolic for o in nz):
            issues.append(f"{rep.criterion} guarantees hyperbolicity but the scan found a "
                          f"non-hyperbolic orbit")
        loc = rep.location
        if loc is not None and rep.orbit_bound == 1:
            for o in nz:
                if not loc.contains(o.x0):
                    issues.append(f"{rep.criterion} places the orbit in {loc.describe()} "
                                  f"but the scan found x0 = {o.x0:.12g}")
    return issues


class _Clock:
    def __init__(self):
        self.times: dict[str, float] = {}

    def __call__(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        self.times[name] = time.perf_counter() - t0
        return out


def _design_equation(d: dict) -> AbelEquation:
    fam = d.get("family")
    try:
        if fam == "trig":
            return lyapunov.design_two_orbit_trig(d["v4"], d["mu"], d["lambda"])
        if fam == "poly":
            return lyapunov.design_two_orbit_poly(d["j"], d["k"], d["v4"], d["mu"], d["lambda"])
    except KeyError as exc:
        raise UsageError(f"design block is missing {exc.args[0]!r}") from None
    except lyapunov.PreconditionError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError("design block needs family: trig or poly")


def _perturbation_params(d: dict, epsilon: float | None) -> perturb.PerturbationParams:
    eps = d.get("epsilon", 0.0) if epsilon is None else epsilon
    try:
        return perturb.PerturbationParams(
            d.get("b1", 1.0), d.get("a0", 0.0), d.get("a1", 0.0), d.get("a2", 0.0),
            d.get("b0", 0.0), eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run(req: AnalysisRequest) -> tuple[Report, poincare.ScanResult | None]:
    """Dispatch ``req``; also returns the scan (if any) for CSV export."""
    req.validate()
    cmd, eq, opts = req.command, req.equation, req.options
    clock = _Clock()
    results: dict[str, Any] = {}
    warnings: list[str] = []
    issues: list[str] = []
    scan = None
    tolerances: dict[str, Any] = {"tau_hyp": poincare.TAU_HYP}

    def do_scan(e, cfg=None):
        cfg = cfg or req.scan_config()
        tolerances.update(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
                          residual_tol=cfg.residual_tol, refine_tol=cfg.refine_tol,
                          scan=[cfg.x_min, cfg.x_max, cfg.n_points, cfg.spacing])
        res = clock("scan", poincare.scan_periodic_orbits, e, cfg)
        warnings.extend(res.warnings)
        return res

    if cmd == "bifurcate":
        eq = _design_equation(req.design)
    request = {"command": cmd, "options": {k: opts[k] for k in sorted(opts) if k != "timings"},
               "equation": None if eq is None else equation_to_dict(eq)}
    if req.design:
        request["design"] = req.design
    if req.perturbation:
        request["perturbation"] = req.perturbation

    if cmd == "orbits":
        scan = do_scan(eq)
        results["scan"] = _scan(scan)

    elif cmd == "lyapunov":
        try:
            results["lyapunov"] = _lyap(clock("lyapunov", lyapunov.lyapunov_constants, eq))
        except lyapunov.UnsupportedFamilyError as exc:
            raise UsageError(str(exc)) from None

    elif cmd == "criterion":
        if "sweep" in opts:
            fam = "trig" if lyapunov.trig1_coefficients(eq) is not None else (
                "poly" if lyapunov.poly3_coefficients(eq) is not None else None)
            if fam is None:
                raise UsageError("--sweep needs a degree-one trig or three-monomial equation")
            sw = clock("sweep", sweep.criterion_sweep, fam, opts["sweep"], None, req.scan_config())
            results["sweep"] = {"family": sw.family, "draws": sw.draws, "applied": sw.applied,
                                "with_orbit": sw.with_orbit, "violations": sw.violations}
            issues.extend(f"sweep draw {v['index']}: {v['n_orbits']} orbit(s) against bound 1"
                          for v in sw.violations)
        reps = clock("criteria", _criteria_for, eq, opts.get("witness"))
        results["criteria"] = [_criterion(r) for r in reps]

    elif cmd == "analyze":
        if eq.C.is_zero:
            results["zero_solution"] = _zero(clock("classify_zero", poincare.classify_zero, eq))
            results["lyapunov"] = _lyap(clock("lyapunov", lyapunov.lyapunov_constants, eq))
        else:
            warnings.append("C is not zero: zero-solution classification and Lyapunov "
                            "constants skipped")
        reps = clock("criteria", _criteria_for, eq, opts.get("witness"))
        results["criteria"] = [_criterion(r) for r in reps]
        scan = do_scan(eq)
        results["scan"] = _scan(scan)
        issues.extend(_consistency(reps, scan))

    elif cmd == "bifurcate":
        results["design"] = {"equation": equation_to_dict(eq),
                             "lyapunov": _lyap(lyapunov.lyapunov_constants(eq))}
        scan = do_scan(eq)
        results["scan"] = _scan(scan)
        nz = scan.nonzero_orbits
        hyp = [o for o in nz if o.hyperbolic]
        results["verification"] = {"nonzero_orbits": len(nz), "hyperbolic_orbits": len(hyp),
                                   "passes": len(hyp) >= 2 and len(hyp) == len(nz)}
        if not results["verification"]["passes"]:
            warnings.append("designed equation did not show two hyperbolic non-zero orbits")

    elif cmd == "perturb":
        p = _perturbation_params(req.perturbation, opts.get("epsilon"))
        rec = clock("reconcile", perturb.reconcile, p)
        tolerances.update(quadrature=perturb.QUAD_TOL, band_margin=perturb.BAND_MARGIN)
        roots = perturb.predict_bifurcating_orbits(p)
        results["w_hat"] = {
            "degenerate": perturb.w_hat_degenerate(p),
            "quadrature_roots": [{"rho": r.rho, "simple": r.simple, "derivative": r.derivative}
                                 for r in roots],
            "closed_form_roots": list(rec.closed_form_roots),
            "max_discrepancy": rec.max_discrepancy,
            "note": rec.note,
        }
        if len(rec.quadrature_roots) != len(rec.closed_form_roots):
            warnings.append("quadrature and closed form disagree on the root count")
        if len(rec.quadrature_roots) > 2:
            issues.append(f"quadrature found {len(rec.quadrature_roots)} roots; at most 2 expected")
        if p.epsilon > 0:
            try:
                recs, found = clock("validation", perturb.validate_against_integration, p)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            results["validation"] = {
                "epsilon": p.epsilon,
                "records": [{"rho_predicted": r.rho_predicted, "x0_found": r.x0_found,
                             "gap": r.gap, "gap_half": r.gap_half, "gap_ratio": r.gap_ratio,
                             "multiplier": r.multiplier} for r in recs],
                "orbits_found": [_orbit(o) for o in found],
            }

    elif cmd == "transform":
        ic = eq.C.integrate()
        out = criteria.thm51_transform(eq)
        results["int_C"] = ic
        results["periodic_correspondence"] = abs(ic) <= criteria.MEAN_TOL
        results["spec_document"] = serialize(out)
        if abs(ic) > criteria.MEAN_TOL:
            warnings.append("int C is not zero; periodic orbits do not correspond")

    diagnostics: dict[str, Any] = {"tolerances": tolerances, "warnings": warnings,
                                   "defaults": {"rel_tol": DEFAULT_RTOL, "abs_tol": DEFAULT_ATOL}}
    if opts.get("timings"):
        diagnostics["runtimes"] = clock.times
    return Report(request, results, diagnostics, issues), scan


def write_csv(path: str, scan: poincare.ScanResult) -> None:
    """Rows ``series,index,u,v``: ``scan`` rows hold ``(x0, Pi(x0) - x0)``,
    ``trajectory`` rows hold ``(t, x)`` for orbit ``index``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["series", "index", "u", "v"])
        for x, d in zip(scan.x0, scan.displacement):
            w.writerow(["scan", 0, format(float(x), ".17g"), format(float(d), ".17g")])
        for i, o in enumerate(scan.orbits):
            tr = o.trajectory
            for t, x in zip(tr.t, tr.x):
                w.writerow(["trajectory", i, format(float(t), ".17g"), format(float(x), ".17g")])


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abel-orbits", description="Periodic orbits of Abel equations "
                "x' = A x^3 + B x^2 + C x on [0, 1].")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", required=True, help="equation document (YAML)")
    p.add_argument("--json", help="also write the report to this file")
    p.add_argument("--csv", help="write scan and trajectory data to this file")
    p.add_argument("--tol", type=float, help="integration tolerance (rel and abs)")
    p.add_argument("--scan-min", type=float)
    p.add_argument("--scan-max", type=float)
    p.add_argument("--scan-n", type=int)
    p.add_argument("--epsilon", type=float, help="perturbation size for perturb")
    p.add_argument("--witness", type=_floats, help="a,b or a,b,c")
    p.add_argument("--sweep", type=int, help="soundness sweep with N random draws (criterion)")
    p.add_argument("--timings", action="store_true", help="include runtimes in diagnostics")
    return p


_OPT_NAMES = ("tol", "scan_min", "scan_max", "scan_n", "epsilon", "witness", "sweep")


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        try:
            with open(args.spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read equation document: {exc}") from None
        doc = parse_document(text, require_equation=args.command not in ("bifurcate", "perturb"))
        opts = {k: getattr(args, k) for k in _OPT_NAMES if getattr(args, k) is not None}
        if args.timings:
            opts["timings"] = True
        req = AnalysisRequest(args.command, doc.equation, opts, doc.design, doc.perturbation)
        if args.csv and args.command in _NO_SCAN | {"criterion"}:
            raise UsageError(f"--csv is not available for {args.command}")
        report, scan = run(req)
    except (UsageError, SpecError) as exc:
        print(f"abel-orbits: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report.to_dict())
    sys.stdout.write(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    if args.csv and scan is not None:
        write_csv(args.csv, scan)
    return EXIT_INCONSISTENT if report.inconsistent else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
