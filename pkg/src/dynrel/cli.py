"""Command-line front end.

Each subcommand reads JSON model files, runs the corresponding analysis,
and writes a single machine-readable JSON report to standard output.
Exit codes: 0 success / positive verdict, 1 computed negative verdict,
2 input or validation error, 3 mathematical condition failure. Floats
are emitted with 17 significant digits so reports are byte-identical
across runs.
"""

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .errors import ConditionError, InputError
from .feedback import (
    FeedbackModel,
    closed_loop_T,
    feedback_free,
    granger_causes,
    verify_interchange_identities,
)
from .kernels import DEFAULT_TOL
from .lti import tf_eval
from .modelio import (
    ContinuousModelFile,
    SampledModelFile,
    build_ct_model,
    build_sampled_model,
    build_state_space,
    parse_model,
)
from .relation import (
    RowSelection,
    classify_selection,
    enumerate_selections,
    stable_selection_exists,
)
from .sampling import desample, dual_lyapunov_check, hidden_rank_report, sample
from .spectral import default_grid, spectral_rank_profile

__all__ = ["run", "main", "dumps_report"]


# --------------------------------------------------------------------------
# deterministic JSON emission

def _float_token(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number in report: {x!r}")
    return f"{x:.17g}"


def _scalar_token(v):
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _float_token(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        z = complex(v)
        return f'{{"re": {_float_token(z.real)}, "im": {_float_token(z.imag)}}}'
    return None


def _emit(v, lines: list, pad: str, indent: str = "  "):
    token = _scalar_token(v)
    if token is not None:
        lines.append(token)
        return
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, dict):
        if not v:
            lines.append("{}")
            return
        lines.append("{\n")
        for i, (key, val) in enumerate(v.items()):
            lines.append(f"{pad}{indent}{json.dumps(str(key))}: ")
            _emit(val, lines, pad + indent, indent)
            lines.append(",\n" if i < len(v) - 1 else "\n")
        lines.append(pad + "}")
        return
    if isinstance(v, (list, tuple)):
        items = list(v)
        if not items:
            lines.append("[]")
            return
        tokens = [_scalar_token(x) for x in items]
        if all(t is not None for t in tokens):
            lines.append("[" + ", ".join(tokens) + "]")
            return
        lines.append("[\n")
        for i, item in enumerate(items):
            lines.append(pad + indent)
            _emit(item, lines, pad + indent, indent)
            lines.append(",\n" if i < len(items) - 1 else "\n")
        lines.append(pad + "]")
        return
    raise TypeError(f"cannot serialize {type(v).__name__} in report")


def dumps_report(obj: dict) -> str:
    """Serialize a report with stable field order and 17-significant-digit
    floats; identical inputs give byte-identical output."""
    lines: list = []
    _emit(obj, lines, "")
    return "".join(lines) + "\n"


def _mat(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.atleast_2d(np.asarray(m, dtype=float))]


def _complex_list(values) -> list:
    return [complex(z) for z in values]


# --------------------------------------------------------------------------
# argument parsing

def _add_tol_flags(sp: argparse.ArgumentParser):
    sp.add_argument("--tol-rank", type=float, default=None,
                    help="override the relative rank cutoff")
    sp.add_argument("--tol-psd", type=float, default=None,
                    help="override the PSD negativity allowance")
    sp.add_argument("--tol-stability", type=float, default=None,
                    help="override the stability margin")
    sp.add_argument("--tol-residual", type=float, default=None,
                    help="override the residual bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynrel",
        description="Hidden deterministic relations, feedback structure, and "
                    "exact sampling for rational stochastic models.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check every model assumption")
    sp.add_argument("model")
    _add_tol_flags(sp)

    sp = sub.add_parser("spectrum", help="spectral density rank profile over a grid")
    sp.add_argument("model")
    sp.add_argument("--grid", default=None, metavar="LO:HI:N",
                    help="log-spaced frequency grid (default 1e-3:1e3:200)")
    _add_tol_flags(sp)

    sp = sub.add_parser("relation", help="extract the deterministic relation")
    sp.add_argument("model")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--rows", default=None, metavar="I,J,...",
                       help="driving rows of C (the u-channels)")
    group.add_argument("--all", action="store_true",
                       help="classify every admissible selection (default)")
    _add_tol_flags(sp)

    sp = sub.add_parser("stable-selection",
                        help="first selection with a strictly stable relation")
    sp.add_argument("model")
    _add_tol_flags(sp)

    sp = sub.add_parser("feedback", help="closed-loop analysis of a pair (F, H)")
    sp.add_argument("--f", required=True, dest="f_path", metavar="F.json")
    sp.add_argument("--h", required=True, dest="h_path", metavar="H.json")
    _add_tol_flags(sp)

    sp = sub.add_parser("granger", help="does the input channel help predict the output")
    sp.add_argument("--f", required=True, dest="f_path", metavar="F.json")
    _add_tol_flags(sp)

    sp = sub.add_parser("sample", help="exact discretization at period h")
    sp.add_argument("model")
    sp.add_argument("--h", required=True, type=float, dest="period")
    _add_tol_flags(sp)

    sp = sub.add_parser("desample", help="invert the sampling map")
    sp.add_argument("model")
    sp.add_argument("--h", type=float, default=None, dest="period",
                    help="sampling period (overrides the file's h)")
    _add_tol_flags(sp)

    sp = sub.add_parser("hidden-rank", help="rank bookkeeping across a round trip")
    sp.add_argument("model")
    sp.add_argument("--h", required=True, type=float, dest="period")
    _add_tol_flags(sp)

    return parser


def _tolerances(args):
    tol = DEFAULT_TOL
    overrides = {}
    if getattr(args, "tol_rank", None) is not None:
        overrides["rank_rtol"] = args.tol_rank
    if getattr(args, "tol_psd", None) is not None:
        overrides["psd_tol"] = args.tol_psd
    if getattr(args, "tol_stability", None) is not None:
        overrides["stability_margin"] = args.tol_stability
    if getattr(args, "tol_residual", None) is not None:
        overrides["residual_tol"] = args.tol_residual
    if overrides:
        try:
            tol = replace(tol, **overrides)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return tol


def _parse_grid(spec: str | None) -> np.ndarray:
    if spec is None:
        return default_grid()
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"--grid must look like LO:HI:N, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"--grid must look like LO:HI:N, got {spec!r}") from exc
    if not (lo > 0 and hi > 0 and count >= 1):
        raise InputError("--grid bounds must be positive and N >= 1")
    return default_grid(lo, hi, count)


def _continuous_file(path: str) -> ContinuousModelFile:
    mf = parse_model(path)
    if not isinstance(mf, ContinuousModelFile):
        raise InputError(f"{path}: expected a continuous model file")
    return mf


def _sampled_file(path: str) -> SampledModelFile:
    mf = parse_model(path)
    if not isinstance(mf, SampledModelFile):
        raise InputError(f"{path}: expected a sampled model file")
    return mf


# --------------------------------------------------------------------------
# subcommand handlers: each returns (report, exit_code)

def _cmd_validate(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    eigs = sorted(np.linalg.eigvals(model.A), key=lambda z: (z.real, z.imag))
    report = {
        "v": 1,
        "command": "validate",
        "input": args.model,
        "valid": True,
        "n": model.n,
        "outputs": model.n_out,
        "m": model.m,
        "eigenvalues": _complex_list(eigs),
        "labels": list(model.labels) if model.labels else None,
    }
    return report, 0


def _cmd_spectrum(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    grid = _parse_grid(args.grid)
    modal = spectral_rank_profile(model, grid, tol)
    match = modal == model.m
    report = {
        "v": 1,
        "command": "spectrum",
        "input": args.model,
        "grid": {"lo": float(grid[0]), "hi": float(grid[-1]), "count": int(grid.size)},
        "modal_rank": modal,
        "m": model.m,
        "match": match,
    }
    return report, 0 if match else 1


def _selection_entry(model, report):
    entry = {
        "rows0": list(report.selection.rows0),
        "rows1": list(report.selection.rows1),
        "gamma": _mat(report.gamma),
        "gamma_eigenvalues": _complex_list(report.gamma_eigs),
        "degree": report.degree,
        "stable": report.stable,
        "poles": _complex_list(report.poles),
        "F": {
            "A": _mat(report.F.A),
            "B": _mat(report.F.B),
            "C": _mat(report.F.C),
            "D": _mat(report.F.D),
        },
    }
    if model.labels:
        entry["u_labels"] = [model.labels[i] for i in report.selection.rows0]
    return entry


def _parse_rows(spec: str, m: int) -> tuple[int, ...]:
    try:
        rows = tuple(int(p) for p in spec.split(","))
    except ValueError as exc:
        raise InputError(f"--rows must be comma-separated integers, got {spec!r}") from exc
    if len(set(rows)) != len(rows):
        raise InputError(f"--rows has repeated indices: {spec!r}")
    if len(rows) != m:
        raise InputError(f"--rows must pick exactly m = {m} rows, got {len(rows)}")
    return rows


def _cmd_relation(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    base = {"v": 1, "command": "relation", "input": args.model, "m": model.m}
    if args.rows is not None:
        rows0 = _parse_rows(args.rows, model.m)
        rows1 = tuple(i for i in range(model.n_out) if i not in rows0)
        rep = classify_selection(model, RowSelection(rows0, rows1), tol)
        base["selection"] = _selection_entry(model, rep)
        return base, 0 if rep.stable else 1
    entries = [
        _selection_entry(model, classify_selection(model, sel, tol))
        for sel in enumerate_selections(model, tol)
    ]
    any_stable = any(e["stable"] for e in entries)
    base["selections"] = entries
    base["any_stable"] = any_stable
    return base, 0 if any_stable else 1


def _cmd_stable_selection(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    sel = stable_selection_exists(model, tol)
    report = {"v": 1, "command": "stable-selection", "input": args.model}
    if sel is None:
        report["found"] = False
        return report, 1
    rep = classify_selection(model, sel, tol)
    report["found"] = True
    report["selection"] = _selection_entry(model, rep)
    return report, 0


def _cmd_feedback(args, tol):
    f_sys = build_state_space(_continuous_file(args.f_path))
    h_sys = build_state_space(_continuous_file(args.h_path))
    fm = FeedbackModel(F=f_sys, H=h_sys)
    cl = closed_loop_T(fm, tol)
    residual = verify_interchange_identities(fm, grid=np.logspace(-2, 2, 20), tol=tol)
    verdict = feedback_free(h_sys, f_sys, tol)
    ok = verdict.h_zero and not verdict.inconsistent and cl.internally_stable
    report = {
        "v": 1,
        "command": "feedback",
        "f": args.f_path,
        "h": args.h_path,
        "well_posed": True,
        "internally_stable": cl.internally_stable,
        "interchange_residual": residual,
        "feedback_free": verdict.h_zero,
        "f_stable_when_h_zero": verdict.f_stable,
        "consistent": not verdict.inconsistent,
    }
    return report, 0 if ok else 1


def _cmd_granger(args, tol):
    f_sys = build_state_space(_continuous_file(args.f_path))
    peak = max(float(np.linalg.norm(tf_eval(f_sys, 1j * w), 2)) for w in default_grid())
    causes = granger_causes(f_sys, tol)
    report = {
        "v": 1,
        "command": "granger",
        "f": args.f_path,
        "granger_causes": causes,
        "peak_gain": peak,
    }
    return report, 0 if causes else 1


def _cmd_sample(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    sm = sample(model, args.period, tol)
    r_cont, r_disc = dual_lyapunov_check(model, sm, tol)
    report = {
        "v": 1,
        "command": "sample",
        "input": args.model,
        "h": float(args.period),
        "Ad": _mat(sm.Ad),
        "Bd": _mat(sm.Bd),
        "Qd": _mat(sm.Qd),
        "Cd": _mat(sm.Cd),
        "dual_residuals": {"continuous": r_cont, "discrete": r_disc},
    }
    return report, 0


def _diag_dict(diag) -> dict:
    out = {
        "logm_exists": diag.logm_exists,
        "qd_nonsingular": diag.qd_nonsingular,
        "neg_semidef_ok": diag.neg_semidef_ok,
    }
    if diag.residuals is not None:
        out["residuals"] = {"continuous": diag.residuals[0],
                            "discrete": diag.residuals[1]}
    out["recovered_rank"] = diag.recovered_rank
    return out


def _cmd_desample(args, tol):
    sm = build_sampled_model(_sampled_file(args.model), h=args.period, tol=tol)
    model, diag = desample(sm, tol)
    report = {
        "v": 1,
        "command": "desample",
        "input": args.model,
        "h": sm.h,
        "diagnostics": _diag_dict(diag),
        "A": _mat(model.A),
        "B": _mat(model.B),
        "BBt": _mat(model.B @ model.B.T),
        "C": _mat(model.C),
        "m": model.m,
    }
    return report, 0


def _cmd_hidden_rank(args, tol):
    model = build_ct_model(_continuous_file(args.model), tol)
    rep = hidden_rank_report(model, args.period, tol)
    report = {
        "v": 1,
        "command": "hidden-rank",
        "input": args.model,
        "h": float(args.period),
        "n": rep.n,
        "bbt_rank": rep.bbt_rank,
        "qd_rank": rep.qd_rank,
        "recovered_rank": rep.recovered_rank,
        "hidden": rep.qd_rank > rep.bbt_rank,
    }
    return report, 0


_HANDLERS = {
    "validate": _cmd_validate,
    "spectrum": _cmd_spectrum,
    "relation": _cmd_relation,
    "stable-selection": _cmd_stable_selection,
    "feedback": _cmd_feedback,
    "granger": _cmd_granger,
    "sample": _cmd_sample,
    "desample": _cmd_desample,
    "hidden-rank": _cmd_hidden_rank,
}


def _error_report(command: str, err: Exception) -> dict:
    report = {
        "v": 1,
        "command": command,
        "error": {"kind": type(err).__name__, "message": str(err)},
    }
    diag = getattr(err, "diagnostics", None)
    if diag is not None:
        report["diagnostics"] = _diag_dict(diag)
    return report


def run(argv) -> int:
    """Execute one subcommand; report to stdout, messages to stderr."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
        report, code = _HANDLERS[args.command](args, tol)
    except (InputError, ValueError) as err:
        sys.stdout.write(dumps_report(_error_report(args.command, err)))
        sys.stderr.write(f"error: {err}\n")
        return 2
    except ConditionError as err:
        sys.stdout.write(dumps_report(_error_report(args.command, err)))
        sys.stderr.write(f"error: {err}\n")
        return 3
    sys.stdout.write(dumps_report(report))
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
