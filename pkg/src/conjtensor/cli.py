"""Command-line interface.

Every subcommand writes one deterministic JSON document (or polynomial text)
to stdout.  Exit codes: 0 success, 2 invalid input, 3 no convergence,
1 any other failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources

import jsonschema
import numpy as np

from . import apps, banach, bijection, eigen, forms
from .core import as_tensor
from .errors import ArgumentError, ConjTensorError, ConvergenceError, DimensionError, ParseError, StructureError

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NOCONV = 0, 1, 2, 3
SIG_DIGITS = 12


class InputError(ConjTensorError):
    """Input document failed validation."""


# --------------------------------------------------------------------------
# serialization


def num(v: float) -> float:
    """Round to 12 significant digits; negative zero becomes zero."""
    v = float(f"{float(v):.{SIG_DIGITS}g}")
    return 0.0 if v == 0 else v


def cnum(z: complex) -> dict:
    z = complex(z)
    return {"re": num(z.real), "im": num(z.imag)}


def cvec(x) -> list[dict]:
    return [cnum(z) for z in np.asarray(x).ravel()]


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"


def tensor_to_doc(T: np.ndarray, cutoff: float = 1e-13) -> dict:
    """Sparse document; entries below ``cutoff * max(1, max|T|)`` are omitted."""
    T = np.asarray(T, dtype=complex)
    limit = cutoff * max(1.0, float(np.abs(T).max(initial=0.0)))
    entries = []
    for idx in zip(*np.nonzero(np.abs(T) > limit)):
        entries.append({"idx": [int(i) + 1 for i in idx], **cnum(T[idx])})
    return {"dims": [int(s) for s in T.shape], "entries": entries}


def _schema(name: str) -> dict:
    text = resources.files("conjtensor").joinpath("schemas", name).read_text()
    return json.loads(text)


def _validate(doc, schema_name: str):
    try:
        jsonschema.validate(doc, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"schema error at {path}: {exc.message}") from None


def doc_to_tensor(doc) -> np.ndarray:
    _validate(doc, "tensor.schema.json")
    dims = tuple(doc["dims"])
    T = np.zeros(dims, dtype=complex)
    seen = set()
    for k, e in enumerate(doc["entries"]):
        idx = tuple(e["idx"])
        if len(idx) != len(dims):
            raise InputError(f"schema error at entries/{k}/idx: expected {len(dims)} indices, got {len(idx)}")
        if any(i > n for i, n in zip(idx, dims)):
            raise InputError(f"schema error at entries/{k}/idx: {list(idx)} outside dims {list(dims)}")
        if idx in seen:
            raise InputError(f"schema error at entries/{k}/idx: duplicate index {list(idx)}")
        seen.add(idx)
        T[tuple(i - 1 for i in idx)] = complex(e["re"], e["im"])
    return as_tensor(T)


def poly_payload(p: forms.ConjugatePolynomial) -> dict:
    cls = forms.classify_form(p)
    return {
        "text": forms.print_poly(p),
        "n": p.n,
        "class": {"kind": cls.kind, "degree": cls.degree},
        "terms": [{"conj": list(k.conj), "plain": list(k.plain), **cnum(c)} for k, c in p.terms.items()],
    }


def pair_payload(p: eigen.EigenPair) -> dict:
    return {
        "lambda": num(p.lam),
        "x": cvec(p.x),
        "residual": num(p.residual),
        "iters": p.iters,
        "start_id": p.start_id,
    }


def report_payload(r: banach.EqualityReport) -> dict:
    out = {
        "lhs": num(r.lhs),
        "rhs": num(r.rhs),
        "gap": num(r.gap),
        "verdict": r.verdict,
        "tol": num(r.tol),
        "expected_equal": r.expected_equal,
        "retried": r.retried,
        "witnesses": {
            "lhs": cvec(r.witnesses["lhs"]),
            "rhs": [cvec(b) for b in r.witnesses["rhs"]],
        },
    }
    if r.degenerate or r.recovered is not None:
        out["degenerate"] = r.degenerate
        out["recovered"] = None if r.recovered is None else cvec(r.recovered)
        out["recovered_value"] = None if r.recovered_value is None else num(r.recovered_value)
    return out


# --------------------------------------------------------------------------
# commands


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from None


def _config(args) -> eigen.SolverConfig:
    return eigen.SolverConfig(starts=args.starts, tol=args.tol, seed=args.seed, max_iters=args.max_iters)


def cmd_parse(args):
    return poly_payload(forms.parse_poly(args.text, n=args.n))


def cmd_check_real(args):
    p = forms.parse_poly(args.text, n=args.n)
    v = forms.check_real_valued(p, args.tol)
    return {
        "real_valued": v.real_valued,
        "violations": v.violations,
        "witnesses": [
            {
                "key": {"conj": list(w.key.conj), "plain": list(w.key.plain)},
                "partner": {"conj": list(w.partner.conj), "plain": list(w.partner.plain)},
                "coeff": cnum(w.coeff),
                "partner_coeff": cnum(w.partner_coeff),
                "violation": num(w.violation),
            }
            for w in v.witnesses
        ],
    }


def cmd_convert(args):
    mode = args.mode
    if mode in ("S", "G", "embed-css"):
        T = doc_to_tensor(_read_json(args.text))
        if mode == "S":
            return forms.print_poly(bijection.s_forward(T)) + "\n"
        if mode == "G":
            return forms.print_poly(bijection.g_forward(T)) + "\n"
        return tensor_to_doc(bijection.embed_cps_to_css(T))
    p = forms.parse_poly(args.text, n=args.n)
    if mode == "S-inv":
        return tensor_to_doc(bijection.s_inverse(p, d=args.degree))
    return tensor_to_doc(bijection.g_inverse(p, d=args.degree))


def cmd_decompose(args):
    T = doc_to_tensor(_read_json(args.text))
    dec = bijection.cps_decompose(T)
    return {
        "alphas": [num(a) for a in dec.alphas],
        "components": [tensor_to_doc(H) for H in dec.components],
        "residual": num(dec.residual),
        "flattening_psd": bijection.is_flattening_psd(T),
    }


def cmd_eig(args):
    T = doc_to_tensor(_read_json(args.text))
    solver = {"C": eigen.solve_c_eig, "G": eigen.solve_g_eig, "Q": eigen.solve_q_eig}[args.kind]
    pairs = solver(T, _config(args))
    return {"kind": args.kind, "pairs": [pair_payload(p) for p in pairs]}


def cmd_banach(args):
    T = doc_to_tensor(_read_json(args.text))
    cfg = _config(args)
    if args.check == "css":
        r = banach.check_css_banach(T, cfg)
    elif args.check == "cps":
        r = banach.check_cps_banach(T, cfg)
    elif args.check == "hermitian":
        r = banach.hermitian_banach(T, cfg, strict=False)
    else:
        r = banach.check_symmetric_complex_banach(T, cfg)
    return {"check": args.check, **report_payload(r)}


def cmd_rank1(args):
    T = doc_to_tensor(_read_json(args.text))
    r = apps.rank_one_als(T, _config(args))
    return {
        "factors": [cvec(z) for z in r.factors],
        "scale": num(r.scale),
        "objective": num(r.objective),
        "residual": num(r.residual),
        "converged": r.converged,
    }


def cmd_radar(args):
    doc = _read_json(args.text)
    _validate(doc, "radar.schema.json")
    if "reference" in doc and len(doc["reference"]) != doc["n"]:
        raise InputError(f"schema error at reference: expected {doc['n']} entries, got {len(doc['reference'])}")
    sc = apps.RadarScenario.from_dict(doc)
    sol = apps.solve_radar(sc, _config(args))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(sol.report_csv())
    return {
        "code": cvec(sol.code),
        "objective": num(sol.objective),
        "disturbance": num(sol.disturbance),
        "tensor_value": num(sol.tensor_value),
        "ambiguity": [
            {"r": row.r, "j": row.j, "x_j": num(row.x_j), "weight": num(row.weight), "value": num(row.value)}
            for row in sol.report
        ],
    }


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conjtensor", description="Conjugate complex forms and structured tensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, solver=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")
        p.add_argument("--manifest", metavar="PATH", help="also write a run manifest")
        if solver:
            p.add_argument("--starts", type=int, default=32)
            p.add_argument("--tol", type=float, default=1e-8)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--max-iters", type=int, default=2000)
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "canonicalize a polynomial")
    p.add_argument("--n", type=int, help="number of variables")
    p = add("check-real", cmd_check_real, "test whether a polynomial is real-valued")
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float, default=forms.TAU_PARSED)
    p = add("convert", cmd_convert, "map between forms and tensors")
    p.add_argument("--mode", required=True, choices=["S", "S-inv", "G", "G-inv", "embed-css"])
    p.add_argument("--n", type=int, help="number of variables of a polynomial input")
    p.add_argument("--degree", type=int, help="degree for the zero polynomial (half-degree for S-inv)")
    add("decompose", cmd_decompose, "split a CPS tensor into conj(H) (x) H terms")
    p = add("eig", cmd_eig, "eigenpairs of a structured tensor", solver=True)
    p.add_argument("--kind", required=True, choices=["C", "G", "Q"])
    p = add("banach", cmd_banach, "compare symmetric and multilinear maxima", solver=True)
    p.add_argument("--check", required=True, choices=["css", "cps", "hermitian", "symmetric"])
    add("rank1", cmd_rank1, "best rank-one approximation", solver=True)
    p = add("radar", cmd_radar, "radar code design", solver=True)
    p.add_argument("--csv", metavar="PATH", help="write the ambiguity report as CSV")
    return parser


def _manifest(args, payload, wall: float) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "manifest", "input", "command", "text")}
    return {
        "command": args.command,
        "config": config,
        "input_digest": "sha256:" + hashlib.sha256(args.text.encode()).hexdigest(),
        "results": payload,
        "wall_time_s": round(wall, 6),
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        args.text = _read(args.input)
        payload = args.func(args)
    except (InputError, ParseError, DimensionError, ArgumentError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except ConjTensorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    wall = time.perf_counter() - start
    sys.stdout.write(payload if isinstance(payload, str) else dumps(payload))
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(dumps(_manifest(args, payload, wall)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
