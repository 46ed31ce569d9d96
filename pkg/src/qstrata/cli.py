"""Command-line interface: ``qstrata <command> ...``.

Every command prints one JSON document on stdout; warnings go to stderr.
Exit status is 0 on success, 1 on a domain failure (a report is still
printed) and 2 on I/O or parse errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings

import numpy as np

from . import composite, entanglement, kraus, strata
from ._common import (
    TOL_PSD,
    TOL_RANK,
    TOL_TRACE,
    DegenerateMapError,
    DimensionError,
    SingularMatrixError,
    ValidationError,
)
from .io import MatrixFileError, dumps, encode_complex, loads_matrix_file, to_matrix_file

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class DomainFailure(Exception):
    """Raised by a command after filling in a failing report."""


def _int_list(text):
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(path, stdin):
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class _Context:
    def __init__(self, args, stdin):
        self.args = args
        self.stdin = stdin
        self.digest = hashlib.sha256()
        self.warnings = []

    def load(self, path, validate=True):
        text = _read(path, self.stdin)
        self.digest.update(text.encode("utf-8"))
        return loads_matrix_file(text, validate)

    def warn(self, msg):
        self.warnings.append(msg)


def _sha(arr):
    return hashlib.sha256(json.dumps(encode_complex(arr)).encode()).hexdigest()


def cmd_density(ctx):
    a = ctx.args
    _, mat, dims = ctx.load(a.file, validate=False)
    if mat.ndim != 2:
        raise MatrixFileError("density check needs a square matrix")
    herm_res = float(np.max(np.abs(mat - mat.conj().T)))
    sym = (mat + mat.conj().T) / 2
    w = np.linalg.eigvalsh(sym)
    trace = float(np.trace(sym).real)
    rank = strata.rank_of(sym, a.tol_rank)
    sig = strata.signature_of(sym, a.tol_rank)
    checks = {
        "hermitian": herm_res <= a.tol_herm,
        "positive": bool(w[0] >= -a.tol_psd),
        "unit_trace": abs(trace - 1) <= a.tol_trace,
    }
    results = {
        "hermiticity_residual": herm_res,
        "min_eigenvalue": float(w[0]),
        "trace": trace,
        "trace_residual": trace - 1,
        "rank": rank,
        "signature": list(sig),
        "checks": checks,
        "valid": all(checks.values()),
    }
    if results["valid"]:
        results["extreme_point"] = rank == 1
    diag = {"tol_herm": a.tol_herm, "tol_psd": a.tol_psd, "tol_trace": a.tol_trace, "tol_rank": a.tol_rank}
    if not results["valid"]:
        raise DomainFailure(results, diag)
    return results, diag


def cmd_chart(ctx):
    a = ctx.args
    _, mat, _ = ctx.load(a.file)
    coords = strata.chart_forward(mat, a.J, a.tol_rank)
    results = {
        "n": coords.n,
        "index": list(coords.index),
        "diag": coords.diag.tolist(),
        "offdiag": encode_complex(coords.offdiag),
        "pairs": [list(p) for p in coords.pairs],
        "real_coordinates": coords.as_real().tolist(),
    }
    if a.roundtrip:
        rebuilt = strata.chart_reconstruct(coords)
        results["roundtrip_max_abs_error"] = float(np.max(np.abs(rebuilt - mat)))
    return results, {"tol_rank": a.tol_rank}


def cmd_schmidt(ctx):
    a = ctx.args
    kind, vec, file_dims = ctx.load(a.file)
    if kind != "vector":
        raise MatrixFileError("schmidt needs a vector file")
    dims = a.dims or file_dims
    if dims is None or len(dims) != 2:
        raise DimensionError("schmidt needs two dimensions (--dims n1,n2)")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1) > 1e-9:
        ctx.warn(f"input vector has norm {norm!r}, not 1")
    dec = composite.schmidt(vec, dims, a.tol_rank)
    results = {"coefficients": dec.coefficients.tolist(), "schmidt_number": dec.number, "norm": norm}
    if a.frames:
        results["left"] = encode_complex(dec.left)
        results["right"] = encode_complex(dec.right)
    return results, {"tol_rank": a.tol_rank, "dims": list(dims)}


def _bell_calibration():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    # Wootters concurrence of a Bell state is 1.
    return entanglement.pure_concurrence(bell, entanglement.build_form_bipartite((2, 2))) / 1.0


def _form_from_args(ctx, dims):
    a = ctx.args
    if a.mixture:
        text = _read(a.mixture, ctx.stdin)
        ctx.digest.update(text.encode("utf-8"))
        try:
            entries = json.loads(text)
            mix = {tuple(e["signs"]): float(e["weight"]) for e in entries}
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise MatrixFileError(f"bad mixture file: {exc}") from None
        return entanglement.build_form_mixture(dims, mix), {"mixture": [{"signs": list(k), "weight": v} for k, v in mix.items()]}
    signs = a.signs.split(",") if a.signs else ["-"] * len(dims)
    return entanglement.build_form_signs(dims, signs), {"signs": signs}


def cmd_concurrence(ctx):
    a = ctx.args
    kind, value, file_dims = ctx.load(a.file)
    dims = a.dims or file_dims
    if dims is None:
        raise DimensionError("concurrence needs --dims")
    form, form_desc = _form_from_args(ctx, dims)
    if form.degenerate:
        ctx.warn("odd number of antisymmetric factors: concurrence vanishes identically")
    diag = {"dims": list(dims), "m": form.m, "kappa": _bell_calibration(), "kappa_note": "bilinear Bell value / Wootters Bell value", **form_desc}
    results = {"mode": a.mode}
    if a.mode == "pure":
        if kind != "vector":
            raise MatrixFileError("pure mode needs a vector file")
        results["value"] = 0.0 if form.degenerate else entanglement.pure_concurrence(value, form)
        return results, diag
    if kind != "density":
        raise MatrixFileError(f"{a.mode} mode needs a density file")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if a.mode == "lower":
            val, z = entanglement.optimize_lower_bound(
                value, form, a.z_strategy, alpha=a.alpha, count=a.count, iters=a.iters, seed=a.seed
            )
            results.update(value=val, z=encode_complex(z))
            diag.update(z_strategy=a.z_strategy, seed=a.seed, iters=a.iters, count=a.count)
        else:
            est = composite.convex_roof_estimate(
                lambda psi: entanglement.pure_concurrence(psi, form),
                value,
                a.v_strategy,
                count=a.count,
                iters=a.iters,
                seed=a.seed,
            )
            val = 0.0 if form.degenerate else entanglement.upper_bound(value, form, est.isometry)
            results.update(value=val, terms=int(est.isometry.shape[0]), v_digest=_sha(est.isometry))
            diag.update(v_strategy=a.v_strategy, seed=a.seed, iters=a.iters, count=a.count, evaluations=est.evaluations)
    return results, diag


def cmd_kraus(ctx):
    a = ctx.args
    kind, ops, _ = ctx.load(a.kraus_file)
    if kind != "kraus":
        raise MatrixFileError("first file must be a kraus file")
    skind, state, sdims = ctx.load(a.state_file)
    if skind not in ("density", "hermitian"):
        raise MatrixFileError("second file must be a density or hermitian file")
    kmap = kraus.KrausMap(ops)
    results = {"nondegenerate": kraus.is_nondegenerate(kmap)}
    if a.normalize:
        if skind != "density":
            raise MatrixFileError("--normalize needs a density file")
        out = kraus.normalized_apply(kmap, state)
        out_kind = "density"
    else:
        out = kraus.apply(kmap, state)
        out_kind = "hermitian"
    results["state"] = to_matrix_file(out_kind, out, sdims)
    if a.canonical:
        canon = kraus.canonical_form(kmap)
        results["canonical"] = to_matrix_file("kraus", canon.ops)
        results["choi_rank"] = len(canon)
    group = kraus.try_as_group_element(kmap)
    results["group_element"] = None if group is None else encode_complex(group)
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(results["state"]))
    return results, {"normalize": a.normalize, "canonical": a.canonical}


def _random_doc(args):
    rng = np.random.default_rng(args.seed)
    dims = args.dims
    n = int(np.prod(dims))
    if args.kind == "pure":
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        return to_matrix_file("vector", x / np.linalg.norm(x), dims if len(dims) > 1 else None)
    if args.kind == "density":
        rank = n if args.rank is None else args.rank
        if not 1 <= rank <= n:
            raise ValidationError(f"rank {rank} outside 1..{n}")
        g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
        rho = g @ g.conj().T
        rho = (rho + rho.conj().T) / 2
        return to_matrix_file("density", rho / np.trace(rho).real, dims if len(dims) > 1 else None)
    ops = rng.normal(size=(args.count, n, n)) + 1j * rng.normal(size=(args.count, n, n))
    return to_matrix_file("kraus", ops / np.sqrt(2 * n * args.count), None)


def build_parser():
    p = argparse.ArgumentParser(prog="qstrata", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def tol_flags(sp):
        sp.add_argument("--tol-rank", type=float, default=TOL_RANK)
        sp.add_argument("--tol-psd", type=float, default=TOL_PSD)

    d = sub.add_parser("density", help="validate a density matrix and report its stratum")
    d.add_argument("file")
    tol_flags(d)
    d.add_argument("--tol-trace", type=float, default=TOL_TRACE)
    d.add_argument("--tol-herm", type=float, default=1e-9)

    c = sub.add_parser("chart", help="chart coordinates on a rank stratum")
    c.add_argument("file")
    c.add_argument("--J", type=_int_list, required=True, help="0-based indices, e.g. 0,1")
    c.add_argument("--roundtrip", action="store_true")
    tol_flags(c)

    s = sub.add_parser("schmidt", help="Schmidt decomposition of a bipartite vector")
    s.add_argument("file")
    s.add_argument("--dims", type=_int_list)
    s.add_argument("--frames", action="store_true")
    tol_flags(s)

    q = sub.add_parser("concurrence", help="pure concurrence or mixed-state bounds")
    q.add_argument("file")
    q.add_argument("--dims", type=_int_list)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--signs", help="comma-separated + and -, e.g. +,-,-")
    g.add_argument("--mixture", help="JSON list of {signs, weight}")
    q.add_argument("--mode", choices=("pure", "lower", "upper"), default="pure")
    q.add_argument("--z-strategy", choices=("single", "random", "refine"), default="single")
    q.add_argument("--v-strategy", choices=("eigen", "random", "refine"), default="eigen")
    q.add_argument("--alpha", type=int, default=0)
    q.add_argument("--count", type=int, default=32)
    q.add_argument("--iters", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    tol_flags(q)

    k = sub.add_parser("kraus", help="apply a Kraus map to a state")
    k.add_argument("kraus_file")
    k.add_argument("state_file")
    k.add_argument("--normalize", action="store_true")
    k.add_argument("--canonical", action="store_true")
    k.add_argument("--out")

    r = sub.add_parser("random", help="seeded random vector, density or Kraus file")
    r.add_argument("--kind", choices=("pure", "density", "kraus"), required=True)
    r.add_argument("--dims", type=_int_list, required=True)
    r.add_argument("--rank", type=int)
    r.add_argument("--count", type=int, default=2, help="number of Kraus operators")
    r.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "density": cmd_density,
    "chart": cmd_chart,
    "schmidt": cmd_schmidt,
    "concurrence": cmd_concurrence,
    "kraus": cmd_kraus,
}

DOMAIN_ERRORS = (ValidationError, DimensionError, SingularMatrixError, DegenerateMapError)


def main(argv=None, stdin=None, stdout=None, stderr=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK

    if args.command == "random":
        try:
            stdout.write(dumps(_random_doc(args)))
        except ValidationError as exc:
            stderr.write(f"error: {exc}\n")
            return EXIT_DOMAIN
        return EXIT_OK

    ctx = _Context(args, stdin)
    status = EXIT_OK
    try:
        results, diag = COMMANDS[args.command](ctx)
    except (OSError, MatrixFileError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except DomainFailure as exc:
        results, diag = exc.args
        status = EXIT_DOMAIN
    except DOMAIN_ERRORS as exc:
        results, diag = {"error": str(exc), "error_type": type(exc).__name__}, {}
        status = EXIT_DOMAIN
    report = {
        "command": argv,
        "inputs_digest": ctx.digest.hexdigest(),
        "results": results,
        "diagnostics": diag,
        "warnings": ctx.warnings,
        "status": "ok" if status == EXIT_OK else "failed",
    }
    for w in ctx.warnings:
        stderr.write(f"warning: {w}\n")
    stdout.write(dumps(report))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
