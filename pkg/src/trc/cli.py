"""``trc``: command-line front end for rank certification and search.

Exit codes: 0 for a definitive answer, 2 for INCONCLUSIVE (or an exhausted
search budget), 1 for usage, input or verification errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as tio
from .errors import BudgetExceeded, NotWaringDecomposable, TrcError
from .exact_linalg import bareiss_eliminate, clear_denominators
from .ff_search import SearchBudget, rank_over_Fq, search_decomposition, srank_over_Fq
from .nss_certifier import (
    DEFAULT_MAX_DEGREE,
    Status,
    certify_rank_gt,
    certify_srank_gt,
    complexity_estimate,
    rank_tasks,
    sym_rank_tasks,
    verify_certificate,
)
from .tensor_core import (
    DenseTensor,
    SymTensor,
    compress,
    eval_decomposition,
    rank_bounds,
    sym_expand,
    sym_pack,
    unfold,
    unfolding_ranks,
)

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def _load_dense(path: str) -> DenseTensor:
    T = tio.parse_tensor(_read(path))
    return sym_expand(T) if isinstance(T, SymTensor) else T


def _load_sym(path: str) -> SymTensor:
    T = tio.parse_tensor(_read(path))
    return T if isinstance(T, SymTensor) else sym_pack(T)


def _budget(args) -> SearchBudget:
    return SearchBudget(max_candidates=args.budget, max_seconds=args.time_limit)


def _print_verdict(v, out):
    out.append(f"verdict {v.status.value}")
    out.append(f"question {'srank' if v.symmetric else 'rank'} > {v.r}")
    out.append(f"method {v.method}")
    out.append(f"justification {v.justification}")
    if v.method == "nullstellensatz":
        out.append(f"systems {v.counters.get('systems', 0)}")
        out.append("degrees " + (" ".join(map(str, v.degrees)) or "-"))
        out.append(f"max-degree-used {v.max_degree_used}")
        out.append(f"reductions {v.counters.get('reductions', 0)}")


# ------------------------------------------------------------- commands


def cmd_info(args, out):
    T = _load_dense(args.tensor)
    ranks = unfolding_ranks(T)
    lo, hi = rank_bounds(T)
    out.append("shape " + " ".join(map(str, T.shape)))
    out.append(T.field.spec_line())
    out.append("unfolding-ranks " + " ".join(map(str, ranks)))
    out.append(f"rank-bounds {lo}..{hi}")
    if args.trace:
        for j in range(1, T.shape.d + 1):
            out.append(f"trace mode {j}")
            if T.field.is_finite:
                out.append("  (fraction-free trace applies to Q and Q(i) only)")
                continue
            report = bareiss_eliminate(clear_denominators(unfold(T, j))).report()
            out.extend("  " + line for line in report.splitlines())
    return EXIT_OK


def cmd_compress(args, out):
    T = _load_dense(args.tensor)
    core, _ = compress(T)
    out.append("core-shape " + " ".join(map(str, core.shape)))
    text = tio.format_tensor(core)
    if args.output:
        _write(args.output, text)
        out.append(f"written {args.output}")
    else:
        out.append(text.rstrip("\n"))
    return EXIT_OK


def _certify(args, out, symmetric):
    _need_rank(args)
    T = _load_sym(args.tensor) if symmetric else _load_dense(args.tensor)
    witness = None
    if args.witness:
        d = T.d if symmetric else T.shape.d
        witness = tio.parse_decomposition(_read(args.witness), T.field, d)
    run = certify_srank_gt if symmetric else certify_rank_gt
    v = run(T, args.rank, max_degree=args.max_degree, normalize=args.normalize, witness=witness)
    _print_verdict(v, out)
    if v.status is Status.CERTIFIED_GT:
        path = args.output or f"{Path(args.tensor).name}.rank{args.rank}.cert"
        _write(path, tio.format_bundle(T, v))
        out.append(f"bundle {path}")
    if v.status is Status.DISPROVED:
        out.append(tio.format_decomposition(v.witness, T.field).rstrip("\n"))
    return EXIT_INCONCLUSIVE if v.status is Status.INCONCLUSIVE else EXIT_OK


def cmd_certify(args, out):
    return _certify(args, out, symmetric=False)


def cmd_certify_sym(args, out):
    return _certify(args, out, symmetric=True)


def _need_rank(args):
    if args.rank is None:
        raise UsageError("--rank is required")
    if args.rank < 1:
        raise UsageError("--rank must be at least 1")


def _finite(T):
    if not T.field.is_finite:
        raise UsageError("exhaustive search needs a GF(q) tensor")


def cmd_search(args, out):
    _need_rank(args)
    T = _load_dense(args.tensor)
    _finite(T)
    dec = search_decomposition(T, args.rank, _budget(args))
    if dec is None:
        out.append(f"none: rank over GF({T.field.order}) exceeds {args.rank}")
        return EXIT_OK
    text = tio.format_decomposition(dec, T.field)
    if args.output:
        _write(args.output, text)
        out.append(f"written {args.output}")
    out.append(text.rstrip("\n"))
    return EXIT_OK


def cmd_rank(args, out):
    T = _load_dense(args.tensor)
    _finite(T)
    out.append(f"rank {rank_over_Fq(T, _budget(args))}")
    return EXIT_OK


def cmd_srank(args, out):
    S = _load_sym(args.tensor)
    _finite(S)
    try:
        out.append(f"srank {srank_over_Fq(S, _budget(args))}")
    except NotWaringDecomposable as exc:
        out.append(f"srank none: {exc}")
    return EXIT_OK


def verify_bundle(bundle) -> tuple:
    """``(ok, message)`` after rebuilding every required system from the tensor."""
    T = bundle.tensor
    symmetric = isinstance(T, SymTensor)
    dense = sym_expand(T) if symmetric else T
    if bundle.method == "unfolding":
        best = max(unfolding_ranks(dense))
        if bundle.r < best:
            return True, f"unfolding rank {best} > {bundle.r}"
        return False, f"unfolding rank {best} does not exceed {bundle.r}"
    if bundle.method != "nullstellensatz":
        return False, f"unknown method {bundle.method!r}"
    build = sym_rank_tasks if symmetric else rank_tasks
    tasks = build(T, bundle.r, bundle.normalize)
    given = {label: (D, nvars, polys) for label, D, nvars, polys in bundle.certificates}
    for label, system in tasks:
        if label not in given:
            return False, f"missing certificate for {label}"
        D, nvars, polys = given[label]
        if nvars != system.nvars or len(polys) != len(system.gens):
            return False, f"certificate for {label} does not match the rebuilt system"
        cert = tio.load_certificate(system, label, D, polys)
        if not verify_certificate(cert):
            return False, f"certificate for {label} fails: sum g_i f_i != 1"
    return True, f"{len(tasks)} certificate(s) verified"


def cmd_verify_cert(args, out):
    ok, msg = verify_bundle(tio.parse_bundle(_read(args.bundle)))
    out.append(("VALID " if ok else "INVALID ") + msg)
    return EXIT_OK if ok else EXIT_ERROR


def cmd_verify_decomp(args, out):
    T = _load_dense(args.tensor)
    dec = tio.parse_decomposition(_read(args.decomposition), T.field, T.shape.d)
    if eval_decomposition(dec, T.shape, T.field) == T:
        out.append(f"VALID rank <= {dec.rank}")
        return EXIT_OK
    out.append("INVALID decomposition does not evaluate to the tensor")
    return EXIT_ERROR


def cmd_estimate(args, out):
    _need_rank(args)
    if args.shape:
        shape, symmetric = tuple(args.shape), args.symmetric
    elif args.tensor:
        T = tio.parse_tensor(_read(args.tensor))
        if isinstance(T, SymTensor):
            shape, symmetric = (T.n,) * T.d, True
        else:
            shape, symmetric = tuple(T.shape), args.symmetric
    else:
        raise UsageError("estimate needs a tensor file or --shape")
    if len(shape) < 2 or min(shape) < 1:
        raise UsageError("shape needs at least two positive dimensions")
    if symmetric and len(set(shape)) != 1:
        raise UsageError("a symmetric estimate needs a cubical shape")
    out.extend(complexity_estimate(shape, args.rank, symmetric=symmetric).lines())
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trc", description="Exact tensor rank certificates and finite-field search.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help, tensor=True):
        sp = sub.add_parser(name, help=help)
        if tensor:
            sp.add_argument("tensor", help="tensor file")
        sp.add_argument("--rank", type=int)
        sp.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
        sp.add_argument("--normalize", action="store_true")
        sp.add_argument("--budget", type=int, help="maximum candidate tuples to examine")
        sp.add_argument("--time-limit", type=float, help="seconds before the search gives up")
        sp.add_argument("--trace", action="store_true")
        sp.add_argument("--output", help="file to write results to")
        sp.set_defaults(func=func)
        return sp

    add("info", cmd_info, "shape, field, unfolding ranks and rank bounds")
    add("compress", cmd_compress, "core compression to the unfolding ranks")
    add("certify", cmd_certify, "try to certify rank > r").add_argument(
        "--witness", help="decomposition file proving rank <= r")
    add("certify-sym", cmd_certify_sym, "try to certify symmetric rank > r").add_argument(
        "--witness", help="Waring decomposition file proving srank <= r")
    add("search", cmd_search, "exhaustive search for a decomposition over GF(q)")
    add("rank", cmd_rank, "exact rank over GF(q)")
    add("srank", cmd_srank, "exact symmetric rank over GF(q)")
    vc = add("verify-cert", cmd_verify_cert, "re-check a certificate bundle", tensor=False)
    vc.add_argument("bundle", help="certificate bundle file")
    vd = add("verify-decomp", cmd_verify_decomp, "check a decomposition against a tensor")
    vd.add_argument("decomposition", help="decomposition file")
    est = add("estimate", cmd_estimate, "complexity report for the certificate route", tensor=False)
    est.add_argument("tensor", nargs="?", help="tensor file (or use --shape)")
    est.add_argument("--shape", type=int, nargs="+")
    est.add_argument("--symmetric", action="store_true")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    out = []
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        code = args.func(args, out)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=stderr)
        return EXIT_ERROR
    except BudgetExceeded as exc:
        print("\n".join(out + [f"budget-exceeded {exc}"]), file=stdout)
        print(f"error: BudgetExceeded: {exc}", file=stderr)
        return EXIT_INCONCLUSIVE
    except (TrcError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_ERROR
    if out:
        print("\n".join(out), file=stdout)
    return code


def main():
    sys.exit(run())
