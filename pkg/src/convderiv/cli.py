"""Command-line front end.

Subcommands: ``conv`` (convolution arithmetic), ``deriv`` (norms,
compactness, application, truncation, non-compactness witnesses),
``cheese`` (build/verify/demo the swiss-cheese construction), and
``bimodule`` (finite-dimensional checks, the rank-one construction, and
derivation transfer).  Exit codes: 0 on success with every certificate
passing, 1 when a certificate fails or cannot be produced, 2 on usage,
parse, or input-domain errors.

Rules for --phi/--mu are expressions in n.  Tails default to "closed
form"; when the rule is rational in n an exact certificate for the derived
coefficient sequence is computed symbolically (never sampled).  Explicit
--tail flags (zero:N | decay | none) override the analysis.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import bimodules, cheese, reports, rules
from .convolution import (
    CertificateViolationError,
    ClosedForm,
    Decay,
    L1Element,
    UNDECLARED,
    UndeclaredTailError,
    ZeroTail,
    convolve,
    l1_norm,
    tail_to_dict,
)
from .derivations import (
    Derivation,
    IndexOverflowError,
    NoAdmissibleIndexError,
    TailUnknownError,
    UnboundedDerivationError,
    WitnessVerificationError,
)


class _Outcome:
    def __init__(self, inputs: dict, result: dict, certificates: list,
                 csv: Optional[Tuple[List[str], list]] = None):
        self.inputs = inputs
        self.result = result
        self.certificates = certificates
        self.csv = csv


# ---------------------------------------------------------------------------
# flag helpers
# ---------------------------------------------------------------------------

def _tail_flag(text: str):
    if text == "decay":
        return text
    if text == "none":
        return text
    if text.startswith("zero:"):
        try:
            int(text.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad zero-tail index in {text!r}")
        return text
    raise argparse.ArgumentTypeError(
        f"tail must be zero:N, decay, or none (got {text!r})")


def _coeffs(text: str) -> L1Element:
    items = [item.strip() for item in text.split(",")]
    try:
        return L1Element([complex(item) for item in items if item])
    except ValueError as exc:
        raise ValueError(f"bad coefficient list {text!r}: {exc}")


def _tail_from_flag(flag: str, first_index: int):
    if flag == "none":
        return UNDECLARED
    if flag == "decay":
        return ClosedForm(Decay(start=first_index))
    return ZeroTail(int(flag.split(":", 1)[1]))


def _build_derivation(args) -> Tuple[Derivation, dict]:
    if (args.phi is None) == (args.mu is None):
        raise ValueError("exactly one of --phi or --mu is required")
    text = args.phi if args.phi is not None else args.mu
    expr = rules.parse_rule(text)
    scalar = rules.rule_callable(expr)
    profile = rules.rational_profile(expr)
    if args.phi is not None:
        mu_profile = profile.compose_shift(-1).times_index() \
            if profile is not None else None

        def mu_rule(n):
            return n * scalar(n - 1)
    else:
        mu_profile = profile
        mu_rule = scalar
    tail_flag = getattr(args, "tail", None)
    if tail_flag is not None:
        tail = _tail_from_flag(tail_flag, first_index=1)
        tail_source = "declared"
    elif mu_profile is not None:
        if mu_profile.degree_gap > 0:
            raise UnboundedDerivationError(
                "the coefficient sequence n*phi(t^(n-1)) diverges, so no "
                "bounded derivation matches this rule")
        cert = rules.certificate_for(mu_profile, min_start=1)
        tail = cert if isinstance(cert, ZeroTail) else ClosedForm(cert)
        tail_source = "exact rational analysis"
    else:
        tail = ClosedForm()
        tail_source = "default (closed form, no certificate)"
    deriv = Derivation.from_mu(mu_rule, tail=tail)
    inputs = {
        "rule": text,
        "rule_kind": "phi" if args.phi is not None else "mu",
        "tail": tail_to_dict(deriv.mu.tail),
        "tail_source": tail_source,
    }
    return deriv, inputs


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_conv(args) -> _Outcome:
    a, b = _coeffs(args.a), _coeffs(args.b)
    product = convolve(a, b)
    inputs = {"a": reports.complex_seq_to_json(a.coeffs),
              "b": reports.complex_seq_to_json(b.coeffs)}
    bound = l1_norm(a) * l1_norm(b)
    value = l1_norm(product)
    certs = [reports.certificate(
        "submultiplicative", value <= bound + 1e-12,
        product_norm=value, factor_bound=bound)]
    result = {"coefficients": reports.complex_seq_to_json(product.coeffs),
              "l1_norm": value}
    return _Outcome(inputs, result, certs)


def _cmd_deriv_norm(args) -> _Outcome:
    deriv, inputs = _build_derivation(args)
    inputs["depth"] = args.depth
    lower, exact = deriv.norm(args.depth)
    result = {"lower": lower, "exact": exact, "depth": args.depth}
    certs = []
    if exact is not None:
        certs.append(reports.certificate(
            "norm-exact", True, value=exact,
            note="declared tail certifies the supremum is attained in "
                 "the probe"))
    return _Outcome(inputs, result, certs)


def _cmd_deriv_classify(args) -> _Outcome:
    deriv, inputs = _build_derivation(args)
    inputs.update(depth=args.depth, tol=args.tol)
    verdict = deriv.classify_compact(tol=args.tol, probe_depth=args.depth)
    certs = [reports.certificate(
        "verdict-evidence", verdict.recheck(deriv),
        verdict=verdict.verdict, cited=list(verdict.cited_indices),
        decay_from=verdict.decay_from)]
    return _Outcome(inputs, verdict.to_dict(), certs)


def _cmd_deriv_apply(args) -> _Outcome:
    deriv, inputs = _build_derivation(args)
    f = _coeffs(args.f)
    inputs.update(f=reports.complex_seq_to_json(f.coeffs), depth=args.depth)
    image = deriv.apply(f)
    values = image.values(args.depth)
    lower, exact = deriv.norm(max(args.depth, 64))
    result = {"values": reports.complex_seq_to_json(values),
              "sup_probe": float(np.abs(values).max(initial=0.0))}
    certs = []
    if exact is not None:
        bound = exact * l1_norm(f) + 1e-12
        certs.append(reports.certificate(
            "image-bounded", result["sup_probe"] <= bound,
            sup_probe=result["sup_probe"], bound=bound))
    return _Outcome(inputs, result, certs)


def _cmd_deriv_truncate(args) -> _Outcome:
    deriv, inputs = _build_derivation(args)
    k = args.terms
    inputs.update(rank_cut=k, depth=args.depth)
    truncated, err = deriv.truncate(k)
    probe_to = max(args.depth, k + 1)
    tail_probe = np.abs(deriv.mu.bulk(np.arange(k + 1, probe_to + 1)))
    probe_sup = float(tail_probe.max(initial=0.0))
    certs = [reports.certificate(
        "truncation-error-dominates-probe", probe_sup <= err + 1e-12,
        err=err, probe_sup=probe_sup, probe_to=probe_to)]
    result = {"k": k, "error": err,
              "head": reports.complex_seq_to_json(deriv.mu.values(k))}
    return _Outcome(inputs, result, certs)


def _cmd_deriv_witness(args) -> _Outcome:
    deriv, inputs = _build_derivation(args)
    inputs.update(eps=args.eps, terms=args.terms, growth_constant=args.const)
    report = deriv.witness(args.eps, args.terms, growth_constant=args.const)
    certs = [reports.certificate(
        "witness-inequalities", report.recheck(deriv),
        separation=report.separation, epsilon=args.eps,
        pairwise_floor=args.eps / 4, diagonal_floor=args.eps / 3)]
    return _Outcome(inputs, report.to_dict(), certs)


def _cmd_cheese_build(args) -> _Outcome:
    X = cheese.build_cheese(args.nmax)
    inputs = {"nmax": args.nmax}
    margins = X.margins
    certs = [reports.certificate(
        "geometry", margins.all_positive,
        containment=margins.containment, disjointness=margins.disjointness,
        interval_gap=margins.interval_gap)]
    return _Outcome(inputs, X.to_dict(), certs)


def _cmd_cheese_verify(args) -> _Outcome:
    X = cheese.build_cheese(args.nmax)
    verification = cheese.verify_cheese(X, grid=args.grid)
    inputs = {"nmax": args.nmax, "grid": args.grid}
    certs = [
        reports.certificate("geometry", verification.geometry_ok,
                            containment=X.margins.containment,
                            disjointness=X.margins.disjointness,
                            interval_gap=X.margins.interval_gap),
        reports.certificate("per-term-dyadic-bound",
                            verification.per_term_ok,
                            margin=verification.per_term_margin),
        reports.certificate("derivative-bound-sum", verification.bound_ok,
                            max_certified=verification.max_certified,
                            threshold=verification.bound_threshold),
    ]
    xs = cheese.interval_grid(args.grid)
    sums, certified = X.bound_sum_grid(xs)
    csv = (["x", "sum", "certified_lt"],
           [[float(x), float(s), float(c)]
            for x, s, c in zip(xs, sums, certified)])
    return _Outcome(inputs, verification.to_dict(), certs, csv=csv)


def _cmd_cheese_demo(args) -> _Outcome:
    X = cheese.build_cheese(args.nmax)
    report = cheese.noncompact_report(X, grid=args.grid)
    inputs = {"nmax": args.nmax, "grid": args.grid}
    certs = [
        reports.certificate("unit-diagonal", report.diagonal_ok,
                            diag_error=report.diag_error,
                            tol=report.diag_tol),
        reports.certificate("pairwise-separation", report.separation_ok,
                            min_separation=report.min_separation,
                            floor=report.separation_floor),
    ]
    rows = [[n + 1, m + 1, float(report.matrix[n, m])]
            for n in range(report.matrix.shape[0])
            for m in range(report.matrix.shape[1])]
    return _Outcome(inputs, report.to_dict(), certs,
                    csv=(["n", "m", "M_nm"], rows))


def _load_algebra(name_or_path: str) -> bimodules.FiniteAlgebra:
    if name_or_path.startswith("@"):
        return bimodules.algebra_from_file(name_or_path[1:])
    return bimodules.algebra_catalog(name_or_path)


def _cmd_bimodule_check(args) -> _Outcome:
    A = _load_algebra(args.algebra)
    inputs = {"algebra": args.algebra, "dim": A.dim}
    c = A.structure
    assoc = float(np.abs(np.einsum("ijm,mkl->ijkl", c, c)
                         - np.einsum("jkm,iml->ijkl", c, c)).max(initial=0.0))
    E = A.self_bimodule()
    dual = E.dual()
    certs = [
        reports.certificate("commutativity", True, exact=True),
        reports.certificate("associativity", assoc <= 1e-12, defect=assoc),
        reports.certificate("self-bimodule-axioms", True,
                            symmetric=E.symmetric),
        reports.certificate("dual-module-symmetric", dual.symmetric,
                            symmetric=dual.symmetric),
    ]
    result = {"dim": A.dim,
              "square_span_dim": int(bimodules.square_span(A).shape[0])}
    return _Outcome(inputs, result, certs)


def _cmd_bimodule_rank1(args) -> _Outcome:
    A = _load_algebra(args.algebra)
    inputs = {"algebra": args.algebra, "dim": A.dim}
    span = bimodules.square_span(A)
    anchor = None
    eye = np.eye(A.dim, dtype=complex)
    for i in range(A.dim):
        candidate = eye[i]
        residual = candidate - bimodules._project_onto_rows(span, candidate)
        if np.linalg.norm(residual) > 1e-9:
            anchor = candidate
            break
    if anchor is None:
        raise ValueError("every basis vector lies in the product span; "
                         "no rank-one non-inner derivation exists here")
    lambda0, D = bimodules.rank_one_derivation(A, anchor)
    dual_of_A = A.self_bimodule().dual()
    defect = bimodules.derivation_defect(A, dual_of_A, D)
    anchor_value = complex(anchor @ D.matrix @ anchor)
    fit = bimodules.is_inner(A, dual_of_A, D)
    certs = [
        reports.certificate("rank-one", D.rank == 1, rank=D.rank),
        reports.certificate("derivation-identity", defect <= 1e-12,
                            defect=defect),
        reports.certificate("anchor-pairing",
                            abs(anchor_value - 1) <= 1e-12,
                            value=reports.complex_to_json(anchor_value)),
        reports.certificate("not-inner", not fit.solved,
                            inner_fit_residual=fit.residual),
    ]
    result = {
        "anchor": reports.complex_seq_to_json(anchor),
        "functional": reports.complex_seq_to_json(lambda0.matrix[0]),
        "matrix": reports.complex_matrix_to_json(D.matrix),
    }
    return _Outcome(inputs, result, certs)


def _cmd_bimodule_transfer(args) -> _Outcome:
    A = _load_algebra(args.algebra)
    if not bimodules._TRUNC_RE.match(args.algebra):
        raise ValueError("transfer demo needs a truncated polynomial "
                         "algebra (truncK) so d/dt supplies the derivation")
    E = A.self_bimodule()
    D = bimodules.derivative_map(A)
    a0, lam = bimodules.find_transfer_functional(A, E, D, seed=args.seed)
    composed = bimodules.transfer(D, lam, A, E)
    dual_of_A = E.dual()
    defect = bimodules.derivation_defect(A, dual_of_A, composed)
    anchor_value = complex(a0 @ composed.matrix @ a0)
    norm_D = bimodules.opnorm_l1_to_l1(D.matrix)
    norm_R = bimodules.opnorm_l1_to_sup(
        bimodules.dual_homomorphism(A, E, lam).matrix)
    norm_composed = bimodules.opnorm_l1_to_sup(composed.matrix)
    certs = [
        reports.certificate("derivation-identity", defect <= 1e-10,
                            defect=defect),
        reports.certificate("anchor-pairing",
                            abs(anchor_value - 1) <= 1e-12,
                            value=reports.complex_to_json(anchor_value)),
        reports.certificate("rank-monotone", composed.rank <= D.rank,
                            rank_before=D.rank, rank_after=composed.rank),
        reports.certificate("norm-product-bound",
                            norm_composed <= norm_R * norm_D + 1e-12,
                            norm_composed=norm_composed,
                            product=norm_R * norm_D),
    ]
    result = {
        "anchor": reports.complex_seq_to_json(a0),
        "functional": reports.complex_seq_to_json(lam),
        "matrix": reports.complex_matrix_to_json(composed.matrix),
        "rank": composed.rank,
    }
    return _Outcome({"algebra": args.algebra, "seed": args.seed},
                    result, certs)


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convderiv",
        description="derivations on the one-sided convolution algebra: "
                    "norms, compactness certificates, witnesses, bimodule "
                    "transfer, and the swiss-cheese counterexample")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--seed", type=int, default=42,
                        help="seed for any randomised search (default 42)")
    top = parser.add_subparsers(dest="group", required=True)

    conv = top.add_parser("conv", parents=[common],
                          help="convolve two coefficient lists")
    conv.add_argument("a", help="comma-separated coefficients")
    conv.add_argument("b", help="comma-separated coefficients")
    conv.set_defaults(handler=_cmd_conv)

    deriv = top.add_parser("deriv", help="derivation calculus")
    sub = deriv.add_subparsers(dest="command", required=True)

    def rule_flags(p, tol=False, depth_default=1000):
        p.add_argument("--phi", help="rule for the value of D at t")
        p.add_argument("--mu", help="rule for the coefficient sequence")
        p.add_argument("--tail", type=_tail_flag, default=None,
                       help="tail declaration: zero:N | decay | none")
        p.add_argument("--depth", type=int, default=depth_default)
        if tol:
            p.add_argument("--tol", type=float, default=1e-9)

    norm = sub.add_parser("norm", parents=[common])
    rule_flags(norm)
    norm.set_defaults(handler=_cmd_deriv_norm)

    classify = sub.add_parser("classify", parents=[common])
    rule_flags(classify, tol=True, depth_default=256)
    classify.set_defaults(handler=_cmd_deriv_classify)

    apply_p = sub.add_parser("apply", parents=[common])
    rule_flags(apply_p, depth_default=64)
    apply_p.add_argument("--f", required=True,
                         help="comma-separated coefficients of the argument")
    apply_p.set_defaults(handler=_cmd_deriv_apply)

    truncate = sub.add_parser("truncate", parents=[common])
    rule_flags(truncate, depth_default=256)
    truncate.add_argument("--terms", type=int, required=True,
                          help="truncation index k")
    truncate.set_defaults(handler=_cmd_deriv_truncate)

    witness = sub.add_parser("witness", parents=[common])
    rule_flags(witness, depth_default=64)
    witness.add_argument("--eps", type=float, required=True)
    witness.add_argument("--terms", type=int, required=True)
    witness.add_argument("--const", type=float, default=1000.0,
                         help="growth constant between witness indices")
    witness.set_defaults(handler=_cmd_deriv_witness)

    cheese_p = top.add_parser("cheese", help="swiss-cheese construction")
    csub = cheese_p.add_subparsers(dest="command", required=True)
    for name, handler, needs_grid in (("build", _cmd_cheese_build, False),
                                      ("verify", _cmd_cheese_verify, True),
                                      ("demo", _cmd_cheese_demo, True)):
        p = csub.add_parser(name, parents=[common])
        p.add_argument("--nmax", type=int, default=12)
        if needs_grid:
            p.add_argument("--grid", type=int, default=2001)
            p.add_argument("--csv", help="write the grid table here")
        p.set_defaults(handler=handler)

    bim = top.add_parser("bimodule", help="finite-dimensional instances")
    bsub = bim.add_subparsers(dest="command", required=True)
    for name, handler in (("check", _cmd_bimodule_check),
                          ("rank1", _cmd_bimodule_rank1),
                          ("transfer", _cmd_bimodule_transfer)):
        p = bsub.add_parser(name, parents=[common])
        p.add_argument("--algebra", required=True,
                       help="catalog name (zero2, nil1, truncK) or @file.json")
        p.set_defaults(handler=handler)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 2
    try:
        outcome = args.handler(args)
    except (rules.RuleSyntaxError, rules.RuleEvaluationError,
            UnboundedDerivationError, TailUnknownError,
            UndeclaredTailError, cheese.OnBoundaryError,
            cheese.PoleInXError, cheese.ConstructionFailedError,
            ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CertificateViolationError, WitnessVerificationError,
            NoAdmissibleIndexError, IndexOverflowError) as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    report = reports.build_report(argv, outcome.inputs, outcome.result,
                                  outcome.certificates, seed=args.seed)
    all_passed = all(c["passed"] for c in outcome.certificates)
    for cert in outcome.certificates:
        status = "PASS" if cert["passed"] else "FAIL"
        print(f"certificate {cert['name']}: {status}")
    if args.out:
        reports.write_report(report, args.out)
        print(f"report written to {args.out}")
    else:
        print(reports.render_report(report), end="")
    if outcome.csv is not None and getattr(args, "csv", None):
        header, rows = outcome.csv
        reports.write_csv(args.csv, header, rows)
        print(f"table written to {args.csv}")
    return 0 if all_passed else 1


def revalidate_report(report: dict) -> bool:
    """Re-run a report's command from its serialized inputs and confirm the
    result payload and every certificate verdict reproduce."""
    argv = [arg for arg in report["command"]]
    cleaned = []
    skip = False
    for arg in argv:
        if skip:
            skip = False
            continue
        if arg in ("--out", "--csv"):
            skip = True
            continue
        cleaned.append(arg)
    parser = _build_parser()
    args = parser.parse_args(cleaned)
    outcome = args.handler(args)
    fresh = reports.build_report(cleaned, outcome.inputs, outcome.result,
                                 outcome.certificates, seed=args.seed)
    return fresh["result"] == report["result"] and [
        (c["name"], c["passed"]) for c in fresh["certificates"]] == [
        (c["name"], c["passed"]) for c in report["certificates"]]


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
