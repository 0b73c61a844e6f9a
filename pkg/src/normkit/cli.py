"""``normkit`` command line: JSON in, Report out.

Exit codes: 0 pass, 1 mathematical failure, 2 usage or parse error.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bilinear as bl
from . import core, equivalence, hahn_banach as hb, lp, operators
from .errors import MathematicalFailure, UsageError
from .report import Report, load_json


def _norm(data, dim=None):
    if not isinstance(data, dict):
        raise UsageError("norm must be a JSON object")
    if dim is not None and "dim" not in data and data.get("kind") != "zero":
        data = {**data, "dim": dim}
    elif dim is not None and data.get("kind") == "zero" and "basis" not in data and "dim" not in data:
        data = {**data, "dim": dim}
    return core.norm_from_json(data)


def _vec(data, what):
    if data is None:
        raise UsageError(f"missing field '{what}'")
    return core.vector_from_json(data)


def _field(data, key):
    if not isinstance(data, dict) or key not in data:
        raise UsageError(f"missing field '{key}'")
    return data[key]


def _matrix(rows):
    return operators._matrix_from_json(rows)


# ---------------------------------------------------------------------------
# subcommands; each takes (data, args) and returns a Report

def cmd_norm(data, args):
    x = _vec(_field(data, "x"), "x")
    nm = _norm(_field(data, "norm"), x.size)
    return Report("norm", True, values={"value": core.eval_norm(nm, x), "norm": nm.label})


def cmd_axioms(data, args):
    spec = data["norm"] if isinstance(data, dict) and "norm" in data else data
    complex_ = bool(data.get("complex", False)) if isinstance(data, dict) else False
    nm = _norm(spec)
    rep = core.check_norm_axioms(nm, samples=args.samples, seed=args.seed, complex_=complex_)
    wit = {}
    for ax, bad in rep.counterexamples.items():
        if bad:
            ex = bad[0]
            if ax == "triangle":
                wit[f"{ax}_x"], wit[f"{ax}_y"] = ex
            elif ax == "homogeneity":
                wit[f"{ax}_x"] = ex[1]
            else:
                wit[ax] = ex
    notes = [f"{ax} fails on {len(rep.counterexamples[ax])}+ samples" for ax in rep.failed_axioms()]
    return Report("axioms", rep.passed, values={"norm": rep.norm, "samples": rep.samples},
                  witnesses=wit, notes=notes)


def cmd_opnorm(data, args):
    T = operators.operator_from_json(data)
    res = operators.operator_norm(T, tol=args.tol, seed=args.seed)
    cert = operators.continuity_certificate(T, samples=args.samples, seed=args.seed, tol=args.tol,
                                            norm_result=res)
    variants = {k: v for k, v in res.variants.items() if k != "agree"}
    values = {"value": res.value, "method": res.method, "certified_lower": res.certified_lower,
              "upper_bound": res.upper_bound, "certified": res.certified,
              "variants": variants, "variants_agree": res.variants.get("agree", True),
              "violations": len(cert.violations), "samples": cert.samples}
    passed = cert.certified and bool(res.variants.get("agree", True))
    wit = {"witness": res.witness}
    if cert.violations:
        wit["violation"] = cert.violations[0]
    notes = list(res.notes) + ([] if passed else ["bound check or sup-variant agreement failed"])
    return Report("opnorm", passed, values=values, witnesses=wit, notes=notes)


def cmd_isometry(data, args):
    T = operators.operator_from_json(data)
    r = operators.isometry_test(T, samples=args.samples, seed=args.seed, tol=args.tol)
    values = {"isometry": r.isometry, "norm_preserved": r.norm_preserved,
              "distances_preserved": r.distances_preserved, "injective": r.injective,
              "rank": r.rank, "operator_norm": r.operator_norm, "max_defect": r.max_defect}
    wit = {} if r.counterexample is None else {"counterexample": r.counterexample}
    notes = [] if r.isometry else ["norm or distance not preserved at the counterexample"]
    return Report("isometry", r.isometry, values=values, witnesses=wit, notes=notes)


def cmd_equiv(data, args):
    basis = [_vec(b, "basis") for b in _field(data, "basis")]
    nm = _norm(_field(data, "norm"), len(basis))
    c = equivalence.equivalence_constants(basis, nm, tol=args.tol, seed=args.seed)
    bad = c.sandwich_violations(samples=args.samples, seed=args.seed)
    values = {"a": c.a, "b": c.b, "basis_norms": c.basis_norms, "method_a": c.method_a,
              "violations": len(bad)}
    wit = {"a_witness": c.a_witness}
    if bad:
        wit["violation"] = bad[0]
    return Report("equiv", not bad, values=values, witnesses=wit,
                  notes=[] if not bad else ["sandwich violated on a sample"])


def _seq(data):
    if not isinstance(data, dict):
        raise UsageError("sequence must be a JSON object")
    return lp.sequence_from_json(data)


def cmd_lp(data, args):
    x = _seq(data)
    lo, hi = lp.lp_norm(x)
    return Report("lp", True, values={"p": x.p, "lower": lo, "upper": hi, "length": len(x),
                                      "tail_bound": x.tail_bound, "generator": x.generator_tag})


def cmd_holder(data, args):
    x, y = _seq(_field(data, "x")), _seq(_field(data, "y"))
    r = lp.holder_pairing(x, y)
    values = {"pairing_lower": r.pairing[0], "pairing_upper": r.pairing[1], "bound": r.bound,
              "slack": r.slack, "power_sums": list(r.power_sums), "young_holds": r.young_holds,
              "extension_pair": r.extension}
    ok = r.holds and r.young_holds
    notes = ["p=1, q=inf pairing lies outside the open-interval dual theorem"] if r.extension else []
    if not ok:
        notes.append("Hölder or Young bound violated")
    return Report("holder", ok, values=values,
                  witnesses={"normalized_x": r.normalized_x, "normalized_y": r.normalized_y}, notes=notes)


def cmd_minkowski(data, args):
    x, y = _seq(_field(data, "x")), _seq(_field(data, "y"))
    r = lp.minkowski_verify(x, y)
    return Report("minkowski", r.holds,
                  values={"lhs_lower": r.lhs[0], "lhs_upper": r.lhs[1], "rhs": r.rhs, "slack": r.slack},
                  notes=[] if r.holds else ["triangle inequality violated"])


def cmd_dual(data, args):
    f = lp.DualFunctional(_seq(_field(data, "f")))
    m = int(data.get("m", len(f.coeffs)))
    r = lp.dual_norm(f, m=m, samples=min(args.samples, 10_000), seed=args.seed)
    w = lp.norming_witness(f, m)
    ok = r.lower <= r.upper * (1 + 1e-12)
    values = {"lower": r.lower, "upper": r.upper, "gap": r.gap, "witness_ratio": r.witness_ratio,
              "sampled_lower": r.sampled_lower, "truncated_norm": r.truncated_norm,
              "tail_contribution": r.tail_contribution, "q": f.q}
    return Report("dual", ok, values=values, witnesses={"norming_witness": w.entries},
                  notes=[] if ok else ["lower bound exceeds upper bound"])


def cmd_cauchy(data, args):
    if "family" in data:
        if data["family"] != "harmonic":
            raise UsageError(f"unknown family {data['family']!r}")
        m = int(data.get("m", 1000))
        seqs = [lp.finite_sequence(1.0 / np.arange(1, k + 1), 2) for k in range(1, m + 1)]
        eps = [1 / math.sqrt(k) for k in range(1, m + 1)]
    else:
        seqs = [_seq(s) for s in _field(data, "sequences")]
        eps = _field(data, "eps")
    r = lp.cauchy_limit(seqs, eps, tol=min(args.tol, 1e-10))
    values = {"terms": len(seqs), "verified": r.verified, "limit_error_bound": r.limit_error_bound,
              "max_distance_over_bound": float(np.max(r.distances - r.bounds))}
    return Report("cauchy", r.verified, values=values, witnesses={"limit": r.limit.prefix},
                  notes=r.notes + ([] if r.verified else ["an iterate is farther than its bound"]))


def cmd_hb_extend(data, args):
    basis = [_vec(b, "basis") for b in _field(data, "basis")]
    nm = _norm(_field(data, "norm"), basis[0].size if basis else None)
    f = hb.SubspaceFunctional(basis, list(_field(data, "values")), nm)
    choice = data.get("choice", "mid")
    Nf = hb.functional_subspace_norm(f, args.tol, args.seed)
    if "x0" in data:
        F, step = hb.one_step_extension(f, _vec(data["x0"], "x0"), args.tol, args.seed, choice)
        steps = [step]
    else:
        F = hb.extend_functional(f, args.tol, args.seed, choice)
        steps = F.steps
    NF = hb.functional_subspace_norm(F, args.tol, args.seed)
    restrict = all(F(b) == v for b, v in zip(f.subspace_basis, f.values))
    ok = restrict and all(s.certified for s in steps) and NF <= Nf * (1 + F.ambient_dim * args.tol)
    values = {"norm_f": Nf, "norm_F": NF, "ratio": NF / Nf if Nf else 1.0, "restriction_exact": restrict,
              "steps": [{"a": s.a, "b": s.b, "c": s.c, "certified": s.certified} for s in steps]}
    wit = {"coefficients": F.coefficients()} if F.dim == F.ambient_dim else {"values": np.array(F.values)}
    return Report("hb-extend", ok, values=values, witnesses=wit,
                  notes=[] if ok else ["norm grew beyond tolerance or restriction changed"])


def cmd_norming(data, args):
    x = _vec(_field(data, "x"), "x")
    nm = _norm(_field(data, "norm"), x.size)
    F = hb.norming_functional(x, nm, args.tol, args.seed)
    NF = hb.functional_subspace_norm(F, args.tol, args.seed)
    ok = F(x) == core.eval_norm(nm, x) and abs(NF - 1) <= max(1e-6, args.tol)
    return Report("norming", ok, values={"pairing": F(x), "norm_x": core.eval_norm(nm, x), "norm_functional": NF},
                  witnesses={"coefficients": F.coefficients()},
                  notes=[] if ok else ["functional norm differs from 1"])


def cmd_annihilate(data, args):
    x = _vec(_field(data, "x"), "x")
    basis = [_vec(b, "basis") for b in _field(data, "basis")]
    nm = _norm(_field(data, "norm"), x.size)
    F = hb.annihilating_functional(x, basis, nm, args.tol, args.seed)
    u = F.coefficients()
    on_F = max((abs(float(u @ b)) for b in basis), default=0.0)
    NF = hb.functional_subspace_norm(F, args.tol, args.seed)
    ok = F(x) == 1.0 and on_F <= 1e-8 and NF <= (1 + args.tol) / F.distance + 1e-12
    return Report("annihilate", ok,
                  values={"value_at_x": F(x), "max_on_F": on_F, "distance": F.distance,
                          "norm_functional": NF, "norm_bound": 1 / F.distance},
                  witnesses={"coefficients": u},
                  notes=[] if ok else ["annihilator constraints not met"])


def cmd_bilinear(data, args):
    C = _matrix(_field(data, "coeffs"))
    m, n = C.shape
    phi = bl.BilinearForm(C, _norm(data.get("left", {"kind": "p", "p": 2}), m),
                          _norm(data.get("right", {"kind": "p", "p": 2}), n))
    r = bl.bilinear_norm(phi, tol=args.tol, seed=args.seed, samples=min(args.samples, 10_000))
    L = bl.curry(phi)
    o = operators.operator_norm(L, tol=args.tol, seed=args.seed).value
    round_trip = bl.uncurry(L).coeffs.tobytes() == phi.coeffs.tobytes()
    agree = abs(o - r.value) <= 2 * args.tol * max(1.0, o)
    ok = bool(r.variants["criterion_c"]) and round_trip and agree
    x, y = r.variants["witness_pair"]
    return Report("bilinear", ok,
                  values={"value": r.value, "method": r.method, "certified_lower": r.certified_lower,
                          "curried_operator_norm": o, "curry_round_trip": round_trip,
                          "criterion_c": r.variants["criterion_c"]},
                  witnesses={"x": x, "y": y}, notes=r.notes + ([] if ok else ["curry norms disagree"]))


def cmd_tensor(data, args):
    if "psi" in data:
        psi, A, B = bl.psi_from_json(data)
        T = bl.tensor_linearize(psi, A, B)
        rep = bl.verify_linearization(T, psi, random_pairs=100, seed=args.seed)
        notes = [] if rep.passed else [f"{len(rep.failures)} factorization failures"]
        return Report("tensor", rep.passed,
                      values={"basis_pairs": rep.basis_pairs_checked, "basis_exact": rep.basis_exact,
                              "random_pairs": rep.random_pairs_checked, "max_error": rep.max_error,
                              "exact_arithmetic": rep.exact_arithmetic, "unique": rep.unique},
                      notes=notes or ["factorization T(Psi0(f, g)) = psi(f, g) verified"])
    f = bl.FiniteSupportFunction.from_json(_field(data, "f"))
    g = bl.FiniteSupportFunction.from_json(_field(data, "g"))
    h = bl.tensor_embed(f, g)
    return Report("tensor", True, values={"embedding": h.to_json()["support"], "support_size": len(h)})


def cmd_suite(data, args):
    from .suite import run_suite

    extra = []
    if data is not None:
        items = data if isinstance(data, list) else [data]
        extra = [_norm(d.get("norm", d) if isinstance(d, dict) else d) for d in items]
    return run_suite(seed=args.seed, samples=min(args.samples, 2000), extra_norms=extra)


COMMANDS = {
    "norm": (cmd_norm, "evaluate a norm: {\"norm\", \"x\"}"),
    "axioms": (cmd_axioms, "fuzz the norm axioms of a NormSpec"),
    "opnorm": (cmd_opnorm, "operator norm with bound certificate"),
    "isometry": (cmd_isometry, "sampled isometry test"),
    "equiv": (cmd_equiv, "equivalence constants against the basis-zero norm"),
    "lp": (cmd_lp, "l^p norm interval of a truncated sequence"),
    "holder": (cmd_holder, "Hölder pairing certificate: {\"x\", \"y\"}"),
    "minkowski": (cmd_minkowski, "Minkowski certificate: {\"x\", \"y\"}"),
    "dual": (cmd_dual, "dual norm of phi_f: {\"f\", \"m\"}"),
    "cauchy": (cmd_cauchy, "l^2 Cauchy limit: {\"sequences\", \"eps\"} or {\"family\": \"harmonic\", \"m\"}"),
    "hb-extend": (cmd_hb_extend, "Hahn-Banach extension: {\"basis\", \"values\", \"norm\"[, \"x0\"]}"),
    "norming": (cmd_norming, "norming functional: {\"x\", \"norm\"}"),
    "annihilate": (cmd_annihilate, "annihilating functional: {\"x\", \"basis\", \"norm\"}"),
    "bilinear": (cmd_bilinear, "bilinear form norm: {\"coeffs\", \"left\", \"right\"}"),
    "tensor": (cmd_tensor, "tensor linearization {\"A\", \"B\", \"psi\"} or embedding {\"f\", \"g\"}"),
    "suite": (cmd_suite, "run the property suite (optional extra norm fixture)"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="normkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("input", nargs="?" if name == "suite" else None,
                       help="JSON file path or inline JSON")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--samples", type=int, default=10_000)
        p.add_argument("--json", action="store_true", help="emit the report as JSON")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.tol > 0:
        parser.error("--tol must be positive")
    if args.samples < 1:
        parser.error("--samples must be >= 1")
    fn = COMMANDS[args.command][0]
    try:
        data = load_json(args.input) if args.input is not None else None
        if data is None and args.command != "suite":
            raise UsageError("input required")
        report = fn(data, args)
    except UsageError as exc:
        print(f"normkit {args.command}: {exc}", file=sys.stderr)
        return 2
    except MathematicalFailure as exc:
        report = Report(args.command, False, values={"error": type(exc).__name__}, notes=[str(exc)])
    except (KeyError, TypeError, ValueError) as exc:
        print(f"normkit {args.command}: malformed input: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if args.json else report.to_text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
