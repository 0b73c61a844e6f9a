"""One-shot property suite over every module, deterministic by seed.

Each check is a small fuzz run of one module invariant at moderate sizes.
The result is a single ``Report`` whose values are the per-check verdicts
and the headline numbers behind them.
"""

from __future__ import annotations

import math

import numpy as np

from . import bilinear as bl
from . import core, equivalence, hahn_banach as hb, lp, operators, oracles
from .report import Report


def _rng_seeds(seed, count):
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2**31 - 1, count)]


def _check_core(seed, samples, extra_norms):
    out = {}
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((3, 3)) + 2 * np.eye(3)
    norms = [core.p_norm(p, 3) for p in (1, 1.5, 2, 3, math.inf)]
    norms += [core.zero_norm(list(B.T)), core.dual_normspec(core.zero_norm(list(B.T)))]
    norms += list(extra_norms)
    failures = []
    for i, nm in enumerate(norms):
        rep = core.check_norm_axioms(nm, samples=samples, seed=seed + i)
        out[f"axioms[{nm.label}]"] = rep.passed
        if not rep.passed:
            failures.append(f"{nm.label} violates {', '.join(rep.failed_axioms())}")
    for i, nm in enumerate(norms[:6]):
        ball = core.BallSpec(rng.standard_normal(3), float(rng.uniform(0.5, 3)), nm)
        geo = core.ball_geometry_check(ball, trials=samples, seed=seed + 100 + i)
        out[f"ball_geometry[{nm.label}]"] = geo.passed
        if not geo.passed:
            failures.append(f"ball geometry fails for {nm.label}")
    return out, failures


def _check_operators(seed, samples):
    out, failures = {}, []
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        m, n = rng.integers(1, 13, 2)
        A = rng.standard_normal((m, n))
        T = operators.LinearOperator(A, core.p_norm(2, n), core.p_norm(2, m))
        v = operators.operator_norm(T, seed=seed).value
        s = oracles.oracle_svd_sigma_max(A)
        worst = max(worst, abs(v - s) / max(s, 1e-300))
    out["opnorm_vs_svd_max_rel_err"] = worst
    out["opnorm_vs_svd"] = worst <= 1e-8
    exps = (1, 1.5, 2, 3, math.inf)
    cert_ok = agree_ok = True
    for k in range(8):
        p, q = exps[k % 5], exps[(3 * k + 1) % 5]
        A = rng.standard_normal((3, 4))
        T = operators.LinearOperator(A, core.p_norm(p, 4), core.p_norm(q, 3))
        res = operators.operator_norm(T, seed=seed)
        cert = operators.continuity_certificate(T, samples=samples, seed=seed + k, norm_result=res)
        cert_ok &= cert.certified
        agree_ok &= bool(res.variants.get("agree", True))
    out["continuity_certificates"] = cert_ok
    out["sup_variants_agree"] = agree_ok
    # subadditivity and homogeneity
    sub_ok = True
    for _ in range(5):
        A1, A2 = rng.standard_normal((2, 3, 3))
        nm = core.p_norm(float(rng.choice([1, 2, 3])), 3)
        n1, n2, n12 = (operators.operator_norm(operators.LinearOperator(A, nm, nm), seed=seed).value
                       for A in (A1, A2, A1 + A2))
        a = float(rng.uniform(-3, 3))
        na = operators.operator_norm(operators.LinearOperator(a * A1, nm, nm), seed=seed).value
        sub_ok &= n12 <= n1 + n2 + 1e-8 and abs(na - abs(a) * n1) <= 1e-8 * max(1, na)
    out["opnorm_seminorm_laws"] = bool(sub_ok)
    iso_ok = True
    for k in range(5):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        T = operators.LinearOperator(Q, core.p_norm(2, 4), core.p_norm(2, 4))
        P = np.eye(4)[rng.permutation(4)]
        p = [1, 3, math.inf][k % 3]
        TP = operators.LinearOperator(P, core.p_norm(p, 4), core.p_norm(p, 4))
        for U in (T, TP):
            r = operators.isometry_test(U, samples=min(samples, 500), seed=seed + k)
            iso_ok &= r.isometry and r.injective and abs(r.operator_norm - 1) <= 1e-8
    out["isometries"] = bool(iso_ok)
    for key in ("opnorm_vs_svd", "continuity_certificates", "sup_variants_agree",
                "opnorm_seminorm_laws", "isometries"):
        if not out[key]:
            failures.append(f"operators: {key} failed")
    return out, failures


def _check_equivalence(seed, samples):
    rng = np.random.default_rng(seed)
    ok_sandwich = ok_b = True
    for k in range(4):
        n = 2 + k % 3
        basis = list(rng.standard_normal((n, n)) + 1.5 * np.eye(n))
        nm = core.p_norm([1, 2, 3, math.inf][k], n)
        c = equivalence.equivalence_constants(basis, nm, seed=seed)
        ok_sandwich &= not c.sandwich_violations(samples=samples, seed=seed + k)
        ok_b &= c.b == sum(core.eval_norm(nm, b) for b in basis)
    out = {"equivalence_sandwich": bool(ok_sandwich), "equivalence_b_closed_form": bool(ok_b)}
    return out, [f"equivalence: {k} failed" for k, v in out.items() if not v]


def _check_lp(seed, samples):
    rng = np.random.default_rng(seed)
    holder_ok = mink_ok = sums_ok = True
    for t in range(samples // 10):
        p = [1, 1.5, 2, 3, math.inf][t % 5]
        q = core.conjugate_exponent(p)
        x = lp.finite_sequence(rng.standard_normal(int(rng.integers(1, 20))), p)
        y = lp.finite_sequence(rng.standard_normal(int(rng.integers(1, 20))), q)
        r = lp.holder_pairing(x, y)
        holder_ok &= r.holds and r.young_holds
        if not math.isinf(p):
            sums_ok &= abs(r.power_sums[0] - 1) <= 1e-10
        z = lp.finite_sequence(rng.standard_normal(x.prefix.size), p)
        mink_ok &= lp.minkowski_verify(x, z).holds
    wit_ok = True
    for q in (1.5, 2, 3):
        f = lp.DualFunctional(lp.finite_sequence(rng.standard_normal(64), q))
        w = lp.norming_witness(f, 64)
        wit_ok &= abs(lp.witness_ratio(f, w) - f.coeffs.prefix_norm) <= 1e-10 * f.coeffs.prefix_norm
    m = 200
    seqs = [lp.finite_sequence(1.0 / np.arange(1, k + 1), 2) for k in range(1, m + 1)]
    eps = [1 / math.sqrt(k) for k in range(1, m + 1)]
    lim = lp.cauchy_limit(seqs, eps)
    cauchy_ok = lim.verified and bool(np.all(lim.distances <= np.asarray(eps) + 1e-10))
    out = {"holder_and_young": bool(holder_ok), "minkowski": bool(mink_ok),
           "normalized_power_sums": bool(sums_ok), "norming_witness": bool(wit_ok),
           "cauchy_recovery": bool(cauchy_ok)}
    return out, [f"lp: {k} failed" for k, v in out.items() if not v]


def _check_hahn_banach(seed):
    rng = np.random.default_rng(seed)
    tol = 1e-6
    ext_ok = norming_ok = annih_ok = True
    for k in range(6):
        n = 2 + k % 3
        d = int(rng.integers(1, n))
        nm = core.p_norm([1, 2, 3, math.inf][k % 4], n)
        basis = list(rng.standard_normal((d, n)))
        f = hb.SubspaceFunctional(basis, list(rng.standard_normal(d)), nm)
        Nf = hb.functional_subspace_norm(f, tol, seed)
        F = hb.extend_functional(f, tol, seed)
        NF = hb.functional_subspace_norm(F, tol, seed)
        ext_ok &= F.values[:d] == f.values and Nf * (1 - 1e-12) <= NF <= Nf * (1 + n * tol)
        x = rng.standard_normal(n)
        G = hb.norming_functional(x, nm, tol, seed)
        norming_ok &= G(x) == core.eval_norm(nm, x) and abs(hb.functional_subspace_norm(G, tol, seed) - 1) <= 1e-6
        if d < n:
            H = hb.annihilating_functional(x, basis, nm, tol, seed)
            annih_ok &= H(x) == 1.0 and all(abs(H(b)) <= 1e-8 for b in basis)
    out = {"hb_extension_preserves_norm": bool(ext_ok), "norming_functionals": bool(norming_ok),
           "annihilating_functionals": bool(annih_ok)}
    return out, [f"hahn-banach: {k} failed" for k, v in out.items() if not v]


def _check_bilinear(seed, samples):
    rng = np.random.default_rng(seed)
    round_ok = curry_ok = elem_ok = crit_ok = True
    for k in range(4):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        p, q = [1, 2, 3, math.inf][k], [2, math.inf, 1.5, 1][k]
        phi = bl.BilinearForm(rng.standard_normal((m, n)), core.p_norm(p, m), core.p_norm(q, n))
        round_ok &= bl.uncurry(bl.curry(phi)).coeffs.tobytes() == phi.coeffs.tobytes()
        r = bl.bilinear_norm(phi, seed=seed, samples=min(samples, 2000))
        crit_ok &= bool(r.variants["criterion_c"])
        o = operators.operator_norm(bl.curry(phi), seed=seed).value
        curry_ok &= abs(r.value - o) <= 2e-8 * max(1.0, o)
        xp, yp = rng.standard_normal(m), rng.standard_normal(n)
        e = bl.elementary_tensor_form(xp, yp, phi.left_norm, phi.right_norm)
        want = bl.elementary_tensor_norm(xp, yp, phi.left_norm, phi.right_norm)
        elem_ok &= abs(bl.bilinear_norm(e, seed=seed).value - want) <= 1e-6 * max(1.0, want)
    A, B = list(range(1, 5)), ["a", "b", "c"]
    psi = {(a, b): int(rng.integers(-9, 10)) for a in A for b in B}
    rep = bl.verify_linearization(bl.tensor_linearize(psi, A, B), psi, random_pairs=50, seed=seed)
    demo = bl.non_uniform_continuity([1.0, 1e-2, 1e-4])
    nuc_ok = all(abs(x2 - x1) < d and abs(jump) > 1 for d, x1, x2, jump in demo)
    out = {"curry_round_trip": bool(round_ok), "curry_isometry": bool(curry_ok),
           "bilinear_criterion_c": bool(crit_ok), "elementary_tensor_norm": bool(elem_ok),
           "tensor_linearization": bool(rep.passed), "non_uniform_continuity_demo": bool(nuc_ok)}
    return out, [f"bilinear: {k} failed" for k, v in out.items() if not v]


def run_suite(seed=0, samples=2000, extra_norms=()):
    """Run every module's property checks; ``extra_norms`` are axiom-checked too."""
    s = _rng_seeds(seed, 6)
    values, notes = {}, []
    for part in (_check_core(s[0], samples, extra_norms), _check_operators(s[1], samples),
                 _check_equivalence(s[2], samples), _check_lp(s[3], samples),
                 _check_hahn_banach(s[4]), _check_bilinear(s[5], samples)):
        values.update(part[0])
        notes += part[1]
    passed = not notes
    return Report(kind="suite", passed=passed, values={"seed": seed, "samples": samples, **values},
                  notes=notes)
