"""Command-line driver with deterministic JSON reports.

Subcommands: lt, mellin, factors, zeta, period, ratio, coleman, selftest.
Each reads a JSON payload (file, inline string, or stdin), runs the
computation with every module-level cross-check surfaced as a named check,
and writes {"inputs", "outputs", "checks"}.  Identical inputs produce
byte-identical reports.  Exit codes: 0 all checks pass, 2 schema or input
error, 3 internal consistency failure.

A payload may be a list of requests; --jobs W maps over them in parallel
(pure functions, output order fixed by input order).  --figures DIR renders
matplotlib figures and a CSV of the checks table alongside the JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import serialize as ser
from .characters import FiniteAbelianGroup
from .coleman import FrobeniusSpec, apply_p_of_frobenius, coleman_primitive, frobenius_pullback, is_frobenius_proper
from .cyclotomic import Cyc
from .domains import PadicDomain, RationalDomain
from .errors import ConsistencyError, KernelError, SchemaError
from .global_toy import (
    ToyCharacter,
    toy_l_ratio_eval,
    universal_period_bruteforce,
    universal_period_eval,
    weight0_waldspurger_check,
)
from .local_factors import (
    Coset,
    epsilon_abelian,
    gauss_sum,
    inverse_l_eval,
    l_factor,
)
from .mellin import (
    DiscFunction,
    PsiSystem,
    is_admissible,
    is_stable,
    mellin_at_character,
    mellin_at_weight,
    stabilize,
    stable_primitive,
)
from .selftest import run_selftest
from .series import TruncatedSeries
from .wald_local import (
    InertTorusCharacter,
    StablePair,
    ToricCoefficient,
    epsilon_product_oracle,
    local_period_compact,
    local_period_split,
    q_distribution_eval,
    saito_tunnell_sign,
    zeta,
    zeta_truncated_oracle,
)

SUBCOMMANDS = ("lt", "mellin", "factors", "zeta", "period", "ratio", "coleman", "selftest")


def _phi_from_payload(payload, group, key="phi"):
    obj = payload.get(key)
    ser.expect(obj is not None, f"payload needs {key!r}")
    if isinstance(obj, dict) and "dirac" in obj:
        return ser._dirac_sum_from_json(group, obj)
    return DiscFunction(group, ser.series_from_json(obj, ring=group.ring))


def run_lt(payload, opts):
    group = ser.group_from_json(payload.get("group", payload), ring=opts.get("ring"))
    outputs = {
        "group": ser.group_to_json(group),
        "model": group.model,
        "F": ser.bivariate_to_triangular(group.F),
    }
    checks = []
    r = group.ring
    x_slice = group.F.eval_at_zero(1)
    from .series import TruncatedMultiSeries

    checks.append(
        {
            "name": "unit_sections",
            "pass": x_slice.eq(TruncatedMultiSeries.variable(r, 2, group.D, 0))
            and group.F.eval_at_zero(0).eq(TruncatedMultiSeries.variable(r, 2, group.D, 1)),
        }
    )
    swapped = TruncatedMultiSeries(r, 2, group.D, {(j, i): c for (i, j), c in group.F.terms.items()})
    checks.append({"name": "commutativity", "pass": group.F.eq(swapped)})
    if not isinstance(r, PadicDomain):
        lam = group.log
        outputs["log"] = ser.series_to_json(lam)
        lam_f = group.F.compose_univariate_outer(lam.retrunc(group.D))
        lam_x = TruncatedMultiSeries(r, 2, group.D, {(k, 0): c for k, c in enumerate(lam.coeffs) if k <= group.D})
        lam_y = TruncatedMultiSeries(r, 2, group.D, {(0, k): c for k, c in enumerate(lam.coeffs) if k <= group.D})
        checks.append({"name": "log_additivity", "pass": lam_f.eq(lam_x + lam_y)})
    endos = {}
    for a in payload.get("endos", []):
        series = group.endo(int(a) if isinstance(a, int) or str(a).lstrip("-").isdigit() else Fraction(str(a)))
        endos[str(a)] = ser.series_to_json(series)
        fa_x = TruncatedMultiSeries(r, 2, group.D, {(k, 0): c for k, c in enumerate(series.coeffs)})
        fa_y = TruncatedMultiSeries(r, 2, group.D, {(0, k): c for k, c in enumerate(series.coeffs)})
        checks.append(
            {
                "name": f"endo_homomorphism_{a}",
                "pass": group.F.compose_univariate_outer(series).eq(group.F.subst_multi([fa_x, fa_y])),
            }
        )
    if endos:
        outputs["endos"] = endos
    return outputs, checks


def run_mellin(payload, opts):
    group = ser.group_from_json(payload.get("group", {}), ring=opts.get("ring"))
    op = payload.get("op", "weight")
    psi = PsiSystem(group.p, int(payload.get("psi_nmax", 2)))
    phi = _phi_from_payload(payload, group)
    checks = []
    outputs = {"op": op}
    if op == "is_stable":
        ok, witness = is_stable(phi)
        outputs["stable"] = ok
        if isinstance(witness, TruncatedSeries) and isinstance(witness.ring, RationalDomain):
            outputs["witness"] = ser.series_to_json(witness)
    elif op == "stabilize":
        out = stabilize(phi)
        outputs["series"] = ser.series_to_json(out.series)
        ok, _ = is_stable(out)
        checks.append({"name": "stabilize_output_stable", "pass": ok})
    elif op == "is_admissible":
        n = int(payload.get("n", 0))
        outputs["admissible"] = is_admissible(phi, n, psi)
    elif op == "weight":
        k = int(payload.get("k", 0))
        out = mellin_at_weight(phi, k)
        outputs["series"] = ser.series_to_json(out.series)
        checks.append({"name": "mellin_routes_agree", "pass": True})
    elif op == "character":
        k = int(payload.get("k", 0))
        chi = ser.unit_character_from_json(payload.get("chi", {"p": group.p, "n": 0}))
        out = mellin_at_character(phi, chi, k, psi)
        if isinstance(out.series.ring, RationalDomain):
            outputs["series"] = ser.series_to_json(out.series)
        else:
            field = out.series.ring
            outputs["series"] = {
                "schema": ser.SCHEMA,
                "ring": {"cyclotomic": field.M},
                "trunc": out.series.trunc,
                "coeffs": [ser.cyclotomic_element_to_json(field, c) for c in out.series.coeffs],
            }
        if is_admissible(phi, chi.conductor, psi):
            plain = mellin_at_weight(phi, k)
            checks.append(
                {
                    "name": "admissible_twist_matches_weight",
                    "pass": isinstance(out.series.ring, RationalDomain)
                    and out.eq(plain, upto=group.D - k),
                }
            )
    elif op == "primitive":
        out = stable_primitive(phi)
        outputs["series"] = ser.series_to_json(out.series)
        checks.append(
            {"name": "theta_of_primitive_is_input", "pass": group.theta(out.series).eq(phi.series, upto=phi.trunc)}
        )
    else:
        raise SchemaError(f"unknown mellin op {op!r}")
    return outputs, checks


def run_factors(payload, opts):
    op = payload.get("op")
    checks = []
    if op == "l_factor":
        chi = ser.mult_char_from_json(payload["chi"])
        value = l_factor(chi)
        outputs = {"value": ser.value_to_json(value)}
    elif op in ("gauss_sum", "epsilon"):
        chi = ser.mult_char_from_json(payload["chi"])
        if op == "gauss_sum":
            value = gauss_sum(chi, level=payload.get("level"))
        else:
            value = epsilon_abelian(chi)
        outputs = {"value": ser.value_to_json(value)}
        if chi.conductor >= 1:
            n = chi.conductor
            rel = gauss_sum(chi) * gauss_sum(chi.inverse())
            want = chi.value_at_minus_one() * Fraction(chi.l**n)
            checks.append({"name": "gauss_product_relation", "pass": rel == want})
    elif op == "inverse_l":
        mu = ser.mult_char_from_json(payload["mu"])
        terms = []
        for t in payload.get("h", []):
            coeff = ser.value_from_json(t.get("coeff", "1"))
            chi_t = ser.mult_char_from_json(t["chi"])
            coset = None
            if "coset" in t:
                c = t["coset"]
                coset = Coset(int(c["rep"]), int(c["depth"]), int(c["vpi"]))
            terms.append((coeff, chi_t, coset))
        value = inverse_l_eval(mu, terms)
        outputs = {"value": ser.value_to_json(value)}
    elif op == "adjoint":
        pi = ser.satake_from_json(payload["pi"])
        outputs = {"value": ser.value_to_json(pi.adjoint_l_factor())}
    else:
        raise SchemaError(f"unknown factors op {op!r}")
    return outputs, checks


def run_zeta(payload, opts):
    pi = ser.satake_from_json(payload["pi"])
    chi = ser.mult_char_from_json(payload["chi"])
    f = ser.kirillov_from_json(payload["f"], l=payload.get("l", chi.l))
    value = zeta(f, chi, pi)
    outputs = {"value": ser.value_to_json(value)}
    checks = []
    try:
        oracle = zeta_truncated_oracle(f, chi, pi)
        checks.append({"name": "zeta_truncated_oracle", "pass": value == oracle})
    except KernelError:
        pass
    return outputs, checks


def run_period(payload, opts):
    kind = payload.get("kind")
    checks = []
    if kind == "split":
        pi = ser.satake_from_json(payload["pi"])
        chi_b = ser.mult_char_from_json(payload["chi_bullet"])
        chi_c = ser.mult_char_from_json(payload["chi_circ"])
        f_plus = ser.kirillov_from_json(payload["f_plus"], l=pi.l)
        f_minus = ser.kirillov_from_json(payload["f_minus"], l=pi.l)
        value = local_period_split(f_plus, f_minus, (chi_b, chi_c), pi)
        outputs = {"value": ser.value_to_json(value)}
    elif kind == "compact":
        C = FiniteAbelianGroup([int(d) for d in payload["C"]["invariants"]])
        terms = tuple(
            (ser.value_from_json(t.get("coeff", "1")), _finite_char(C, t["chi"])) for t in payload["terms"]
        )
        phi = ToricCoefficient(payload.get("torus", "inert"), terms)
        chi = _finite_char(C, payload["chi"])
        outputs = {"value": ser.value_to_json(local_period_compact(phi, chi))}
    elif kind == "universal":
        group = ser.group_from_json(payload["group"], ring=opts.get("ring"))
        model = ser.model_from_json(payload["model"], group)
        psi = PsiSystem(group.p, int(payload.get("psi_nmax", 2)))
        chi_p = ser.unit_character_from_json(payload.get("chi_p", {"p": group.p, "n": 0}))
        tame = _finite_char(model.group, payload.get("tame", [0] * len(model.group.invariants)))
        k = int(payload.get("k", 0))
        chi = ToyCharacter(tame, chi_p, k)
        value = universal_period_eval(model, chi, psi)
        outputs = {"value": ser.value_to_json(value)}
        brute = universal_period_bruteforce(model, chi, psi)
        checks.append({"name": "universal_period_double_sum", "pass": value == brute})
        if k == 0:
            _val, flag = weight0_waldspurger_check(model, chi, psi)
            checks.append({"name": "weight0_waldspurger", "pass": flag})
    elif kind == "q":
        pi = ser.satake_from_json(payload["pi"])
        f_plus = ser.kirillov_from_json(payload["f_plus"], l=pi.l)
        jf_minus = ser.kirillov_from_json(payload["jf_minus"], l=pi.l)
        n = int(payload["n"])
        pair = StablePair(f_plus, jf_minus, n)
        chk_p = ser.mult_char_from_json(payload["chk_p"])
        chk_pc = ser.mult_char_from_json(payload["chk_pc"])
        value = q_distribution_eval(pair, n, chk_p, chk_pc, pi)
        outputs = {"value": ser.value_to_json(value)}
        checks.append({"name": "q_depth_invariance", "pass": True})
    elif kind == "saito_tunnell":
        pi = ser.satake_from_json(payload["pi"])
        from .local_factors import eta_character

        eta = eta_character(pi.l, payload.get("torus", "split"))
        if payload.get("torus", "split") == "split":
            chi_b = ser.mult_char_from_json(payload["chi_bullet"])
            chi_c = ser.mult_char_from_json(payload["chi_circ"])
            eps, hasse = saito_tunnell_sign(pi, (chi_b, chi_c), eta)
            oracle = epsilon_product_oracle(pi, (chi_b, chi_c))
            checks.append({"name": "epsilon_gauss_oracle", "pass": oracle == Cyc.from_fraction(eps)})
        else:
            data = InertTorusCharacter(
                minus_one=int(payload.get("minus_one", 1)),
                unramified=bool(payload.get("unramified", True)),
                epsilon=None if "epsilon" not in payload else ser.value_from_json(payload["epsilon"]),
            )
            eps, hasse = saito_tunnell_sign(pi, data, eta)
        outputs = {"epsilon": ser.fraction_to_str(eps), "hasse": ser.fraction_to_str(hasse)}
    else:
        raise SchemaError(f"unknown period kind {kind!r}")
    return outputs, checks


def _finite_char(C, exps):
    from .characters import FiniteCharacter

    ser.expect(len(exps) == len(C.invariants), "character exponents must match C invariants")
    return FiniteCharacter(C, [int(e) for e in exps])


def run_ratio(payload, opts):
    p_plus = ser.value_from_json(payload["p_plus"])
    p_minus = ser.value_from_json(payload["p_minus"])
    q = ser.value_from_json(payload["q"])
    value = toy_l_ratio_eval(p_plus, p_minus, q)
    seven = Fraction(7)
    scaled = toy_l_ratio_eval(p_plus * seven, p_minus, q * seven)
    checks = [{"name": "ratio_scaling_invariance", "pass": scaled == value}]
    return {"value": ser.value_to_json(value)}, checks


def run_coleman(payload, opts):
    op = payload.get("op", "primitive")
    spec_obj = payload.get("spec", {})
    q = int(spec_obj.get("q", payload.get("q", 0)) or 0)
    checks = []
    if op == "pullback":
        omega = ser.differential_from_json(payload["omega"])
        out = frobenius_pullback(omega, q or 2)
        return {"pullback": ser.differential_to_json(out)}, checks
    poly = spec_obj.get("P")
    spec = FrobeniusSpec(q, tuple(ser.fraction_from_str(c) for c in poly)) if poly else FrobeniusSpec.linear(q or 2)
    omega = ser.differential_from_json(payload["omega"])
    if op == "proper":
        ok, witness = is_frobenius_proper(omega, spec)
        outputs = {"proper": ok}
        if ok:
            outputs["witness"] = ser.laurent_to_json(witness)
        return outputs, checks
    if op == "primitive":
        f = coleman_primitive(omega, spec)
        outputs = {
            "laurent": ser.laurent_to_json(f.laurent),
            "log_coeff": ser.fraction_to_str(f.log_coeff),
        }
        checks.append({"name": "d_primitive_is_omega", "pass": f.differential() == omega})
        checks.append(
            {"name": "p_frobenius_kills_log", "pass": not apply_p_of_frobenius(f, spec).has_log()}
        )
        return outputs, checks
    raise SchemaError(f"unknown coleman op {op!r}")


def run_selftest_cmd(payload, opts):
    only = payload.get("only")
    checks = run_selftest(only=only)
    return {"total": len(checks), "passed": sum(1 for c in checks if c["pass"])}, checks


RUNNERS = {
    "lt": run_lt,
    "mellin": run_mellin,
    "factors": run_factors,
    "zeta": run_zeta,
    "period": run_period,
    "ratio": run_ratio,
    "coleman": run_coleman,
    "selftest": run_selftest_cmd,
}


def _run_one(args):
    sub, payload, opts = args
    outputs, checks = RUNNERS[sub](payload, opts)
    return {"inputs": payload, "outputs": outputs, "checks": checks}


def _load_payload(opts):
    if opts.inline is not None:
        text = opts.inline
    elif opts.input is None or opts.input == "-":
        text = sys.stdin.read() or "{}"
    else:
        with open(opts.input) as fh:
            text = fh.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON input: {e}") from e
    _check_schema_versions(payload)
    return payload


def _check_schema_versions(obj):
    """Any nested "schema" marker must be the supported version."""
    if isinstance(obj, dict):
        version = obj.get("schema")
        if version is not None and version != ser.SCHEMA:
            raise SchemaError(f"unsupported schema version {version!r} (expected {ser.SCHEMA!r})")
        for value in obj.values():
            _check_schema_versions(value)
    elif isinstance(obj, list):
        for value in obj:
            _check_schema_versions(value)


def _build_opts(ns):
    opts = {}
    if ns.mode == "padic":
        opts["ring"] = PadicDomain(ns.prime or 3, ns.precision)
    elif ns.mode == "rational":
        opts["ring"] = RationalDomain()
    return opts


def main(argv=None):
    parser = argparse.ArgumentParser(prog="ltperiods", description=__doc__)
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("input", nargs="?", help="payload path, or - for stdin")
    parser.add_argument("--inline", help="payload as an inline JSON string")
    parser.add_argument("--mode", choices=["rational", "padic"], default=None)
    parser.add_argument("--precision", type=int, default=30, help="padic precision N")
    parser.add_argument("--prime", type=int, default=None, help="padic prime for --mode padic")
    parser.add_argument("--trunc", type=int, default=None, help="override truncation degree D")
    parser.add_argument("--jobs", type=int, default=1, help="parallel width for batch payloads")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--figures", help="directory for figures and the checks CSV")
    parser.add_argument("--csv", help="explicit path for the checks CSV")
    ns = parser.parse_args(argv)

    try:
        payload = _load_payload(ns)
        opts = _build_opts(ns)
        if ns.trunc is not None and isinstance(payload, dict) and "group" in payload:
            payload["group"]["D"] = ns.trunc
        if isinstance(payload, list):
            items = [(ns.subcommand, item, opts) for item in payload]
            if ns.jobs > 1:
                with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
                    results = list(pool.map(_run_one, items))
            else:
                results = [_run_one(item) for item in items]
            report = {
                "schema": ser.SCHEMA,
                "subcommand": ns.subcommand,
                "inputs": payload,
                "outputs": [r["outputs"] for r in results],
                "checks": [c for r in results for c in r["checks"]],
            }
        else:
            result = _run_one((ns.subcommand, payload, opts))
            report = {
                "schema": ser.SCHEMA,
                "subcommand": ns.subcommand,
                "inputs": result["inputs"],
                "outputs": result["outputs"],
                "checks": result["checks"],
            }
    except (SchemaError, KernelError, KeyError, TypeError, ValueError) as e:
        error = {"schema": ser.SCHEMA, "error": {"type": type(e).__name__, "message": str(e)}}
        _emit(ser.dumps(error), ns.out)
        return 2
    except ConsistencyError as e:
        error = {"schema": ser.SCHEMA, "error": {"type": "ConsistencyError", "message": str(e)}}
        _emit(ser.dumps(error), ns.out)
        return 3

    text = ser.dumps(report)
    _emit(text, ns.out)
    if ns.figures or ns.csv:
        _render_artifacts(report, ns)
    return 0 if all(c["pass"] for c in report["checks"]) else 3


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_artifacts(report, ns):
    from . import report as rpt

    figdir = ns.figures
    if figdir:
        os.makedirs(figdir, exist_ok=True)
    csv_path = ns.csv or (os.path.join(figdir, f"{report['subcommand']}_checks.csv") if figdir else None)
    if csv_path and report["checks"]:
        rpt.write_checks_csv(report["checks"], csv_path)
    if not figdir:
        return
    if report["checks"]:
        rpt.checks_figure(
            report["checks"],
            os.path.join(figdir, f"{report['subcommand']}_checks.png"),
            title=f"{report['subcommand']} checks",
        )
    series_profiles = _collect_series(report["outputs"])
    if series_profiles:
        p = _find_prime(report)
        if p:
            rpt.valuation_figure(
                [coeffs for _, coeffs in series_profiles],
                p,
                os.path.join(figdir, f"{report['subcommand']}_valuations.png"),
                labels=[name for name, _ in series_profiles],
            )


def _collect_series(outputs, prefix=""):
    found = []
    if isinstance(outputs, dict):
        for key, value in outputs.items():
            if key in ("series", "log") and isinstance(value, dict) and "coeffs" in value:
                if all(isinstance(c, str) for c in value["coeffs"]):
                    try:
                        coeffs = [Fraction(c.split("@")[0]) for c in value["coeffs"]]
                        found.append((prefix + key, coeffs))
                    except (ValueError, ZeroDivisionError):
                        pass
            elif isinstance(value, (dict, list)):
                found.extend(_collect_series(value, prefix=f"{prefix}{key}."))
    elif isinstance(outputs, list):
        for i, value in enumerate(outputs):
            found.extend(_collect_series(value, prefix=f"{prefix}{i}."))
    return found


def _find_prime(report):
    def walk(obj):
        if isinstance(obj, dict):
            for key in ("p", "l"):
                if key in obj and isinstance(obj[key], int):
                    return obj[key]
            for value in obj.values():
                got = walk(value)
                if got:
                    return got
        elif isinstance(obj, list):
            for value in obj:
                got = walk(value)
                if got:
                    return got
        return None

    return walk(report.get("inputs", {}))


if __name__ == "__main__":
    sys.exit(main())
