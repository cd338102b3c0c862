"""
Verificadores de valor médio inferior e do teorema de Wirsing e sua extensão.
"""
from __future__ import annotations

import math
import time
from typing import Literal

import numpy as np
from pydantic import BaseModel

from arith.compensated import fsum_complex, fsum_real
from arith.errors import RefusalError
from arith.mult_fn import FunctionClass, MultFnSpec, is_non_decreasing, validate_class_membership
from arith.prime_analysis import c_coefficients, gamma0_values, rho_min
from arith.primes import prime_powers_up_to, primes_up_to
from config.logger import setup_logger
from config.settings import settings
from memory.table_cache import load_or_sieve

from .halasz import class_prime_sums, d1_parameter, require_class
from .reports import AsymptoticReport, TheoremReport, asymptotic_verdict, build_report, exceptional_p_over_phi

logger = setup_logger(__name__)

# Pré-condição da variante i: |produto parcial| abaixo disto no maior x
VANISHING_PRODUCT = 0.1


def _require_nonnegative(spec: MultFnSpec, x: int, name: str) -> np.ndarray:
    ps = primes_up_to(x)
    values = spec.prime_values(ps)
    tol = settings.modulus_tolerance
    bad = (np.abs(values.imag) > tol) | (values.real < -tol)
    if bad.any():
        raise RefusalError(f"{name} ≥ 0", f"{name}({int(ps[np.argmax(bad)])}) = {values[np.argmax(bad)]}")
    return values.real


def verify_lower_mean_value(spec: MultFnSpec, x_grid) -> TheoremReport:
    """
    M_λ(x) contra δ(φ(P)/P)(x/log x)Π_{p≤x}(1 + λ(p)/p); o veredito pede um piso positivo.

    Raises:
        RefusalError: λ negativa ou complexa, ou extensão completa com B ≥ 2
    """
    start = time.perf_counter()
    xs = sorted(int(x) for x in x_grid)
    if spec.is_complete and spec.B >= 2:
        raise RefusalError("Σ λ(p^k)/p^k < ∞", "extensão completa exige B < 2")
    lam = _require_nonnegative(spec, xs[-1], "λ")
    ps = primes_up_to(xs[-1]).astype(np.float64)
    log_terms = np.log1p(lam / ps)
    table = load_or_sieve(spec, xs)
    lhs, rhs = [], []
    for i, x in enumerate(xs):
        k = int(np.searchsorted(ps, x, side="right"))
        product = math.exp(fsum_real(log_terms[:k]))
        phi_ratio = 1 / exceptional_p_over_phi(spec, x)
        lhs.append(float(table.M_g[i].real))
        rhs.append(spec.delta * phi_ratio * x / math.log(x) * product)
    report = build_report("lower-mean-value", spec, xs, lhs, rhs, mode="lower")
    report.wall_time = time.perf_counter() - start
    logger.info(f"{'✅' if report.verdict else '❌'} lower-mean-value {spec.label}: "
                f"razões {report.min_ratio:.4f}..{report.max_ratio:.4f}, inclinação {report.trend_slope:.4f}")
    return report


def local_factor_sum(spec: MultFnSpec, ps: np.ndarray, values: np.ndarray) -> np.ndarray:
    """1 + Σ_{k≥1} g(p^k)p^{-k} em forma fechada: 1 + g/(p-1) (forte), p/(p-g) (completa)."""
    ps = ps.astype(np.float64)
    if spec.is_complete:
        return ps / (ps - values)
    return 1 + values / (ps - 1)


def limit_product(g_spec: MultFnSpec, f_spec: MultFnSpec, x: int) -> complex:
    """Produto parcial sobre p ≤ x do lado direito do limite de Wirsing (zero se um fator se anula)."""
    ps = primes_up_to(x)
    num = local_factor_sum(g_spec, ps, g_spec.prime_values(ps))
    den = local_factor_sum(f_spec, ps, f_spec.prime_values(ps))
    if np.any(np.abs(num) < 1e-300):
        return 0j
    return complex(np.exp(fsum_complex(np.log(num.astype(np.complex128)) - np.log(den.astype(np.complex128)))))


def _require_domination(g_spec: MultFnSpec, f_spec: MultFnSpec, x: int) -> None:
    """|g(p^k)| ≤ f(p^k) nas potências de primo até x e f ≥ 0."""
    _require_nonnegative(f_spec, x, "f")
    powers, bases, exps = prime_powers_up_to(x)
    g = np.abs(g_spec.power_values(g_spec.prime_values(bases), exps))
    f = f_spec.power_values(f_spec.prime_values(bases), exps).real
    bad = g > f + settings.modulus_tolerance
    if bad.any():
        n = int(powers[np.argmax(bad)])
        raise RefusalError("|g(n)| ≤ f(n)", f"falha em n = {n}")


def verify_wirsing_limit(g_spec: MultFnSpec, f_spec: MultFnSpec, x_grid, tolerance: float | None = None) -> TheoremReport:
    """
    M_g(x)/M_f(x) contra o produto de Euler parcial até x.

    A série guarda |M_g/M_f - produto| (lhs) com rhs = 1; o veredito olha o maior x.
    """
    start = time.perf_counter()
    xs = sorted(int(x) for x in x_grid)
    _require_domination(g_spec, f_spec, xs[-1])
    g_table = load_or_sieve(g_spec, xs)
    f_table = load_or_sieve(f_spec, xs)
    diffs, ratios, products = [], [], []
    for i, x in enumerate(xs):
        M_f = complex(f_table.M_g[i])
        if abs(M_f) == 0:
            raise RefusalError("M_f(x) > 0", f"M_f({x}) = 0")
        ratio = complex(g_table.M_g[i]) / M_f
        product = limit_product(g_spec, f_spec, x)
        diffs.append(abs(ratio - product))
        ratios.append(ratio)
        products.append(product)
    report = build_report("wirsing-limit", g_spec, xs, diffs, [1.0] * len(xs), mode="limit", tolerance=tolerance,
                          notes={"f": f_spec.label, "ratio": [str(r) for r in ratios],
                                 "product": [str(p) for p in products]})
    report.wall_time = time.perf_counter() - start
    logger.info(f"{'✅' if report.verdict else '❌'} wirsing-limit {g_spec.label}/{f_spec.label}: "
                f"|diferença| final {diffs[-1]:.4g}")
    return report


class WirsingExtResult(BaseModel):
    report: TheoremReport
    asymptotic: AsymptoticReport


def _f_sums(g_spec: MultFnSpec, f_spec: MultFnSpec, x: int) -> tuple[float, complex, complex]:
    """(Σ(f-|g|)/p, Σ(f-g)/p, Σ(|g|-g)/p) sobre p ≤ x."""
    ps = primes_up_to(x)
    g = g_spec.prime_values(ps)
    f = f_spec.prime_values(ps).real
    inv = 1.0 / ps.astype(np.float64)
    return fsum_real((f - np.abs(g)) * inv), fsum_complex((f - g) * inv), fsum_complex((np.abs(g) - g) * inv)


def _cb_member(spec: MultFnSpec, x: int) -> bool:
    return FunctionClass.CB in spec.classes and validate_class_membership(spec, x, FunctionClass.CB).passed


def _exponent_F(spec: MultFnSpec, x: int, in_cb: bool) -> float:
    """𝓕(x; g): forma com c_j em 𝒞_b, forma com ρ_{E_j} fora."""
    sums = class_prime_sums(spec, x)
    if in_cb:
        return float(np.sum(c_coefficients(spec, is_non_decreasing(spec, x)) * sums["angular"]))
    return float(np.sum(spec.bounds * (rho_min(spec, x).minima - sums["mass"])))


def remainder_budgets(g_spec: MultFnSpec, x: int, eta: float, A_abs: float, X: float) -> dict[str, float]:
    """ℛ₁ e ℛ₂ da variante ii, com β = min_j β_j."""
    delta, B = g_spec.delta, g_spec.B
    beta = min(c.beta for c in g_spec.partition.classes)
    gamma = float(np.min(g_spec.deltas * np.array([c.beta for c in g_spec.partition.classes]) ** 3))
    gamma0 = float(gamma0_values(g_spec).min())
    d1 = d1_parameter(B, delta, eta)
    L = math.log(x)
    root = math.sqrt(eta)
    E1 = math.exp(-d1 / root) if eta > 0 else 0.0
    E2 = E1 * E1
    R1 = (B / delta) ** 2 * (X * (d1 * root + L ** (-delta * beta**3 / 2) + E1 / delta)
                             + L ** (-2 * delta / 3) + E2 / delta)
    R2 = (B / delta) ** 2 * (d1 * root * A_abs + L ** (-2 * delta / 3) + E2 / delta
                             + A_abs ** (gamma0 / (4 * (1 + gamma0))) * (L ** (-gamma / 2) + E1 / gamma))
    return {"R1": R1, "R2": R2, "d1": d1, "eta": eta, "gamma": gamma, "gamma0": gamma0,
            "beta": beta, "delta": delta, "B": B}


def verify_wirsing_ext(g_spec: MultFnSpec, f_spec: MultFnSpec, x_grid,
                       variant: Literal["i", "ii"] = "ii") -> WirsingExtResult:
    """
    Extensão de Wirsing com taxa explícita.

    i: |M_g|/M_f contra (B/δ)³(P/φ(P))² e^{-𝓕(x;g)} exp(-Σ(f-|g|)/p), quando o limite é 0.
    ii: |M_g/M_f - exp(-Σ(f-g)/p)| contra (P/φ(P))(ℛ₁|A| + ℛ₂X).

    Raises:
        RefusalError: hipótese da variante falhou; nomeia a cláusula
    """
    start = time.perf_counter()
    xs = sorted(int(x) for x in x_grid)
    top = xs[-1]
    _require_domination(g_spec, f_spec, top)
    require_class(g_spec, top, FunctionClass.C)
    f_top = f_spec.prime_values(primes_up_to(top)).real
    B = max(g_spec.B, float(f_top.max()))
    delta = g_spec.delta

    if variant == "i":
        product = limit_product(g_spec, f_spec, top)
        if abs(product) >= VANISHING_PRODUCT:
            raise RefusalError("limite de Wirsing nulo", f"|produto parcial| = {abs(product):.4f} em x = {top}")
    else:
        if g_spec.extension is not f_spec.extension:
            raise RefusalError("mesma extensão", f"g {g_spec.extension.value}, f {f_spec.extension.value}")
        eta = max(c.eta for c in g_spec.partition.classes)
        ps = primes_up_to(top)
        gap = np.abs(g_spec.prime_values(ps) - f_top)
        if np.any(gap > eta + settings.modulus_tolerance):
            raise RefusalError("|g(p) - f(p)| ≤ η", f"falha em p = {int(ps[np.argmax(gap > eta)])}")

    g_table = load_or_sieve(g_spec, xs)
    f_table = load_or_sieve(f_spec, xs)
    in_cb = variant == "i" and _cb_member(g_spec, top)
    A_vals, measured, residual, budget, comps = [], [], [], [], []
    X_vals, F_vals, R1_vals, R2_vals = [], [], [], []
    for i, x in enumerate(xs):
        ratio = complex(g_table.M_g[i]) / float(f_table.M_g[i].real)
        f_abs, f_g, abs_g = _f_sums(g_spec, f_spec, x)
        A = complex(np.exp(-abs_g))
        X = math.exp(-f_abs)
        ppp = exceptional_p_over_phi(g_spec, x)
        A_vals.append(A)
        X_vals.append(X)
        measured.append(ratio)
        if variant == "i":
            F = _exponent_F(g_spec, x, in_cb)
            F_vals.append(F)
            residual.append(abs(ratio))
            budget.append((B / delta) ** 3 * ppp**2 * math.exp(-F) * X)
            comps.append({"F": F, "X": X, "p_over_phi": ppp})
        else:
            main = complex(np.exp(-f_g))
            parts = remainder_budgets(g_spec, x, eta, abs(A), X)
            residual.append(abs(ratio - main))
            budget.append(ppp * (parts["R1"] * abs(A) + parts["R2"] * X))
            R1_vals.append(parts["R1"])
            R2_vals.append(parts["R2"])
            comps.append({**parts, "p_over_phi": ppp})

    theorem = f"wirsing-ext-{variant}"
    if variant == "i":
        report = build_report(theorem, g_spec, xs, residual, budget, notes={"f": f_spec.label, "in_cb": in_cb})
        fit, excess, verdict = report.fit_constant or 0.0, (report.max_ratio or 0.0) / (report.fit_constant or 1.0), report.verdict
    else:
        fit, excess, verdict = asymptotic_verdict(residual, budget)
        report = build_report(theorem, g_spec, xs, residual, budget, notes={"f": f_spec.label})
        report.verdict = verdict
        report.fit_constant = fit
    report.wall_time = time.perf_counter() - start
    asym = AsymptoticReport(
        theorem=theorem, label=g_spec.label, spec_hash=g_spec.spec_hash, grid=xs, A=A_vals,
        measured=measured, residual=residual, budget=budget, components=comps, X=X_vals,
        F=F_vals or None, R1=R1_vals or None, R2=R2_vals or None,
        fit_constant=fit, max_excess=excess, budget_monotone=True, verdict=verdict,
    )
    logger.info(f"{'✅' if verdict else '❌'} {theorem} {g_spec.label}/{f_spec.label}: excesso {excess:.3g}")
    return WirsingExtResult(report=report, asymptotic=asym)
