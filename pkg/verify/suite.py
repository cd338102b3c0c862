"""
Bateria de aceitação: cada verificação grava seus artefatos e devolve um SuiteEntry.
"""
from __future__ import annotations

import cmath
import math
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from arith.catalog import archimedean_spec, builtin_spec, random_spec
from arith.dirichlet import g0_factor, halasz_sweep, j_integral, montgomery_majorant_check, parseval_oracle
from arith.errors import LaboratorioError
from arith.prime_analysis import trig_inequality_check
from arith.sieve import lambda_convolution_identity, selberg_constant, selberg_sum
from config.logger import setup_logger
from config.settings import settings
from memory.table_cache import load_or_sieve

from .chains import verify_integral_average_chain
from .halasz import verify_asymptotic, verify_upper_explicit, verify_upper_general
from .reports import default_grid
from .wirsing import verify_lower_mean_value, verify_wirsing_limit

logger = setup_logger(__name__)

# π²/(6e^γ): limite de M_1/rhs no valor médio inferior com λ ≡ 1
LOWER_MEAN_VALUE_LIMIT = math.pi**2 / (6 * math.exp(np.euler_gamma))
SELBERG_TOLERANCE = 0.10
SWEEP_GRID = [10**4, 10**5, 10**6, 10**7]
# bateria completa nas grades padrão, em segundos (modo estendido fora)
SUITE_WALL_LIMIT = 900.0


class SuiteEntry(BaseModel):
    name: str
    passed: bool
    detail: dict[str, Any] = Field(default_factory=dict)
    artifacts: list[str] = Field(default_factory=list)
    wall_time: float = 0.0


def _convolution(out: Path, seed: int) -> SuiteEntry:
    x = 10**4
    specs = [builtin_spec(n) for n in ("unit", "liouville", "liouville-complete")]
    specs += [random_spec(seed=seed + k, radius=(0.5, 1.5), label=f"random-{seed + k}") for k in range(5)]
    detail = {}
    for spec in specs:
        residual = lambda_convolution_identity(spec, x)
        N = abs(complex(load_or_sieve(spec, [x]).N_g[-1]))
        detail[spec.label] = {"residual": residual, "limit": 1e-6 * (1 + N)}
    return SuiteEntry(name="convolution-identity", passed=all(d["residual"] <= d["limit"] for d in detail.values()),
                      detail=detail)


def _selberg(out: Path, seed: int) -> SuiteEntry:
    x = 10**6
    F, tail = selberg_constant(2.0, 10**7)
    ratio = selberg_sum(2.0, x) / (x * math.log(x) * F)
    return SuiteEntry(name="selberg", passed=abs(ratio - 1) <= SELBERG_TOLERANCE,
                      detail={"ratio": ratio, "F": F, "tail": tail, "tolerance": SELBERG_TOLERANCE})


def _archimedean(out: Path, seed: int) -> SuiteEntry:
    x = 10**6
    M = complex(load_or_sieve(archimedean_spec(1.0), [x]).M_g[-1])
    deviation = abs(M * (1 + 1j) / cmath.exp((1 + 1j) * math.log(x)) - 1)
    return SuiteEntry(name="archimedean-mean-value", passed=deviation <= 1e-3, detail={"deviation": deviation})


def _parseval(out: Path, seed: int) -> SuiteEntry:
    sigma = 1 + 1 / math.log(10**4)
    v_max = math.log(settings.dirichlet_poly_length)
    detail = {}
    for name in ("unit", "liouville-complete"):
        spec = builtin_spec(name)
        line = j_integral(spec, sigma, 400.0, integrand="lambda")
        oracle = parseval_oracle(spec, sigma, v_max)
        detail[name] = {"j_integral": line.total, "oracle": oracle.value,
                        "relative": abs(line.total - oracle.value) / oracle.value}
    return SuiteEntry(name="parseval", passed=all(d["relative"] <= 0.03 for d in detail.values()), detail=detail)


def _montgomery(out: Path, seed: int) -> SuiteEntry:
    check = montgomery_majorant_check(1000, seed=seed)
    return SuiteEntry(name="montgomery", passed=check.passed == check.trials, detail=check.model_dump())


def _trig(out: Path, seed: int) -> SuiteEntry:
    check = trig_inequality_check(10**4, m_max=8, seed=seed)
    return SuiteEntry(name="trig-inequality", passed=check.violations == 0, detail=check.model_dump())


def _g0(out: Path, seed: int) -> SuiteEntry:
    rng = np.random.default_rng(seed)
    violations, worst = 0, 0.0
    for B in (1.0, 1.8):
        for k in range(20):
            spec = random_spec(seed=seed + 100 * k + int(10 * B), radius=(0.5, B), arg_spread=math.pi)
            for _ in range(50):
                s = complex(rng.uniform(1.01, 2.0), rng.uniform(-20.0, 20.0))
                result = g0_factor(spec, s, cutoff=10**4)
                worst = max(worst, result.ratio)
                violations += not result.within_bound
    return SuiteEntry(name="g0-bound", passed=violations == 0, detail={"violations": violations, "max_ratio": worst})


def _logsum(out: Path, seed: int) -> SuiteEntry:
    chain = verify_integral_average_chain(builtin_spec("unit"), [10**4, 10**5, 10**6])
    path = chain.to_json(out / "chain-unit.json")
    link = next(r for r in chain.links if r.theorem == "chain-logsum")
    return SuiteEntry(name="logsum-constants", passed=link.verdict, artifacts=[str(path)],
                      detail={"band": link.band, "ratios": link.ratios().tolist()})


def _lower_mean_value(out: Path, seed: int) -> SuiteEntry:
    grid = default_grid()
    unit = verify_lower_mean_value(builtin_spec("unit"), grid)
    artifacts = [str(unit.to_json(out / "lowermv-unit.json"))]
    final = unit.series[-1].ratio or 0.0
    passed = abs(final / LOWER_MEAN_VALUE_LIMIT - 1) <= 0.10
    detail: dict[str, Any] = {"unit_ratio": final, "limit": LOWER_MEAN_VALUE_LIMIT}
    for k in range(5):
        report = verify_lower_mean_value(builtin_spec(f"random-lowermv-{k}"), grid)
        artifacts.append(str(report.to_json(out / f"lowermv-{report.label}.json")))
        ok = (report.min_ratio or 0.0) > 0 and report.trend_slope >= -0.02
        passed &= ok
        detail[report.label] = {"min_ratio": report.min_ratio, "slope": report.trend_slope}
    return SuiteEntry(name="lower-mean-value", passed=passed, detail=detail, artifacts=artifacts)


def _wirsing(out: Path, seed: int) -> SuiteEntry:
    report = verify_wirsing_limit(builtin_spec("wirsing-g2-complete"), builtin_spec("unit"), [10**4, 10**5, 10**6])
    path = report.to_json(out / "wirsing-limit.json")
    return SuiteEntry(name="wirsing-limit", passed=report.verdict, artifacts=[str(path)],
                      detail={"difference": report.series[-1].lhs})


def _sweep_series_ok(spec, grid: list[int]) -> tuple[bool, dict[str, Any]]:
    series: dict[str, list[float]] = {}
    bad_skips = 0
    for x in grid:
        sweep = halasz_sweep(spec, x)
        bad_skips += sum(1 for p in sweep.skipped if p.inside_zero_free_region)
        for key, value in sweep.max_ratios().items():
            series.setdefault(key, []).append(value)
    ok = bad_skips == 0
    for values in series.values():
        fit = max(values[0], settings.fit_floor)
        ok &= max(values) <= settings.fit_factor * fit
    return ok, {"max_ratios": series, "zero_skips": bad_skips}


def _halasz(out: Path, seed: int) -> SuiteEntry:
    grid = default_grid()
    specs = [builtin_spec("liouville")] + [builtin_spec(f"random-cb-{k}") for k in range(3)]
    passed, detail, artifacts = True, {}, []
    for spec in specs:
        general = verify_upper_general(spec, grid)
        explicit = verify_upper_explicit(spec, grid)
        sweep_ok, sweep_detail = _sweep_series_ok(spec, SWEEP_GRID)
        for report in (general, explicit):
            artifacts.append(str(report.to_json(out / f"{report.theorem}-{spec.label}.json")))
        passed &= general.verdict and explicit.verdict and sweep_ok
        detail[spec.label] = {"upper_general": general.verdict, "upper_explicit": explicit.verdict, **sweep_detail}
    return SuiteEntry(name="halasz-boundedness", passed=passed, detail=detail, artifacts=artifacts)


def _asymptotic(out: Path, seed: int) -> SuiteEntry:
    report = verify_asymptotic(builtin_spec("rotated-005"), default_grid())
    path = report.to_json(out / "asymptotic-rotated-005.json")
    return SuiteEntry(name="asymptotic", passed=report.verdict, artifacts=[str(path)],
                      detail={"max_excess": report.max_excess, "fit": report.fit_constant})


CHECKS: dict[str, Callable[[Path, int], SuiteEntry]] = {
    "convolution-identity": _convolution,
    "selberg": _selberg,
    "archimedean-mean-value": _archimedean,
    "parseval": _parseval,
    "montgomery": _montgomery,
    "trig-inequality": _trig,
    "g0-bound": _g0,
    "logsum-constants": _logsum,
    "lower-mean-value": _lower_mean_value,
    "wirsing-limit": _wirsing,
    "halasz-boundedness": _halasz,
    "asymptotic": _asymptotic,
}


def run_suite(out: Path, seed: int | None = None, only: list[str] | None = None) -> list[SuiteEntry]:
    """Roda as verificações (todas ou as nomeadas em only); falhas de pré-condição viram entrada reprovada."""
    seed = settings.default_seed if seed is None else seed
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, check in CHECKS.items():
        if only and name not in only:
            continue
        start = time.perf_counter()
        try:
            entry = check(out, seed)
        except LaboratorioError as exc:
            logger.error(f"❌ {name}: {exc}")
            entry = SuiteEntry(name=name, passed=False, detail={"error": str(exc)})
        entry.wall_time = time.perf_counter() - start
        logger.info(f"{'✅' if entry.passed else '❌'} suite/{name} em {entry.wall_time:.1f}s")
        entries.append(entry)
    return entries


def within_wall_limit(entries: list[SuiteEntry], extended: bool = False) -> tuple[float, bool]:
    """(tempo total, dentro do limite); o modo estendido não tem limite."""
    total = math.fsum(e.wall_time for e in entries)
    within = extended or total <= SUITE_WALL_LIMIT
    if not within:
        logger.warning(f"⏱️ bateria levou {total:.1f}s, acima do limite de {SUITE_WALL_LIMIT:.0f}s")
    return total, within
