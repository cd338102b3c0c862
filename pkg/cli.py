"""
Front-end em lote do Laboratório de Valores Médios

Uso:
    python cli.py validate --spec specs/liouville.toml
    python cli.py sum --spec unit --grid 10,100
    python cli.py distance --spec liouville --x 1e6 --tau-D 2.1
    python cli.py verify upper-general --spec liouville --grid default
    python cli.py verify wirsing-limit --spec wirsing-g2-complete --spec unit --grid 1e4,1e5,1e6
    python cli.py suite --out out/suite

Códigos de saída: 0 aprovado, 1 veredito reprovado ou pré-condição recusada,
2 spec inválida ou erro de uso.
"""
from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator

from arith.catalog import BUILTIN_NAMES, builtin_spec
from arith.errors import CacheMissError, GridError, LaboratorioError, RefusalError, SieveConfigError, SpecError
from arith.mult_fn import MultFnSpec, load_spec, validate_class_membership
from arith.prime_analysis import rho_min
from arith.dirichlet import halasz_sweep
from config.logger import setup_logger
from config.settings import settings
from memory.table_cache import TableCache, load_or_sieve
from verify import (
    verify_asymptotic,
    verify_compavg,
    verify_integral_average_chain,
    verify_lower_mean_value,
    verify_upper_explicit,
    verify_upper_general,
    verify_wirsing_ext,
    verify_wirsing_limit,
)
from verify.reports import default_grid, write_series_json
from verify.suite import CHECKS, run_suite, within_wall_limit

logger = setup_logger(__name__)

Command = Literal["validate", "sum", "distance", "verify", "suite"]

THEOREMS = (
    "upper-general", "upper-explicit", "asymptotic", "lower-mean-value", "wirsing-limit",
    "wirsing-ext-i", "wirsing-ext-ii", "chain", "compavg", "halasz-sweep",
)


class RunConfig(BaseModel):
    """Parâmetros de uma execução da CLI."""
    command: Command
    specs: list[str] = Field(default_factory=list)
    grid: list[int] = Field(default_factory=default_grid)
    theorem: str | None = None
    x: int | None = None
    tau_D: float = Field(default_factory=lambda: settings.tau_D, gt=2)
    workers: int = Field(default_factory=lambda: settings.worker_count, ge=1)
    out: Path = Field(default_factory=lambda: Path(settings.output_dir))
    seed: int = Field(default_factory=lambda: settings.default_seed)
    tolerance: float | None = Field(None, gt=0)
    extended_x: bool = False
    gnuplot: bool = False
    only: list[str] = Field(default_factory=list)

    @field_validator("grid")
    @classmethod
    def _sorted_grid(cls, grid: list[int]) -> list[int]:
        if not grid:
            raise ValueError("grade vazia")
        if any(x < 1 for x in grid):
            raise ValueError("grade com valores < 1")
        return sorted(set(grid))


def parse_grid(text: str, extended: bool = False) -> list[int]:
    """
    "default", lista "1e4,1e5" ou expoentes "4:7:0.5" (10^4 ... 10^7).

    Raises:
        GridError: texto não reconhecido
    """
    text = text.strip()
    if text == "default":
        return default_grid(extended)
    try:
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            return [int(round(10**e)) for e in np.arange(lo, hi + step / 2, step)]
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise GridError(f"grade inválida '{text}': {exc}") from exc


def resolve_spec(token: str) -> MultFnSpec:
    """Arquivo TOML se o caminho existe; senão, nome do catálogo."""
    path = Path(token)
    if path.suffix == ".toml" or path.exists():
        return load_spec(path)
    return builtin_spec(token)


def ensure_reach(specs: list[MultFnSpec], top: int, extended: bool) -> None:
    """
    Recusa grades além de x_max, a menos que haja tabela em cache ou --extended-x.

    Raises:
        CacheMissError: tabela além do alcance e sem cache
    """
    limit = settings.x_max_extended if extended else settings.x_max
    if top <= settings.x_max:
        return
    if top > limit:
        cache = TableCache()
        for spec in specs:
            cache.get(spec, [top])
        return
    logger.info(f"🔭 Modo estendido: crivo até {top}")


def write_gnuplot(csv_path: Path, x_column: int, y_columns: list[int], title: str) -> Path:
    """Script gnuplot companheiro do CSV (eixo x logarítmico)."""
    script = csv_path.with_suffix(".gp")
    plots = ", ".join(f"'{csv_path.name}' using {x_column}:{c} with linespoints title columnhead({c})"
                      for c in y_columns)
    script.write_text(
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale x\n"
        f"set title '{title}'\n"
        f"set terminal pngcairo size 1000,600\nset output '{csv_path.stem}.png'\n"
        f"plot {plots}\n",
        encoding="utf-8",
    )
    return script


class Run:
    """Executa um RunConfig, registrando artefatos e tempos em metadata.json."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.artifacts: dict[str, float] = {}
        self.extra: dict[str, Any] = {}
        self.started = datetime.now(timezone.utc)

    def record(self, path: Path, wall_time: float = 0.0) -> Path:
        self.artifacts[str(path)] = round(wall_time, 3)
        return path

    def csv(self, path: Path, x_column: int, y_columns: list[int], wall_time: float = 0.0) -> None:
        self.record(path, wall_time)
        if self.config.gnuplot:
            self.record(write_gnuplot(path, x_column, y_columns, path.stem))

    def finish(self, verdict: bool) -> int:
        finished = datetime.now(timezone.utc)
        write_series_json(self.config.out / "metadata.json", {
            "command": self.config.command,
            "theorem": self.config.theorem,
            "specs": self.config.specs,
            "seed": self.config.seed,
            "started": self.started.isoformat(),
            "finished": finished.isoformat(),
            "wall_time": (finished - self.started).total_seconds(),
            "artifacts": self.artifacts,
            "verdict": verdict,
            **self.extra,
        })
        return 0 if verdict else 1


def cmd_validate(run: Run, specs: list[MultFnSpec]) -> bool:
    x = run.config.x or min(run.config.grid[-1], 10**6)
    verdict = True
    for spec in specs:
        for klass in spec.classes:
            report = validate_class_membership(spec, x, klass)
            path = run.config.out / f"validate-{spec.label}-{klass.value}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
            run.record(path)
            for cond in report.conditions:
                where = "x" if cond.condition == "ii" else "p"
                mark = "ok" if cond.passed else f"FALHOU em {where}={cond.first_violation} {cond.detail}"
                print(f"{spec.label} {klass.value} {cond.condition}): {mark}")
            verdict &= report.passed
    return verdict


def cmd_sum(run: Run, specs: list[MultFnSpec]) -> bool:
    for spec in specs:
        start = time.perf_counter()
        table = load_or_sieve(spec, run.config.grid, worker_count=run.config.workers)
        path = table.to_csv(run.config.out / f"sum-{spec.label}.csv")
        run.csv(path, 1, [2, 4], time.perf_counter() - start)
        for row in table.rows():
            print(f"{row[0]},{float(row[1])!r},{float(row[3])!r}")
    return True


def cmd_distance(run: Run, specs: list[MultFnSpec]) -> bool:
    x = run.config.x or run.config.grid[-1]
    for spec in specs:
        start = time.perf_counter()
        report = rho_min(spec, x, run.config.tau_D)
        path = report.to_csv(run.config.out / f"distance-{spec.label}-{x}.csv")
        run.csv(path, 1, list(range(2, report.distances.shape[0] + 3)), time.perf_counter() - start)
        print(f"{spec.label} x={x} ρ={report.rho!r} minimizadores={report.minimizers.tolist()}")
    return True


def _emit(run: Run, report, stem: str) -> bool:
    out = run.config.out
    run.record(report.to_json(out / f"{stem}.json"), getattr(report, "wall_time", 0.0))
    run.csv(report.to_csv(out / f"{stem}.csv"), 2, [5] if hasattr(report, "series") else [5, 6])
    print(f"{stem}: {'aprovado' if report.verdict else 'reprovado'}")
    return report.verdict


def cmd_verify(run: Run, specs: list[MultFnSpec]) -> bool:
    cfg = run.config
    theorem, grid, spec = cfg.theorem, cfg.grid, specs[0]
    stem = f"{theorem}-{spec.label}"
    match theorem:
        case "upper-general":
            return _emit(run, verify_upper_general(spec, grid, cfg.tau_D), stem)
        case "upper-explicit":
            return _emit(run, verify_upper_explicit(spec, grid), stem)
        case "asymptotic":
            return _emit(run, verify_asymptotic(spec, grid), stem)
        case "lower-mean-value":
            return _emit(run, verify_lower_mean_value(spec, grid), stem)
        case "compavg":
            return _emit(run, verify_compavg(spec, grid), stem)
        case "wirsing-limit" | "wirsing-ext-i" | "wirsing-ext-ii":
            f_spec = specs[1] if len(specs) > 1 else builtin_spec("unit")
            stem = f"{theorem}-{spec.label}-{f_spec.label}"
            if theorem == "wirsing-limit":
                return _emit(run, verify_wirsing_limit(spec, f_spec, grid, cfg.tolerance), stem)
            result = verify_wirsing_ext(spec, f_spec, grid, variant=theorem.rsplit("-", 1)[-1])
            _emit(run, result.asymptotic, f"{stem}-asymptotic")
            return _emit(run, result.report, stem)
        case "chain":
            chain = verify_integral_average_chain(spec, grid)
            run.record(chain.to_json(cfg.out / f"{stem}.json"))
            for link in chain.links:
                run.csv(link.to_csv(cfg.out / f"{link.theorem}-{spec.label}.csv"), 2, [5], link.wall_time)
            print(f"{stem}: {'aprovado' if chain.verdict else 'reprovado'}")
            return chain.verdict
        case "halasz-sweep":
            x = cfg.x or grid[-1]
            start = time.perf_counter()
            sweep = halasz_sweep(spec, x, workers=cfg.workers)
            run.csv(sweep.to_csv(cfg.out / f"{stem}-{x}.csv"), 1, [2, 8, 9, 10, 11], time.perf_counter() - start)
            bad = [p.tau for p in sweep.skipped if p.inside_zero_free_region]
            print(f"{stem}: razões máximas {sweep.max_ratios()}, pulos na região sem zeros {len(bad)}")
            return not bad
    raise GridError(f"teorema desconhecido: {theorem}")


def cmd_suite(run: Run) -> bool:
    out = run.config.out / "suite"
    entries = run_suite(out, run.config.seed, run.config.only or None)
    for entry in entries:
        for artifact in entry.artifacts:
            run.record(Path(artifact))
        print(f"{entry.name:<24} {'aprovado' if entry.passed else 'reprovado'} ({entry.wall_time:.1f}s)")
    index = write_series_json(out / "index.json", {
        "schema_version": 1,
        "entries": [e.model_dump(exclude={"wall_time"}) for e in entries],
    })
    run.record(index)
    total, within = within_wall_limit(entries, run.config.extended_x)
    run.extra["suite_wall_time"] = round(total, 3)
    print(f"{'total':<24} {total:.1f}s")
    if not within:
        print(f"bateria acima do limite de tempo ({total:.1f}s)", file=sys.stderr)
    return within and all(e.passed for e in entries)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laboratorio",
        description="Valores médios de funções multiplicativas: crivo, distâncias e verificadores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, spec_required: bool = True) -> None:
        p.add_argument("--spec", action="append", default=[], required=spec_required,
                       help=f"arquivo TOML ou nome do catálogo ({', '.join(BUILTIN_NAMES)})")
        p.add_argument("--grid", default="default", help="'default', '1e4,1e5' ou expoentes '4:7:0.5'")
        p.add_argument("--x", type=float, default=None, help="x único (validate, distance, halasz-sweep)")
        p.add_argument("--tau-D", dest="tau_D", type=float, default=settings.tau_D, help="D em T = log^D x")
        p.add_argument("--workers", type=int, default=settings.worker_count)
        p.add_argument("--out", default=settings.output_dir, help="diretório de saída")
        p.add_argument("--seed", type=int, default=settings.default_seed)
        p.add_argument("--tolerance", type=float, default=None, help="tolerância do veredito")
        p.add_argument("--extended-x", dest="extended_x", action="store_true", help="permite x até x_max_extended")
        p.add_argument("--gnuplot", action="store_true", help="grava script gnuplot ao lado de cada CSV")

    common(sub.add_parser("validate", help="confere as classes pedidas pela spec"))
    common(sub.add_parser("sum", help="tabela M_g, M_|g|, N_g, L_g nos checkpoints"))
    common(sub.add_parser("distance", help="perfil e mínimos da distância pretensiosa"))
    verify = sub.add_parser("verify", help="roda um verificador de teorema")
    verify.add_argument("theorem", choices=THEOREMS)
    common(verify)
    suite = sub.add_parser("suite", help="bateria de aceitação completa")
    common(suite, spec_required=False)
    suite.add_argument("--only", action="append", default=[], choices=list(CHECKS), help="restringe a bateria")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        specs=args.spec,
        grid=parse_grid(args.grid, args.extended_x),
        theorem=getattr(args, "theorem", None),
        x=int(args.x) if args.x else None,
        tau_D=args.tau_D,
        workers=args.workers,
        out=Path(args.out),
        seed=args.seed,
        tolerance=args.tolerance,
        extended_x=args.extended_x,
        gnuplot=args.gnuplot,
        only=getattr(args, "only", []),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        settings.worker_count = config.workers
        if config.tolerance is not None and config.theorem != "wirsing-limit":
            settings.fit_factor = config.tolerance
        specs = [resolve_spec(token) for token in config.specs]
        ensure_reach(specs, config.x or config.grid[-1], config.extended_x)
        run = Run(config)
        config.out.mkdir(parents=True, exist_ok=True)
        handlers = {
            "validate": lambda: cmd_validate(run, specs),
            "sum": lambda: cmd_sum(run, specs),
            "distance": lambda: cmd_distance(run, specs),
            "verify": lambda: cmd_verify(run, specs),
            "suite": lambda: cmd_suite(run),
        }
        return run.finish(handlers[config.command]())
    except SpecError as exc:
        print(f"erro de spec: {exc}", file=sys.stderr)
        return 2
    except RefusalError as exc:
        print(f"pré-condição recusada: {exc}", file=sys.stderr)
        return 1
    except (CacheMissError, SieveConfigError, GridError) as exc:
        print(f"erro: {exc}", file=sys.stderr)
        return 2
    except LaboratorioError as exc:
        logger.error(f"❌ {exc}")
        print(f"erro: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"erro de uso: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
