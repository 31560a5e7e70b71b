# Nombre de archivo: main.py
# Ubicación de archivo: cli/main.py
# Descripción: Punto de entrada de línea de comandos con un subcomando por operación y códigos de salida uniformes

"""CLI ``paisaje``.

Subcomandos: ``complexity``, ``spectrum``, ``phase-diagram``, ``overlap-band``,
``simulate`` y ``compare``. Cada uno acepta ``--config archivo.json`` y flags
que pisan los valores del archivo. La configuración se valida completa antes
de calcular o escribir nada.

Códigos de salida: 0 ok, 2 sin convergencia, 3 infactible, 4 error de
configuración.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError

from core.config import get_settings
from core.io import dump_record, load_record, write_table
from core.kacrice import (
    ComplexitySolution,
    KacRiceError,
    PhaseRetrievalLoss,
    analyze,
    complexity,
    complexity_tc,
    energy_band,
    hessian_density,
)
from core.kacrice.bbp import BBP_COLUMNS
from core.kacrice.measure import TiltedMeasure
from core.logging import setup_logging
from modules.gd_simulator import GDConfig
from modules.gd_simulator import runner as gd_runner
from modules.landscape_scan import ScanOptions
from modules.landscape_scan import runner as scan_runner

from .compare import cmd_compare
from .io import ConfigError, parse_floats, resolve
from .schemas import (
    BandRecord,
    BBPRecord,
    CompareConfig,
    ComparisonReport,
    ComplexityConfig,
    LabelSummary,
    OverlapBandConfig,
    PhaseDiagramConfig,
    SimulateConfig,
    SolutionRecord,
    SpectrumConfig,
    SpectrumGrid,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_INFEASIBLE = 3
EXIT_CONFIG = 4

LABEL_LEVELS: List[float] = [round(0.05 * k, 2) for k in range(1, 20)]
F_BINS = 60
COMPARE_COLUMNS = [
    "a",
    "alpha",
    "q",
    "energy_in_band",
    "margin_low",
    "margin_high",
    "spectral_ks",
    "f_tv",
    "label_quantile_distance",
    "bbp_agreement",
]


def _config_header(command: str, config: Any) -> Dict[str, str]:
    """Encabezado CSV de una línea con la configuración resuelta."""
    return {"command": command, "config": orjson.dumps(config.model_dump(mode="json")).decode()}


# ---------------------------------------------------------------- complexity


def _solve(config: ComplexityConfig) -> ComplexitySolution:
    loss = PhaseRetrievalLoss(config.a)
    e = None if config.free_e else config.e
    if config.mode == "tc":
        return complexity_tc(config.q, e, config.alpha, loss=loss, options=config.solver.tc_options())
    return complexity(config.q, e, config.alpha, config.mode, loss=loss, options=config.solver.solver_options())


def _label_summary(nu: TiltedMeasure) -> LabelSummary:
    quantiles = {var: nu.quantiles(var, LABEL_LEVELS).tolist() for var in ("y", "y_star", "F")}
    f_hi = max(float(nu.quantiles("F", [0.995])[0]), -3.0)
    edges = np.linspace(-4.0, f_hi, F_BINS + 1)
    density, edges = nu.f_histogram(edges)
    return LabelSummary(
        levels=LABEL_LEVELS,
        quantiles=quantiles,
        f_edges=edges.tolist(),
        f_probs=(density * np.diff(edges)).tolist(),
    )


def _outer_fields(sol: ComplexitySolution) -> Dict[str, float]:
    g = complex(sol.outer.g)  # type: ignore[attr-defined]
    return {"A": float(sol.outer.A), "g_re": g.real, "g_im": g.imag}  # type: ignore[attr-defined]


def cmd_complexity(config: ComplexityConfig, command: str = "complexity") -> tuple[SolutionRecord, Dict[str, str]]:
    """Resuelve Σ en (q, e, α) y exporta registro, grilla de ν y densidad ρ si se piden."""
    sol = _solve(config)
    record = SolutionRecord(
        command=command,
        config=config.model_dump(mode="json"),
        a=config.a,
        q=config.q,
        alpha=config.alpha,
        mode=config.mode,
        e=sol.e,
        energy=sol.energy,
        sigma=sol.sigma,
        multipliers=sol.multipliers.as_dict(),
        residuals=sol.residuals,
        converged=sol.converged,
        status=sol.status,
        t_nu=sol.t_nu,
        **_outer_fields(sol),
    )
    out_dir = Path(config.out_dir)
    header = _config_header(command, config)
    paths: Dict[str, str] = {}

    if config.band:
        band = energy_band(
            config.q,
            config.alpha,
            config.mode,
            loss=PhaseRetrievalLoss(config.a),
            options=config.solver.solver_options(),
            free=sol if config.free_e else None,
        )
        record.band = BandRecord(e_min=band.e_min, e_star=band.e_star, e_max=band.e_max, sigma_at_star=band.sigma_at_star)

    nu = sol.nu if sol.converged else None
    if nu is not None:
        record.labels = _label_summary(nu)
        law = nu.weight_law()
        if config.bbp:
            result = analyze(law, config.alpha, config.q)
            record.bbp = BBPRecord(
                g_min=result.g_min,
                x_min=result.x_min,
                x2=result.x2,
                d_alpha=result.d_alpha,
                t_nu=result.t_nu,
                w_min=result.w_min,
                x_star=result.x_star,
                w_star=result.w_star,
            )
            e_tag = "free" if config.free_e else f"{config.e:.17g}"
            paths["bbp"] = str(
                write_table(pd.DataFrame([result.to_row(e_tag)]), out_dir / "bbp.csv", columns=BBP_COLUMNS, header=header)
            )
        if config.rho is not None:
            rho = hessian_density(
                law,
                config.alpha,
                config.rho.w_range,
                config.rho.n_points,
                config.rho.eps,
                richardson=config.rho.richardson,
            )
            record.spectrum = SpectrumGrid(w=rho.w.tolist(), rho=rho.density.tolist(), w_min=rho.left_edge)
            paths["rho"] = str(
                write_table(rho.to_frame(), out_dir / "rho.csv", columns=["w", "rho"], header={**header, "w_min": rho.left_edge})
            )
        if config.nu_grid is not None:
            grid = np.linspace(config.nu_grid.lo, config.nu_grid.hi, config.nu_grid.n)
            density = nu.density_on_grid(grid, grid)
            gy, gys = np.meshgrid(grid, grid, indexing="ij")
            frame = {"y": gy.ravel(), "y_star": gys.ravel(), "density": density.ravel()}
            paths["nu"] = str(write_table(pd.DataFrame(frame), out_dir / "nu_grid.csv", columns=list(frame), header=header))
    elif config.bbp or config.rho is not None or config.nu_grid is not None:
        logger.warning("action=%s skipped=labels,bbp,rho,nu reason=%s", command, sol.status)

    paths["solution"] = str(dump_record(record, out_dir / "solution.json"))
    return record, paths


def _run_complexity(config: ComplexityConfig, command: str) -> int:
    record, paths = cmd_complexity(config, command)
    if not record.converged:
        print(f"[WARN] Sin convergencia (status={record.status}). Registro: {paths['solution']}")
        return EXIT_NOT_CONVERGED
    print(f"[OK] sigma={record.sigma:.10g} energy={record.energy:.10g} -> {paths['solution']}")
    return EXIT_OK


# ---------------------------------------------------------------- barridos


def _scan_options(workers: Optional[int], solver: Any, **fields: Any) -> ScanOptions:
    base = ScanOptions.from_settings()
    return replace(
        base,
        workers=workers or base.workers,
        solver=solver.solver_options(),
        tc=solver.tc_options(),
        **fields,
    )


def cmd_phase_diagram(config: PhaseDiagramConfig) -> Dict[str, str]:
    options = _scan_options(
        config.workers,
        config.solver,
        n_coarse=config.n_coarse,
        compute_tc=config.compute_tc,
        compute_bbp=config.compute_bbp,
        refine=config.refine,
    )
    return scan_runner.run(
        config.a,
        config.alpha_grid,
        config.q_grid,
        out_dir=config.out_dir,
        options=options,
        header=_config_header("phase-diagram", config),
    )


def cmd_overlap_band(config: OverlapBandConfig) -> Dict[str, str]:
    options = _scan_options(None, config.solver)
    return scan_runner.run_overlap_band(config.a, config.alpha, config.e, config.q_grid, out_dir=config.out_dir, options=options)


def cmd_simulate(config: SimulateConfig) -> Dict[str, str]:
    # alpha de referencia; cada celda lo reemplaza
    base = GDConfig.model_validate({**config.gd.model_dump(), "alpha": max(config.alpha_grid, default=2.0), "seed": config.seed})
    return gd_runner.run(
        config.grid,
        config.replicates,
        base,
        out_dir=config.out_dir,
        master_seed=config.seed,
        workers=config.workers,
        analyze_hessian=config.analyze_hessian,
        header=_config_header("simulate", config),
    )


def run_compare(config: CompareConfig) -> Dict[str, str]:
    theory = [load_record(path) for path in config.theory]
    experiment = load_record(config.experiment)
    rows = cmd_compare(theory, experiment, outlier_overlap=config.outlier_overlap)
    report = ComparisonReport(config=config.model_dump(mode="json"), rows=rows)
    out_dir = Path(config.out_dir)
    frame = pd.DataFrame([r.model_dump() for r in rows], columns=COMPARE_COLUMNS)
    return {
        "report": str(dump_record(report, out_dir / "comparison.json")),
        "table": str(write_table(frame, out_dir / "comparison.csv", columns=COMPARE_COLUMNS, header=_config_header("compare", config))),
    }


# ---------------------------------------------------------------- parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="Archivo JSON de configuración")
    parser.add_argument("--out-dir", dest="out_dir", default=None, help="Carpeta de salida")


def _add_point(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=float, default=None, help="Parámetro a de la pérdida")
    parser.add_argument("--q", type=float, default=None, help="Overlap q con la señal")
    parser.add_argument("--alpha", type=float, default=None, help="Razón de muestreo n/d")
    parser.add_argument("--mode", choices=["tilde0", "fin", "tc"], default=None)
    parser.add_argument("--e", type=float, default=None, help="Energía fija")
    parser.add_argument("--free-e", dest="free_e", action="store_true", default=None, help="Maximiza en la energía")
    parser.add_argument("--band", action="store_true", default=None, help="Calcula la banda [e_min, e_max]")
    parser.add_argument("--bbp", action="store_true", default=None, help="Analiza el outlier BBP de ν")
    parser.add_argument("--nu-grid", dest="nu_grid", default=None, help="lo,hi,n de la grilla de ν")
    parser.add_argument("--n-points", dest="n_points", type=int, default=None, help="Puntos de la grilla de ρ")
    parser.add_argument("--eps", type=float, default=None, help="Ensanchamiento de Stieltjes-Perron")
    parser.add_argument("--w-range", dest="w_range", default=None, help="lo,hi de la grilla de ρ")
    parser.add_argument("--richardson", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paisaje", description="Paisaje Kac-Rice de recuperación de fase")
    parser.add_argument("--log-level", dest="log_level", default=None, help="Nivel de logging")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("complexity", "Complejidad en un punto (q, e, α)"), ("spectrum", "Densidad ρ de la Hessiana")):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        _add_point(p)

    p = sub.add_parser("phase-diagram", help="Diagrama de fases y curvas de umbral")
    _add_common(p)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--alpha-grid", dest="alpha_grid", default=None, help="Lista separada por comas")
    p.add_argument("--q-grid", dest="q_grid", default=None, help="Lista separada por comas")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--n-coarse", dest="n_coarse", type=int, default=None)
    p.add_argument("--refine", action="store_true", default=None, help="Refina umbrales por bisección")
    p.add_argument("--no-tc", dest="compute_tc", action="store_false", default=None)
    p.add_argument("--no-bbp", dest="compute_bbp", action="store_false", default=None)

    p = sub.add_parser("overlap-band", help="Σ̃₀ en función de q a α y e fijos")
    _add_common(p)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--e", type=float, default=None)
    p.add_argument("--q-grid", dest="q_grid", default=None)

    p = sub.add_parser("simulate", help="Lote de corridas de descenso por gradiente")
    _add_common(p)
    p.add_argument("--alpha-grid", dest="alpha_grid", default=None)
    p.add_argument("--q0-grid", dest="q0_grid", default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--analyze-hessian", dest="analyze_hessian", action="store_true", default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--t-c", dest="t_C", type=int, default=None)
    p.add_argument("--T", dest="T", type=int, default=None)

    p = sub.add_parser("compare", help="Comparación teoría vs experimento")
    _add_common(p)
    p.add_argument("--theory", nargs="+", default=None, help="Registros solution.json")
    p.add_argument("--experiment", default=None, help="gd_pooled.json u otro registro teórico")
    p.add_argument("--outlier-overlap", dest="outlier_overlap", type=float, default=None)
    return parser


def _point_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        key: getattr(args, key) for key in ("a", "q", "alpha", "mode", "e", "free_e", "band", "bbp", "out_dir")
    }
    if args.nu_grid is not None:
        lo, hi, n = ((parse_floats(args.nu_grid) or []) + [None] * 3)[:3]
        overrides["nu_grid"] = {"lo": lo, "hi": hi, "n": n}
    overrides["rho.n_points"] = args.n_points
    overrides["rho.eps"] = args.eps
    overrides["rho.richardson"] = args.richardson
    overrides["rho.w_range"] = parse_floats(args.w_range)
    return overrides


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    if args.command in ("complexity", "spectrum"):
        return _point_overrides(args)
    if args.command == "phase-diagram":
        return {
            "a": args.a,
            "alpha_grid": parse_floats(args.alpha_grid),
            "q_grid": parse_floats(args.q_grid),
            "workers": args.workers,
            "n_coarse": args.n_coarse,
            "refine": args.refine,
            "compute_tc": args.compute_tc,
            "compute_bbp": args.compute_bbp,
            "out_dir": args.out_dir,
        }
    if args.command == "overlap-band":
        return {"a": args.a, "alpha": args.alpha, "e": args.e, "q_grid": parse_floats(args.q_grid), "out_dir": args.out_dir}
    if args.command == "simulate":
        return {
            "alpha_grid": parse_floats(args.alpha_grid),
            "q0_grid": parse_floats(args.q0_grid),
            "replicates": args.replicates,
            "seed": args.seed,
            "workers": args.workers,
            "analyze_hessian": args.analyze_hessian,
            "out_dir": args.out_dir,
            "gd.d": args.d,
            "gd.a": args.a,
            "gd.eta": args.eta,
            "gd.t_C": args.t_C,
            "gd.T": args.T,
        }
    return {
        "theory": args.theory,
        "experiment": args.experiment,
        "outlier_overlap": args.outlier_overlap,
        "out_dir": args.out_dir,
    }


def _paths_handler(action: Callable[[Any], Dict[str, str]]) -> Callable[[Any], int]:
    def handler(config: Any) -> int:
        paths = action(config)
        for name, path in sorted(paths.items()):
            print(f"[OK] {name}: {path}")
        return EXIT_OK

    return handler


_COMMANDS: Dict[str, tuple[type, Callable[[Any], int]]] = {
    "complexity": (ComplexityConfig, lambda c: _run_complexity(c, "complexity")),
    "spectrum": (SpectrumConfig, lambda c: _run_complexity(c, "spectrum")),
    "phase-diagram": (PhaseDiagramConfig, _paths_handler(cmd_phase_diagram)),
    "overlap-band": (OverlapBandConfig, _paths_handler(cmd_overlap_band)),
    "simulate": (SimulateConfig, _paths_handler(cmd_simulate)),
    "compare": (CompareConfig, _paths_handler(run_compare)),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("cli", level=args.log_level or get_settings().log_level)
    model, handler = _COMMANDS[args.command]
    try:
        config = resolve(model, args.config, _overrides(args))
    except (ValidationError, ConfigError, ValueError) as exc:
        print(f"[ERROR] Configuración inválida: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    logger.info("action=main command=%s stage=start", args.command)
    try:
        code = handler(config)
    except KacRiceError as exc:
        logger.warning("action=main command=%s error=%s category=%s", args.command, exc.code, exc.category)
        print(f"[ERROR] {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE if exc.category == "infeasible" else EXIT_NOT_CONVERGED
    except ValueError as exc:
        print(f"[ERROR] Parámetros inválidos: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logger.info("action=main command=%s stage=done exit=%s", args.command, code)
    return code


__all__ = ["build_parser", "cmd_complexity", "cmd_phase_diagram", "cmd_simulate", "main", "run_compare"]
