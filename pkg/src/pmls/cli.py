"""
Command-line front end.

    pmls fit --data FILE --model M --method M --penalty P [--lambda X | --path N] --out DIR
    pmls simulate --study FILE --out DIR [--jobs K] [--verify-theorems]
    pmls surface generate [--scene FILE] --out DIR
    pmls surface compare [--data FILE | --scene FILE] --out DIR
    pmls replay MANIFEST --out DIR

Settings are layered config.yml < --config FILE < flags. Exit codes:

    0  success
    2  data or configuration error, missing file
    3  solver failure or infeasible parameter
    4  a study cell exceeded its replicate-failure budget
"""
import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config import SEED_ENV_VAR, get_base_seed, load_config, load_document, merge_overrides
from models.dataset import Dataset, ResponseScale, load_csv, load_xyz
from models.errors import (
    DataError,
    InfeasibleParameter,
    PMLSError,
    SolverError,
    StudyFailure,
)
from models.mean_functions import ModelKind, ModelSpec
from objectives.objective import Method, ObjectiveSpec
from penalties.penalty import PenaltyFamily, PenaltySpec
from pmls import __version__
from pmls.manifest import RunManifest, load_manifest
from simharness import StudyConfig, run_study, verify_theorems, write_tables, write_text_table
from solver import Initialization, SolverConfig, fit, lambda_path, single_index_start, summary_lines, write_result
from surface import SurfaceScene, compare_methods, generate_scene, log_linear_start, write_xyz

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA = 2
EXIT_SOLVER = 3
EXIT_STUDY = 4

DEBUG_ENV_VAR = "PMLS_DEBUG"
# zeros is a saddle point for models that are nonlinear in theta
DEFAULT_NONLINEAR_RESTARTS = 3


def configure_logging(out_dir: Path, debug: bool = False, settings: Optional[Dict[str, Any]] = None) -> None:
    """Root logger: rotating file inside ``out_dir`` plus stdout."""
    if not debug:
        debug = os.environ.get(DEBUG_ENV_VAR, "").lower() in ("true", "1", "yes")
    log_level = logging.DEBUG if debug else logging.INFO
    log_settings = (settings or {}).get("logging") or {}

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    file_handler = RotatingFileHandler(
        out_dir / log_settings.get("file", "pmls.log"),
        maxBytes=int(log_settings.get("max_bytes", 10 * 1024 * 1024)),
        backupCount=int(log_settings.get("backup_count", 3)),
    )
    file_handler.setLevel(log_level)
    file_handler.setFormatter(formatter)
    root_logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if debug:
        logger.info("Debug logging enabled")


def _resolve_seed(args: argparse.Namespace, settings: Dict[str, Any], document_seed: Optional[int] = None) -> int:
    """--seed, then MLS_SEED, then the input document's seed, then config.yml."""
    if args.seed is not None:
        return int(args.seed)
    if document_seed is not None and not os.environ.get(SEED_ENV_VAR, "").strip():
        return int(document_seed)
    return get_base_seed(settings)


def _parse_exempt(text: Optional[str]) -> List[int]:
    if not text:
        return []
    try:
        return sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError as e:
        raise DataError(f"--exempt expects comma-separated indices, got {text!r}") from e


def _load_fit_data(path: str, scale: str) -> Dataset:
    if Path(path).suffix.lower() == ".xyz":
        return load_xyz(path)
    return load_csv(path, scale)


def _fit_start(spec: ObjectiveSpec, data: Dataset) -> Optional[np.ndarray]:
    """Least-squares start for the log-linear model, scaled so the anchor is 1;
    single-index start for the logistic model."""
    if spec.model.kind is ModelKind.LOGISTIC:
        return single_index_start(spec, data)
    if spec.model.kind is not ModelKind.LOG_LINEAR:
        return None
    magnitude = data.response if data.scale is ResponseScale.RAW else np.exp(data.response)
    start = log_linear_start(data.covariates, magnitude)
    if spec.anchor is not None:
        if start[spec.anchor] <= 0:
            raise DataError(
                f"Least-squares start has a non-positive anchor coordinate {spec.anchor}"
            )
        start = start / start[spec.anchor]
    return start


def run_fit(run: Dict[str, Any], settings: Dict[str, Any], seeds: Dict[str, int], out_dir: Path, jobs: int) -> Dict[str, str]:
    data = _load_fit_data(run["data"], run["scale"])
    method = Method(run["method"])
    if method is not Method.ADDITIVE:
        data = data.log_scale()
    model = ModelSpec.for_covariates(run["model"], data.n_covariates)
    anchor = run.get("anchor")
    penalty = PenaltySpec.from_config(run["penalty"], run.get("lambda") or 0.0, settings)
    exempt = frozenset(run.get("exempt", []))
    log_scale = frozenset({0}) & exempt if model.kind is ModelKind.LOGISTIC else frozenset()
    spec = ObjectiveSpec(method, model, penalty, exempt=exempt, anchor=anchor, log_scale=log_scale)

    restarts = int((settings.get("solver") or {}).get("random_restarts", 0))
    if not model.is_linear_in_theta:
        restarts = max(restarts, DEFAULT_NONLINEAR_RESTARTS)
    solver_config = SolverConfig.from_config(settings, random_restarts=restarts, restart_seed=seeds["base"])
    start = _fit_start(spec, data)
    if start is not None:
        keep = solver_config.random_restarts if model.kind is ModelKind.LOGISTIC else 0
        solver_config = solver_config.with_start(start, Initialization.PROVIDED, random_restarts=keep)

    if run.get("lambda") is not None or penalty.family is PenaltyFamily.NONE:
        result = fit(spec, data, solver_config)
        name = "fit.json"
    else:
        result = lambda_path(spec, data, solver_config, int(run["grid_size"]))
        name = "path.json"
    write_result(result, out_dir / name)
    (out_dir / "summary.txt").write_text("\n".join(summary_lines(result)) + "\n")
    return {"result": name, "summary": "summary.txt"}


def run_simulate(run: Dict[str, Any], settings: Dict[str, Any], seeds: Dict[str, int], out_dir: Path, jobs: int) -> Dict[str, str]:
    study = StudyConfig.from_dict(run["study"], base_seed=seeds["base"])
    results = run_study(study, jobs=jobs, config=settings)
    artifacts = {name: path.name for name, path in write_tables(results, out_dir).items()}
    artifacts["text"] = write_text_table(results, out_dir / "tables.txt").name
    if run.get("verify_theorems"):
        report = verify_theorems(study, jobs=jobs, config=settings)
        (out_dir / "theorems.txt").write_text(report.to_text() + "\n")
        artifacts["theorems"] = "theorems.txt"
        if not report.passed:
            logger.warning("Some theorem checks failed, see theorems.txt")
    return artifacts


def run_surface_generate(run: Dict[str, Any], settings: Dict[str, Any], seeds: Dict[str, int], out_dir: Path, jobs: int) -> Dict[str, str]:
    scene = SurfaceScene.from_dict(run["scene"])
    write_xyz(generate_scene(scene, seeds["scene"]), out_dir / "cloud.xyz")
    return {"cloud": "cloud.xyz"}


def run_surface_compare(run: Dict[str, Any], settings: Dict[str, Any], seeds: Dict[str, int], out_dir: Path, jobs: int) -> Dict[str, str]:
    artifacts = {}
    if run.get("data"):
        data = load_xyz(run["data"])
    else:
        scene = SurfaceScene.from_dict(run["scene"])
        data = generate_scene(scene, seeds["scene"])
        write_xyz(data, out_dir / "cloud.xyz")
        artifacts["cloud"] = "cloud.xyz"
    table = compare_methods(data, run["penalty"], settings, int(run["grid_size"]))
    table.to_csv(out_dir / "comparison.csv")
    (out_dir / "comparison.txt").write_text(table.to_text() + "\n")
    artifacts.update({"comparison": "comparison.csv", "text": "comparison.txt"})
    return artifacts


RUNNERS: Dict[str, Callable[..., Dict[str, str]]] = {
    "fit": run_fit,
    "simulate": run_simulate,
    "surface-generate": run_surface_generate,
    "surface-compare": run_surface_compare,
}


def _execute(
    subcommand: str,
    run: Dict[str, Any],
    settings: Dict[str, Any],
    seeds: Dict[str, int],
    out_dir: Path,
    jobs: int,
) -> int:
    artifacts = RUNNERS[subcommand](run, settings, seeds, out_dir, jobs)
    manifest = RunManifest(
        subcommand=subcommand,
        config={"settings": settings, "run": run},
        seeds=seeds,
        artifacts=artifacts,
    )
    manifest.write(out_dir)
    logger.info(f"{subcommand} finished, outputs in {out_dir}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    if args.lambda_ is not None and args.path is not None:
        raise DataError("--lambda and --path are mutually exclusive")
    run = {
        "data": str(Path(args.data).resolve()),
        "scale": args.scale,
        "model": args.model,
        "method": args.method,
        "penalty": args.penalty,
        "lambda": args.lambda_,
        "grid_size": args.path if args.path is not None else int(settings["path"]["grid_size"]),
        "exempt": _parse_exempt(args.exempt),
        "anchor": args.anchor,
    }
    if run["anchor"] is None and args.model == ModelKind.LOG_LINEAR.value and args.method == Method.PMLS.value:
        run["anchor"] = 0
    if args.exempt is None and args.model == ModelKind.LOGISTIC.value:
        run["exempt"] = [0]
    seeds = {"base": _resolve_seed(args, settings)}
    return _execute("fit", run, settings, seeds, args.out, args.jobs)


def cmd_simulate(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    document = load_document(args.study)
    seed = _resolve_seed(args, settings, document.get("base_seed"))
    study = StudyConfig.from_dict(document, base_seed=seed, defaults=settings.get("study"))
    if args.repetitions is not None:
        study = study.with_overrides(repetitions=args.repetitions)
    run = {"study": study.to_dict(), "verify_theorems": bool(args.verify_theorems)}
    return _execute("simulate", run, settings, {"base": seed}, args.out, args.jobs)


def cmd_surface(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    document = load_document(args.scene) if args.scene else {}
    scene = SurfaceScene.from_dict(document)
    seeds = {"scene": _resolve_seed(args, settings, document.get("seed"))}
    if args.action == "generate":
        return _execute("surface-generate", {"scene": scene.to_dict()}, settings, seeds, args.out, args.jobs)
    run = {
        "data": str(Path(args.data).resolve()) if args.data else None,
        "scene": scene.to_dict(),
        "penalty": args.penalty,
        "grid_size": args.path if args.path is not None else int(settings["path"]["grid_size"]),
    }
    return _execute("surface-compare", run, settings, seeds, args.out, args.jobs)


def cmd_replay(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    manifest = load_manifest(args.manifest)
    logger.info(f"Replaying {manifest.subcommand} run recorded by pmls {manifest.version}")
    return _execute(
        manifest.subcommand,
        manifest.config["run"],
        manifest.config["settings"],
        manifest.seeds,
        args.out,
        args.jobs,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, type=Path, help="Output directory (created if missing).")
    common.add_argument("--config", default=None, help="JSON or YAML settings layered over config.yml.")
    common.add_argument("--seed", type=int, default=None, help=f"Base seed (default: {SEED_ENV_VAR}, then config.yml).")
    common.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="Worker threads for replicate-level work. Threads share the GIL: NumPy calls run in "
        "parallel, the per-coordinate Python loop does not.",
    )
    common.add_argument("--debug", action="store_true", help=f"Verbose logging (also {DEBUG_ENV_VAR}=1).")

    parser = argparse.ArgumentParser(
        prog="pmls", description="Penalized modified least squares for multiplicative spatial errors."
    )
    parser.add_argument("--version", action="version", version=f"pmls {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    fit_parser = commands.add_parser("fit", parents=[common], help="Fit one model or a lambda path.")
    fit_parser.add_argument("--data", required=True, help="Dataset CSV (s1,s2,x1..xk,response) or .xyz cloud.")
    fit_parser.add_argument("--scale", choices=[s.value for s in ResponseScale], default=ResponseScale.RAW.value)
    fit_parser.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    fit_parser.add_argument("--method", required=True, choices=[m.value for m in Method])
    fit_parser.add_argument("--penalty", default=PenaltyFamily.NONE.value, choices=[p.value for p in PenaltyFamily])
    fit_parser.add_argument("--lambda", dest="lambda_", type=float, default=None, help="Single tuning parameter.")
    fit_parser.add_argument("--path", "--grid-size", dest="path", type=int, default=None,
                            help="Lambda path length with BIC selection.")
    fit_parser.add_argument("--exempt", default=None,
                            help="Comma-separated penalty-exempt theta indices (default 0 for logistic).")
    fit_parser.add_argument("--anchor", type=int, default=None,
                            help="Theta index held at its start (default 0 for loglinear PMLS).")
    fit_parser.set_defaults(handler=cmd_fit)

    simulate_parser = commands.add_parser("simulate", parents=[common], help="Run a Monte Carlo study.")
    simulate_parser.add_argument("--study", required=True, help="Study file (JSON or YAML).")
    simulate_parser.add_argument("--repetitions", type=int, default=None, help="Override the study's R.")
    simulate_parser.add_argument("--verify-theorems", action="store_true",
                                 help="Also run the empirical asymptotic checks.")
    simulate_parser.set_defaults(handler=cmd_simulate)

    surface_parser = commands.add_parser("surface", parents=[common], help="Synthetic point-cloud pipeline.")
    surface_parser.add_argument("action", choices=["generate", "compare"])
    surface_parser.add_argument("--scene", default=None, help="Scene file (JSON or YAML).")
    surface_parser.add_argument("--data", default=None, help="Existing x y z cloud to compare on.")
    surface_parser.add_argument("--penalty", default=PenaltyFamily.SCAD.value,
                                choices=[PenaltyFamily.LASSO.value, PenaltyFamily.SCAD.value])
    surface_parser.add_argument("--path", "--grid-size", dest="path", type=int, default=None)
    surface_parser.set_defaults(handler=cmd_surface)

    replay_parser = commands.add_parser("replay", parents=[common], help="Re-run from a run manifest.")
    replay_parser.add_argument("manifest", help="run_manifest.json or a run directory.")
    replay_parser.set_defaults(handler=cmd_replay)
    return parser


def _settings(args: argparse.Namespace) -> Dict[str, Any]:
    settings = load_config()
    if args.config:
        settings = merge_overrides(settings, load_document(args.config))
    return settings


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"Cannot create output directory {args.out}: {e}", file=sys.stderr)
        return EXIT_DATA

    try:
        settings = _settings(args)
        configure_logging(args.out, args.debug, settings)
        if args.jobs is None:
            args.jobs = int((settings.get("study") or {}).get("jobs", 1))
        return args.handler(args, settings)
    except StudyFailure as e:
        logger.error(f"Study failed: {e}")
        return EXIT_STUDY
    except (SolverError, InfeasibleParameter) as e:
        logger.error(f"Solver failure: {e}")
        return EXIT_SOLVER
    except (DataError, FileNotFoundError, OSError) as e:
        logger.error(f"Input error: {e}")
        return EXIT_DATA
    except PMLSError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
