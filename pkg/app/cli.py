"""
Command-line front end

Usage:
    python run.py verify --input povm.json --t 2
    python run.py analyze --catalog mub_d4
    python run.py optimize --config optimizer.json --output result.json
    python run.py nested --catalog mub_d4 --k 1
    python run.py tomography --catalog hoggar1 --noise 0.01 --trials 1000 --seed 7
    python run.py catalog list
    python run.py catalog export appendix_b --output appendix_b.json

Exit codes: 0 success or saturated, 1 verified false, 2 input error.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from . import __version__
from .config import OPTIMIZER_ACCEPT_GAP, VERDICT_TOL, Settings
from .models.errors import PovmLoadError, PreconditionError, StructureError, TightPovmError
from .models.quantum import Povm
from .models.schemas import OptimizerConfig
from .services import entanglement, nested, povm as povm_ops
from .services.catalog import catalog_service
from .services.optimizer import frame_optimizer
from .services.tomography import NOISE_MODELS, tomography_service
from .utils.helpers import (
    format_error_response,
    format_success_response,
    load_povm_document,
    write_report,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s: %(message)s"

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2

Report = Tuple[Dict[str, Any], int]


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or Settings.log_level()).upper()
    handlers = [logging.StreamHandler(sys.stderr)]
    log_file = Settings.log_file()
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, handlers=handlers, force=True)


def _load_source(parsed) -> Tuple[Povm, Optional[float], str]:
    """POVM from --input or --catalog, plus the tolerance the source suggests"""
    if getattr(parsed, "catalog", None):
        name = parsed.catalog
        entry = catalog_service.entry(name)
        suggested = entry.tolerance if entry.tolerance > VERDICT_TOL else None
        return catalog_service.get(name), suggested, f"catalog:{name}"
    if not getattr(parsed, "input", None):
        raise PovmLoadError("Provide --input FILE or --catalog NAME")
    doc = load_povm_document(parsed.input)
    return doc.to_povm(), doc.tolerance, parsed.input


def cmd_verify(parsed) -> Report:
    povm, suggested, source = _load_source(parsed)
    tol = parsed.tol if parsed.tol is not None else suggested
    orders = sorted({1, 2, parsed.t})
    verdicts = {str(t): povm_ops.verify_design(povm, t, tol) for t in orders}
    requested = verdicts[str(parsed.t)]
    data = {
        "source": source,
        "name": povm.name,
        "m": povm.m,
        "dimension": povm.dimension,
        "parties": list(povm.structure.dims),
        "is_ic": povm_ops.verify_ic(povm),
        "identity_defect": povm_ops.identity_defect(povm),
        "verdicts": {t: v.model_dump() for t, v in verdicts.items()},
        "saturated": requested.is_saturated,
    }
    config = {"t": parsed.t, "tol": requested.tolerance}
    code = EXIT_OK if requested.is_saturated else EXIT_FALSE
    return format_success_response(data, config=config), code


def cmd_analyze(parsed) -> Report:
    povm, suggested, source = _load_source(parsed)
    tol = parsed.tol if parsed.tol is not None else suggested
    profile = entanglement.profile_povm(povm, tol)
    structure = povm.structure
    ks = [parsed.k] if parsed.k else list(range(1, structure.n_parties // 2 + 1))
    bounds, lubkin = [], {}
    for k in ks:
        lubkin[str(k)] = entanglement.lubkin_deviation(povm, k)
        if structure.is_uniform:
            bounds.append(entanglement.separability_report(povm, k, profile).model_dump())
    data = {
        "source": source,
        "name": povm.name,
        "profile": profile.model_dump(),
        "separable_count": profile.separable_count,
        "separability_bounds": bounds,
        "lubkin_deviation": lubkin,
        "average_entropy": entanglement.average_reduction_entropy(povm),
        "isoentangled": entanglement.is_isoentangled(povm, profile.tolerance),
    }
    return format_success_response(data, config={"k": ks, "tol": profile.tolerance}), EXIT_OK


def cmd_optimize(parsed) -> Report:
    if not parsed.config:
        raise PovmLoadError("optimize needs --config FILE")
    try:
        with open(parsed.config, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise PovmLoadError(f"Cannot read {parsed.config}: {e}") from e
    except json.JSONDecodeError as e:
        raise PovmLoadError(f"{parsed.config} line {e.lineno} column {e.colno}: {e.msg}") from e
    if parsed.seed is not None:
        raw["seed"] = parsed.seed
    cfg = OptimizerConfig.model_validate(raw)
    result = frame_optimizer.minimize(cfg)
    accept = parsed.tol if parsed.tol is not None else OPTIMIZER_ACCEPT_GAP
    data = result.model_dump()
    data["accepted"] = result.relative_gap <= accept
    code = EXIT_OK if data["accepted"] else EXIT_FALSE
    return format_success_response(data, config=cfg.model_dump()), code


def cmd_nested(parsed) -> Report:
    povm, suggested, source = _load_source(parsed)
    tol = parsed.tol if parsed.tol is not None else suggested
    k = parsed.k or 1
    verdicts = nested.verify_nested(povm, k, tol=tol, classify_tol=tol)
    result = nested.is_nested(verdicts)
    data = {
        "source": source,
        "name": povm.name,
        "k": k,
        "nested": result,
        "verdicts": [v.model_dump() for v in verdicts],
    }
    return format_success_response(data, config={"k": k, "tol": tol}), EXIT_OK if result else EXIT_FALSE


def _load_baseline(value: Optional[str]) -> Optional[Povm]:
    """--baseline names a catalog entry or a POVM file"""
    if not value:
        return None
    if value in catalog_service.names():
        return catalog_service.get(value)
    return load_povm_document(value).to_povm()


def cmd_tomography(parsed) -> Report:
    povm, suggested, source = _load_source(parsed)
    tol = parsed.tol if parsed.tol is not None else suggested
    seed = parsed.seed if parsed.seed is not None else 0
    report = tomography_service.run(
        povm,
        baseline=_load_baseline(parsed.baseline),
        noise=parsed.noise,
        trials=parsed.trials,
        seed=seed,
        noise_model=parsed.noise_model,
        tol=tol,
    )
    config = {
        "noise": parsed.noise,
        "trials": parsed.trials,
        "seed": seed,
        "noise_model": parsed.noise_model,
        "baseline": parsed.baseline,
    }
    return format_success_response(report.model_dump(), config=config), EXIT_OK


def cmd_catalog(parsed) -> Report:
    if parsed.action == "list":
        return format_success_response(catalog_service.list_entries()), EXIT_OK
    if not parsed.name:
        raise PovmLoadError("catalog export needs an entry name")
    if parsed.output:
        doc = catalog_service.export(parsed.name, parsed.output)
        # the file itself is the output; keep the report short
        parsed.output = None
        return format_success_response({"name": doc.name, "m": len(doc.vectors)}, message="exported"), EXIT_OK
    return format_success_response(catalog_service.document(parsed.name).model_dump(exclude_none=True)), EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "nested": cmd_nested,
    "tomography": cmd_tomography,
    "catalog": cmd_catalog,
}


def render_text(value: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {item}")
        return "\n".join(lines)
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return f"{pad}{value}"
        return "\n".join(f"{pad}-\n{render_text(v, indent + 1)}" for v in value)
    return f"{pad}{value}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output', '-o', help='Write the JSON report (or exported POVM) to this file')
    common.add_argument('--format', choices=['json', 'text'], default='json', help='Console output format')
    common.add_argument('--log-level', help='Logging level (default from QTIGHT_LOG_LEVEL or INFO)')

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument('--input', '-i', help='POVM JSON file')
    group.add_argument('--catalog', '-c', help='Built-in catalog entry name')
    source.add_argument('--tol', type=float, help='Verification tolerance (defaults per source)')

    parser = argparse.ArgumentParser(description='Tight IC-POVM toolkit')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('verify', parents=[common, source], help='Frame potential vs Welch bound, IC check')
    p.add_argument('--t', type=int, default=2, help='Design order whose saturation sets the exit code')

    p = sub.add_parser('analyze', parents=[common, source], help='Entanglement profile and separability bound')
    p.add_argument('--k', type=int, help='Reduction size (default: every k up to N/2)')

    p = sub.add_parser('optimize', parents=[common], help='Minimize the frame potential')
    p.add_argument('--config', required=True, help='Optimizer config JSON')
    p.add_argument('--seed', type=int, help='Override the config seed')
    p.add_argument('--tol', type=float, help=f'Accepted relative gap (default {OPTIMIZER_ACCEPT_GAP})')

    p = sub.add_parser('nested', parents=[common, source], help='Nested tightness over all k-subsets')
    p.add_argument('--k', type=int, default=1, help='Subset size')

    p = sub.add_parser('tomography', parents=[common, source], help='Noisy reconstruction vs product baseline')
    p.add_argument('--noise', type=float, default=0.01, help='Noise level epsilon in [0, 1]')
    p.add_argument('--trials', type=int, default=1000, help='Number of random states')
    p.add_argument('--seed', type=int, help='Random seed (default 0)')
    p.add_argument('--noise-model', default='uniform_additive', choices=sorted(NOISE_MODELS))
    p.add_argument('--baseline', help='Baseline POVM: catalog entry or JSON file (default: product of qubit SICs)')

    p = sub.add_parser('catalog', parents=[common], help='List or export built-in measurements')
    p.add_argument('action', choices=['list', 'export'])
    p.add_argument('name', nargs='?', help='Entry to export')
    return parser


def cli_main(args=None) -> int:
    parser = build_parser()
    parsed = parser.parse_args(args=args)
    configure_logging(parsed.log_level)

    try:
        report, code = COMMANDS[parsed.command](parsed)
    except (PovmLoadError, PreconditionError, StructureError, ValidationError, KeyError, OSError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        logger.error(f"❌ {parsed.command}: {message}")
        report, code = format_error_response(message, type(e).__name__), EXIT_INPUT
    except TightPovmError as e:
        logger.error(f"❌ {parsed.command}: {e}")
        report, code = format_error_response(str(e), type(e).__name__), EXIT_FALSE

    text = write_report(report, parsed.output if report.get("success") else None)
    print(render_text(report) if parsed.format == "text" else text)
    return code


if __name__ == "__main__":
    raise SystemExit(cli_main(sys.argv[1:]))
