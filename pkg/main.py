"""Main entry point for the NCCW diagonal engine."""
import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.config import config
from core.appbr import build_appbr, graphs_isomorphic
from core.classify import center_spectrum, decide_conjugacy, decide_via_spectrum
from core.congruence import congruence_test
from core.invariants import (
    bisection_census,
    compare_towers,
    end_count_formula,
    ends_tree,
    invariant_sequence,
    k33_witness,
)
from core.nccw import dualize, validate_nccw
from core.spectrum import analyze, graph_homeomorphic, spec_b, spec_b_gen
from core.tower import build_seed_stage, build_stage, max_depth
from models.dual import TwistPerm
from models.errors import ConditionError, InputError, NccwError, PreconditionError
from models.results import RunManifest
from models.tower import Flavor, Toggle, Tower, TowerInput
from parsing import load_classify_input, load_tower_input, twist_from_cycles
from utils.export import dumps, stage_snapshot, topgraph_to_dot, topgraph_to_json, write_atomic
from utils.logger import setup_logger
from utils.run_logger import RunLogger
from validators import check_conditions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONJUGATE = 3
EXIT_CONDITION = 4


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


def _toggle_list(text: str) -> List[Toggle]:
    try:
        return [Toggle(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"unknown toggle in '{text}'") from e


def parse_args(argv: Optional[List[str]] = None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Conjugacy of C*-diagonals in 1-dimensional NCCW complexes and Menger-curve towers"
    )
    parser.add_argument(
        '--config',
        type=str,
        default=None,
        help='Path to configuration file (default: config/config.yaml)'
    )
    parser.add_argument(
        '--log-level',
        type=str,
        default=None,
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        help='Logging level (overrides config)'
    )
    parser.add_argument('--out', type=str, default=None, help='Output directory (overrides config)')
    parser.add_argument('--seed', type=int, default=None, help='Seed for randomized sweeps')
    parser.add_argument('--format', type=str, default=None, choices=['text', 'json', 'dot'],
                        help='Output format (default from config)')

    sub = parser.add_subparsers(dest='command', required=True)

    validate = sub.add_parser('validate', help='Validate NCCW boundary data')
    validate.add_argument('--input', required=True)

    classify = sub.add_parser('classify', help='Decide conjugacy of two diagonals')
    classify.add_argument('--input', required=True)
    classify.add_argument('--sigma', default='id', help="Twist name from the input document, or 'id'")
    classify.add_argument('--tau', default='id', help="Twist name from the input document, or 'id'")
    classify.add_argument('--method', default='graph', choices=['graph', 'spectrum'])

    spectrum = sub.add_parser('spectrum', help='Export a diagonal spectrum')
    spectrum.add_argument('--input', required=True)
    spectrum.add_argument('--sigma', default='id')
    spectrum.add_argument('--center', action='store_true', help='Export the spectrum of the centre instead')

    appbr = sub.add_parser('appbr', help='Congruence versus graph isomorphism on the appBR family')
    appbr.add_argument('--nu', type=int, default=6)
    appbr.add_argument('--delta', type=int, default=3)

    tower = sub.add_parser('tower', help='Build a tower and check its conditions')
    tower.add_argument('--input', required=True)
    tower.add_argument('--depth', type=int, default=3)
    tower.add_argument('--toggles', type=_toggle_list, default=None)
    tower.add_argument('--sccb', type=_int_list, default=None, help='Insertion counts per level, e.g. "1,0,0"')
    tower.add_argument('--k33', action='store_true')
    tower.add_argument('--ends', type=int, nargs='?', const=-1, default=None,
                       help="Ends tree, optionally deeper than --depth; the tower is built that far")
    tower.add_argument('--invariants', action='store_true')

    compare = sub.add_parser('compare', help='Separate two towers by their count invariants')
    compare.add_argument('--input', required=True)
    compare.add_argument('--other', default=None, help='Second tower document (default: --input)')
    compare.add_argument('--depth', type=int, default=3)
    compare.add_argument('--sccb', type=_int_list, default=None)
    compare.add_argument('--sccb-other', type=_int_list, default=None)

    return parser.parse_args(argv)


class Run:
    """Output directory, format and structured run log of one invocation."""

    def __init__(self, args, manifest: RunManifest):
        self.manifest = manifest
        self.out = Path(manifest.output_dir)
        self.fmt = args.format or config.get('cli.default_format', 'json')
        digest = hashlib.sha256(dumps(manifest).encode()).hexdigest()[:12]
        self.run_id = f"{manifest.command}-{digest}"
        self.log = RunLogger.get_structured_logger(self.run_id, config.get('logging.run_log_dir', 'logs/runs'))
        RunLogger.log_run_event(self.log, "run_started", command=manifest.command, inputs=manifest.inputs)

    def write(self, name: str, payload: Any, text: Optional[str] = None) -> Path:
        if self.fmt == 'text' and text is not None:
            path = write_atomic(self.out / f"{name}.txt", text)
        else:
            path = write_atomic(self.out / f"{name}.json", dumps(payload))
        RunLogger.log_run_event(self.log, "artifact_written", path=str(path))
        return path

    def close(self, code: int) -> int:
        RunLogger.log_run_event(self.log, "run_finished", exit_code=code)
        RunLogger.close_logger(self.run_id)
        return code


def _twist(doc, dual, name: str) -> TwistPerm:
    if name == 'id':
        return TwistPerm.identity()
    if name not in doc.twists:
        raise InputError(f"Twist '{name}' is not defined in the input document")
    return twist_from_cycles(dual, doc.twists[name])


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args, run: Run) -> int:
    doc = load_classify_input(args.input)
    report = validate_nccw(doc.data)
    text = "\n".join([f"status: {report.status}"] + [f"error: {e}" for e in report.errors]
                     + [f"warning: {w}" for w in report.warnings]) + "\n"
    run.write("validate", report, text)
    return EXIT_INPUT if report.has_errors() else EXIT_OK


def cmd_classify(args, run: Run) -> int:
    doc = load_classify_input(args.input)
    report = validate_nccw(doc.data)
    if report.has_errors():
        raise InputError("invalid NCCW data: " + "; ".join(report.errors))
    dual = dualize(doc.data)
    sigma, tau = _twist(doc, dual, args.sigma), _twist(doc, dual, args.tau)
    if args.method == 'spectrum':
        decision = decide_via_spectrum(doc.data, sigma, tau)
    else:
        decision = decide_conjugacy(doc.data, sigma, tau)
    text = f"verdict: {decision.verdict.value}\nmethod: {decision.method}\n"
    if decision.obstruction:
        text += f"obstruction: {decision.obstruction}\n"
    run.write("classify", decision, text)
    RunLogger.log_run_event(run.log, "decision", verdict=decision.verdict.value, method=decision.method)
    return EXIT_OK if decision.conjugate else EXIT_NOT_CONJUGATE


def cmd_spectrum(args, run: Run) -> int:
    doc = load_classify_input(args.input)
    if args.center:
        graph = center_spectrum(doc.data)
    else:
        dual = dualize(doc.data)
        graph = spec_b(dual, _twist(doc, dual, args.sigma))
    summary = analyze(graph)
    if run.fmt == 'dot':
        path = write_atomic(run.out / "spectrum.dot", topgraph_to_dot(graph))
        RunLogger.log_run_event(run.log, "artifact_written", path=str(path))
    else:
        run.write("spectrum", {"graph": topgraph_to_json(graph), "summary": summary},
                  f"pi0: {summary.pi0}\nfree ends: {summary.free_ends}\n")
    return EXIT_OK


def cmd_appbr(args, run: Run) -> int:
    instance = build_appbr(args.nu, args.delta)
    congruence = congruence_test(instance.m_sigma, instance.m_tau)
    isomorphic = graphs_isomorphic(instance.m_sigma, instance.m_tau)
    decision = decide_conjugacy(instance.data, instance.sigma, instance.tau)
    dual = dualize(instance.data)
    homeomorphic = graph_homeomorphic(spec_b(dual, instance.sigma), spec_b(dual, instance.tau))
    payload = {
        "nu": instance.nu,
        "delta": instance.delta,
        "m": instance.m,
        "m_sigma": instance.m_sigma,
        "m_tau": instance.m_tau,
        "congruent": congruence.congruent,
        "congruence_reason": congruence.reason,
        "graphs_isomorphic": isomorphic,
        "conjugacy": decision.verdict.value,
        "obstruction": decision.obstruction,
        "spectra_homeomorphic": homeomorphic.homeomorphic,
    }
    text = "".join(f"{key}: {payload[key]}\n" for key in (
        "congruent", "congruence_reason", "graphs_isomorphic", "conjugacy", "spectra_homeomorphic"))
    run.write("appbr", payload, text)
    return EXIT_OK


def _family(doc: TowerInput, toggles: Optional[List[Toggle]], sccb: Optional[List[int]]):
    update: Dict[str, Any] = {}
    if toggles is not None:
        update["toggles"] = toggles
    if sccb is not None:
        update["sccb"] = sccb
    return doc.family.model_copy(update=update)


def _seed_stage(doc: TowerInput, family):
    twist = twist_from_cycles(dualize(doc.seed), doc.seed_twist) if doc.seed_twist else None
    return build_seed_stage(doc.seed, family, twist)


def _build(doc: TowerInput, family, depth: int) -> Tower:
    cap = max_depth(family)
    if depth < 1 or depth > cap:
        raise PreconditionError(f"depth must lie in [1, {cap}], got {depth}")
    tower = Tower(seed=doc.seed, connector=doc.connector, family=family, seed_twist=doc.seed_twist)
    tower.stages.append(_seed_stage(doc, family))
    while tower.depth < depth:
        tower.stages.append(build_stage(tower.stages[-1], doc.connector, family))
    return tower


def cmd_tower(args, run: Run) -> int:
    doc = load_tower_input(args.input)
    family = _family(doc, args.toggles, args.sccb)
    target = max(args.depth, args.ends) if args.ends is not None else args.depth
    cap = max_depth(family)
    if args.depth < 1 or target > cap:
        raise PreconditionError(f"depth must lie in [1, {cap}], got {target}")

    tower = Tower(seed=doc.seed, connector=doc.connector, family=family, seed_twist=doc.seed_twist)
    levels: List[Dict[str, Any]] = []
    code = EXIT_OK
    failure: Optional[Dict[str, Any]] = None
    try:
        tower.stages.append(_seed_stage(doc, family))
        while True:
            stage = tower.stages[-1]
            entry: Dict[str, Any] = {
                "level": stage.level,
                "counts": stage.counts(),
                "x_counts": {i: len(block) for i, block in stage.dual.x_blocks.items()},
                "pi0": analyze(spec_b_gen(stage)).pi0,
            }
            failed: List[str] = []
            if stage.level > 1:
                report = check_conditions(tower.stages[-2], stage, doc.connector, family)
                entry["conditions"] = report.summary()
                entry["failures"] = [{"name": r.name, "message": r.message, "witness": r.witness,
                                      "required": r.required} for r in report.failures()]
                failed = [r.name for r in report.failures()]
                if report.first_failure(required_only=True) is not None:
                    code = EXIT_CONDITION
            levels.append(entry)
            RunLogger.log_stage(run.log, stage.level, entry["counts"], entry["pi0"], failed)
            if tower.depth >= target:
                break
            tower.stages.append(build_stage(stage, doc.connector, family))
    except ConditionError as e:
        failure = {"condition": e.condition, "message": str(e), "witness": e.witness}
        code = EXIT_CONDITION

    result: Dict[str, Any] = {"flavor": family.construction.value, "levels": levels, "failure": failure}
    if failure is None and args.invariants:
        result["invariants"] = invariant_sequence(tower, tower.depth)
        result["bisection_census"] = bisection_census(tower, tower.depth)
    if failure is None and args.ends is not None:
        depth = tower.depth if args.ends < 0 else args.ends
        tree = ends_tree(tower, depth)
        result["ends"] = {"counts": tree.leaf_counts(), "formula": end_count_formula(tower, depth),
                          "min_branching": tree.min_branching, "verdict": tree.verdict,
                          "materialized": tree.materialized}
    if failure is None and args.k33 and family.construction == Flavor.PATH:
        result["k33"] = _k33_all(tower)

    text = "".join(f"level {entry['level']}: counts {entry['counts']} pi0 {entry['pi0']} "
                   f"conditions {entry.get('conditions', {})}\n" for entry in levels)
    if failure is not None:
        text += f"failure: {failure['message']}\n"
    run.write("tower", result, text)
    return code


def _k33_all(tower: Tower) -> List[Dict[str, Any]]:
    interval = (config.get('tower.k33_interval_low', 0.25), config.get('tower.k33_interval_high', 0.75))
    found = []
    for n in range(1, tower.depth - 1):
        graph = spec_b_gen(tower.stage(n + 2))
        for y in tower.stage(n).dual.Y:
            certificate = k33_witness(tower, n, (interval, y), graph=graph)
            found.append({"base_level": n, "level": certificate.level, "edge": y,
                          "left": certificate.witness.left, "right": certificate.witness.right,
                          "paths": certificate.edges})
    return found


def cmd_compare(args, run: Run) -> int:
    first = load_tower_input(args.input)
    second = load_tower_input(args.other) if args.other else first
    t1 = _build(first, _family(first, None, args.sccb), args.depth)
    t2 = _build(second, _family(second, None, args.sccb_other), args.depth)
    comparison = compare_towers(t1, t2, args.depth)
    text = (f"distinguished: {comparison.distinguished}\nlevel: {comparison.level}\n"
            f"value: {comparison.value}\n")
    run.write("compare", {"comparison": comparison, "counts": [invariant_sequence(t, args.depth) for t in (t1, t2)]},
              text)
    return EXIT_OK


COMMANDS = {
    'validate': cmd_validate,
    'classify': cmd_classify,
    'spectrum': cmd_spectrum,
    'appbr': cmd_appbr,
    'tower': cmd_tower,
    'compare': cmd_compare,
}


def _manifest(args) -> RunManifest:
    inputs = [path for path in (getattr(args, 'input', None), getattr(args, 'other', None)) if path]
    toggles = getattr(args, 'toggles', None) or []
    options = {key: value for key, value in sorted(vars(args).items())
               if key not in ('command', 'input', 'other', 'toggles', 'out', 'seed', 'config', 'log_level')}
    return RunManifest(
        command=args.command,
        inputs=inputs,
        toggles=[t.value for t in toggles],
        seed=args.seed if args.seed is not None else config.get('cli.default_seed', 0),
        output_dir=args.out or config.get('cli.output_dir', 'out'),
        options=json.loads(dumps(options)),
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    args = parse_args(argv)

    # Load configuration
    try:
        config.load(args.config)
    except Exception as e:
        print(f"Error loading configuration: {e}", file=sys.stderr)
        return EXIT_INPUT

    log_level = args.log_level or config.get('logging.level', 'INFO')
    logger = setup_logger(
        'nccw',
        level='DEBUG',
        log_format=config.get('logging.format'),
        log_file=config.get('logging.log_file'),
        console_level=log_level
    )

    run = Run(args, _manifest(args))
    try:
        code = COMMANDS[args.command](args, run)
    except (InputError, PreconditionError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_INPUT
    except NccwError as e:
        logger.error(f"{args.command}: {e}", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_INPUT
    return run.close(code)


if __name__ == "__main__":
    sys.exit(main())
