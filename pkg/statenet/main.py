"""
StateNet-PH - Dynamic state detection with transition networks and persistent homology
Command-line entry point

Pipeline:
    signal → delay embedding → OPN / CGSSN → graph distance → Rips persistence → E'(D_1), bottleneck, MDS, SVM
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from statenet.commands import load_handlers
from statenet.commands.repro import list_reproductions
from statenet.config import get_settings, load_config, reset_config
from statenet.errors import StateNetError
from statenet.schemas.results import ErrorSummary
from statenet.schemas.run_config import RunConfig
from statenet.services.export import dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2

DISTANCE_CHOICES = [
    "unweighted", "weighted_shortest", "shortest_weighted", "diffusion",
    "weighted-shortest", "shortest-weighted",
]


# =====================
# Logging Configuration
# =====================
def setup_logging():
    """Configure logging on stderr; stdout carries only the JSON summary"""
    settings = get_settings()

    logging.basicConfig(
        level=getattr(logging, settings.logging.level.upper()),
        format=settings.logging.format,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )

    # Reduce log noise from some libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)


# =====================
# Argument Parser
# =====================
class UsageError(Exception):
    """Raised instead of exiting on a bad command line"""

    def __init__(self, message: str, usage: str):
        self.usage = usage
        super().__init__(message)


class StrictParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message, self.format_usage())


def _signal_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("input")
    g.add_argument("--system", help="Preset name, e.g. rossler-periodic")
    g.add_argument("--csv", help="CSV file with one signal per column")
    g.add_argument("--fs", type=float, help="Sample rate of the CSV signal (Hz)")
    g.add_argument("--column", type=int, default=0, help="Zero-based CSV column (default: 0)")
    g.add_argument("--skip-header", action="store_true", help="Skip the first CSV row")
    g.add_argument("--snr", type=float, help="Add white Gaussian noise at this SNR (dB) using --seed")


def _embedding_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("embedding")
    g.add_argument("--tau", type=int, help="Delay in samples")
    g.add_argument("--dim", type=int, help="Embedding dimension")
    g.add_argument("--auto-tau", action="store_true", help="Select the delay by multi-scale permutation entropy")
    g.add_argument("--auto-dim", action="store_true", help="Select the dimension by false nearest neighbours")


def _network_flags(p: argparse.ArgumentParser, distance: bool = True):
    g = p.add_argument_group("network")
    g.add_argument("--kind", choices=["ordinal", "coarse"], help="ordinal (OPN) or coarse (CGSSN)")
    g.add_argument("--bins", type=int, help="Bins per dimension for --kind coarse")
    if distance:
        _distance_flags(p)


def _distance_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("distance")
    g.add_argument("--distance", choices=DISTANCE_CHOICES, default="unweighted", help="Graph distance (default: unweighted)")
    g.add_argument("--diffusion-t", type=int, help="Random-walk steps for --distance diffusion")
    g.add_argument("--normalization", choices=["total", "count"], default="total",
                   help="Entropy denominator: log2 of total persistence or of the pair count")


def _output_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("output")
    g.add_argument("--out", help="Output directory (default: settings output.directory)")
    g.add_argument("--seed", type=int, default=1, help="Random seed (default: 1)")
    g.add_argument("--plot", action="store_true", help="Also write SVG figures")
    g.add_argument("--jobs", type=int, help="Worker processes (default: settings output.jobs)")


def create_parser() -> argparse.ArgumentParser:
    """
    Create the command-line parser

    Returns:
        Parser whose ``error`` raises UsageError instead of exiting
    """
    parser = StrictParser(
        prog="statenet",
        description="Dynamic state detection with transition networks and persistent homology",
    )
    parser.add_argument("--config", help="Path to config.yaml")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=StrictParser)

    p = sub.add_parser("simulate", help="Simulate a preset system and write its signal")
    _signal_flags(p)
    _output_flags(p)

    p = sub.add_parser("embed", help="Delay embedding with delay/dimension diagnostics")
    _signal_flags(p)
    _embedding_flags(p)
    _network_flags(p, distance=False)
    _output_flags(p)

    p = sub.add_parser("network", help="Build an ordinal or coarse-grained transition network")
    _signal_flags(p)
    _embedding_flags(p)
    _network_flags(p, distance=False)
    _output_flags(p)

    for name, text in (("persist", "Persistence diagrams of a signal's network"),
                       ("entropy", "Max lifetime and persistent entropy of D_1")):
        p = sub.add_parser(name, help=text)
        _signal_flags(p)
        _embedding_flags(p)
        _network_flags(p)
        _output_flags(p)

    p = sub.add_parser("bottleneck", help="Bottleneck matrix between saved diagrams")
    p.add_argument("--diagrams", nargs="+", required=True, help="diagram.json files")
    _output_flags(p)

    p = sub.add_parser("mds", help="Classical MDS of a saved distance matrix")
    p.add_argument("--matrix", required=True, help="JSON file with a 'values' matrix, e.g. bottleneck.json")
    p.add_argument("--labels", nargs="+", choices=["periodic", "chaotic"], help="Regime of each row")
    _output_flags(p)

    p = sub.add_parser("battery", help="Separation accuracy over labelled signals")
    _network_flags(p)
    p.add_argument("--dataset", help="JSON manifest of labelled CSV signals")
    p.add_argument("--no-builtin", dest="builtin", action="store_false", help="Leave out the built-in presets")
    p.add_argument("--seeds", type=int, help="Number of SVM seeds (default: settings analysis.accuracy_seeds)")
    _output_flags(p)

    p = sub.add_parser("bin-sweep", help="Coarse-grained statistics over a range of bin counts")
    _signal_flags(p)
    _embedding_flags(p)
    _distance_flags(p)
    p.add_argument("--bin-min", type=int, help="Smallest bin count (default: settings)")
    p.add_argument("--bin-max", type=int, help="Largest bin count (default: settings)")
    _output_flags(p)

    p = sub.add_parser("noise-sweep", help="Entropy of a periodic/chaotic preset pair under noise")
    p.add_argument("--system", required=True, help="Preset family, e.g. rossler")
    _embedding_flags(p)
    _network_flags(p)
    p.add_argument("--snr-values", nargs="+", type=float, help="SNR grid in dB (inf allowed)")
    p.add_argument("--seeds", type=int, help="Noise seeds per SNR (default: settings analysis.noise_seeds)")
    _output_flags(p)

    p = sub.add_parser("repro", help="Run a named reproduction and check its outcome")
    p.add_argument("name", choices=list_reproductions(), help="Reproduction name")
    p.add_argument("--normalization", choices=["total", "count"], default="total")
    _output_flags(p)

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    fields = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    fields.setdefault("out", settings.output.directory)
    fields.setdefault("jobs", settings.output.jobs)
    return RunConfig(**fields)


# =====================
# Entry Point
# =====================
def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse, validate and execute one command

    Returns:
        0 on success, 1 on a usage or validation error, 2 on a compute
        error or a failed reproduction
    """
    handlers = load_handlers()
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{e.usage}statenet: error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    if args.config:
        reset_config()
        load_config(args.config)
    setup_logging()

    try:
        cfg = _run_config(args)
    except ValidationError as e:
        for err in e.errors():
            where = ".".join(str(x) for x in err["loc"]) or args.command
            sys.stderr.write(f"statenet {args.command}: error: {where}: {err['msg']}\n")
        return EXIT_USAGE

    logger.info(f"Running {cfg.command}")
    try:
        summary = handlers[cfg.command](cfg)
    except StateNetError as e:
        logger.error(f"{cfg.command} failed: {e}")
        error = ErrorSummary(command=cfg.command, error=type(e).__name__, message=str(e), details=e.details)
        sys.stdout.write(dumps(error, pretty=False).decode() + "\n")
        return EXIT_COMPUTE
    except OSError as e:
        sys.stderr.write(f"statenet {cfg.command}: error: {e}\n")
        return EXIT_USAGE

    sys.stdout.write(dumps(summary, pretty=False).decode() + "\n")
    return EXIT_OK if summary.status == "ok" else EXIT_COMPUTE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
