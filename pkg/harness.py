import argparse
import sys
from typing import List, Optional

import logfire
from pydantic import ValidationError
from rich.console import Console
from rich.traceback import install

from ladris.container import build_container
from ladris.exceptions import InvalidConfigError, LadrisError
from ladris.harness import cmd_ablate, cmd_eval, cmd_gen_data, cmd_train, load_run_config

# Install rich traceback handler
install(show_locals=False)

logfire.configure(
    service_name="ladris-harness",
    send_to_logfire="if-token-present",
    scrubbing=False,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

console = Console()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harness", description="Referring segmentation on drone-scale scenes")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", default="config.yaml", help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="Override the root seed")
        p.add_argument("--out", default=None, help="Override the output directory")
        return p

    common(sub.add_parser("gen-data", help="Generate, annotate and split the synthetic corpus"))
    common(sub.add_parser("train", help="Train and keep best and last checkpoints"))
    evaluate = common(sub.add_parser("eval", help="Evaluate a checkpoint"))
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--split", choices=("train", "val", "test", "all"), default="val")
    evaluate.add_argument("--visualize", type=int, default=0, help="Write this many overlay PNGs per split")
    common(sub.add_parser("ablate", help="Run the module and linguistic-component ablation grids"))
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Run one verb and map its outcome to an exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, seed=args.seed, output_dir=args.out)
        container = build_container(config)

        if args.verb == "gen-data":
            report = cmd_gen_data(config, container)
            if not report.passed:
                console.print(
                    f"[red]Coverage check failed:[/red] {report.fraction_below:.3f} of samples below "
                    f"{report.max_ratio}, {report.min_fraction} required"
                )
                return EXIT_FAILURE
            console.print(f"Dataset written to {config.data.dataset_dir}")
        elif args.verb == "train":
            result = cmd_train(config, container)
            console.print(f"Best val mIoU {100 * result.best_val_miou:.2f}, checkpoints in {config.output_dir}")
        elif args.verb == "eval":
            cmd_eval(config, args.checkpoint, args.split, container, args.visualize, console)
        elif args.verb == "ablate":
            cmd_ablate(config, container, console)
        return EXIT_OK

    except (InvalidConfigError, ValidationError) as e:
        logfire.error(f"Configuration error: {str(e)}")
        console.print(f"[red]Configuration error:[/red] {e}")
        return EXIT_CONFIG
    except LadrisError as e:
        logfire.error(f"{args.verb} failed: {str(e)}", error_type=type(e).__name__)
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        return EXIT_FAILURE


def main():
    """Entrypoint for the harness."""
    from dotenv import load_dotenv
    load_dotenv()
    sys.exit(run())


if __name__ == "__main__":
    main()
