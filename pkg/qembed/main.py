"""
CLI `qembed`: train | eval | gram | sweep | table | devices | dataset.

Códigos de salida: 0 correcto, 1 uso o validación, 2 fallo de ejecución
(E/S, coste no finito).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .commands.dataset import cmd_dataset
from .commands.devices import cmd_devices, cmd_table
from .commands.eval import cmd_eval
from .commands.experiment import ExperimentSpec
from .commands.gram import cmd_gram
from .commands.sweep import cmd_moons_sweep
from .commands.train import cmd_train
from .config import settings
from .core.noise import DEVICE_NAMES
from .core.optim import Objective, TrainConfig
from .core.overlap import OverlapKind

logger = logging.getLogger("qembed")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

DEFAULT_SIZES = "5,10,20,25"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de enteros no válida: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("la lista no puede estar vacía")
    return values


# -------------------- Parser --------------------
def _add_experiment_args(p: argparse.ArgumentParser, dataset: str = "iris") -> None:
    p.add_argument("--dataset", default=dataset, help="iris | circles | moons | ruta a CSV f1,f2,label")
    p.add_argument("--approach", choices=[o.value for o in Objective], default=Objective.IMPLICIT.value)
    p.add_argument("--method", choices=[k.value for k in OverlapKind], default=OverlapKind.EXACT.value)
    p.add_argument("--noise", choices=["none", *DEVICE_NAMES], default="none")
    p.add_argument("--shots", type=int, default=None, help=f"por defecto {settings.default_shots}")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-per-class", type=int, default=None)
    p.add_argument("--out", default=None, help="directorio de salida (por defecto <data_dir>/runs/<experimento>)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qembed", description="Clasificación con embeddings cuánticos entrenables")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="entrena θ y guarda train_record.json y params.json")
    _add_experiment_args(p)

    p = sub.add_parser("eval", help="precisión de test con θ entrenado")
    _add_experiment_args(p)
    p.add_argument("--params", required=True, help="params.json, train_record.json o su directorio")

    p = sub.add_parser("gram", help="matriz de solapamientos de los puntos de entrenamiento")
    _add_experiment_args(p)
    p.add_argument("--params", default=None)
    p.add_argument("--stage", choices=["before", "after"], default="after")

    p = sub.add_parser("sweep", help="barrido de moons con pocos datos")
    _add_experiment_args(p, dataset="moons")
    p.add_argument("--sizes", type=_int_list, default=_int_list(DEFAULT_SIZES))
    p.add_argument("--repeats", type=int, default=10)

    p = sub.add_parser("table", help="precisión ideal y bajo cada modelo de ruido")
    _add_experiment_args(p)
    p.add_argument("--params", required=True)

    p = sub.add_parser("devices", help="modelos de ruido incluidos")
    p.add_argument("--out", default=None)

    p = sub.add_parser("dataset", help="escribe train.csv y test.csv del experimento")
    _add_experiment_args(p)
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    sweep = args.command == "sweep"
    spec = ExperimentSpec(
        dataset=args.dataset,
        approach=args.approach,
        train=TrainConfig(epochs=args.epochs, learning_rate=args.lr, seed=args.seed),
        method=args.method,
        shots=args.shots if args.shots is not None else settings.default_shots,
        noise=args.noise,
        train_per_class=args.train_per_class,
        sweep=sweep,
        sizes=args.sizes if sweep else None,
        repeats=args.repeats if sweep else 10,
    )
    out = args.out or str(Path(settings.data_dir) / "runs" / spec.name)
    return spec.model_copy(update={"out_dir": out})


# -------------------- Ejecución --------------------
def run(args: argparse.Namespace) -> None:
    if args.command == "devices":
        cmd_devices(args.out)
        return

    spec = spec_from_args(args)
    if args.command == "train":
        record = cmd_train(spec)
        print(f"{spec.name}: coste {record.cost_history[0]:.6f} -> {record.cost_history[-1]:.6f} ({spec.out_dir})")
    elif args.command == "eval":
        report = cmd_eval(spec, args.params)
        print(f"{spec.name} [{report.method}{', ' + report.noise if report.noise else ''}]: accuracy {report.accuracy:.4f}")
    elif args.command == "gram":
        gram = cmd_gram(spec, args.params, args.stage)
        print(f"{spec.name}: gram {args.stage} {gram.size}x{gram.size} ({spec.out_dir})")
    elif args.command == "sweep":
        for size, approach, mean, sd in cmd_moons_sweep(spec):
            print(f"{size:>3} {approach:<8} {mean:.4f} ± {sd:.4f}")
    elif args.command == "table":
        for device, approach, method, acc in cmd_table(spec, args.params):
            print(f"{device:<10} {approach:<8} {method:<9} {acc:.4f}")
    elif args.command == "dataset":
        for path in cmd_dataset(spec):
            print(path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run(args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RuntimeError) as e:
        # RuntimeError cubre NonFiniteCostError
        logger.error("%s", e)
        return EXIT_RUNTIME
    except ValueError as e:
        # incluye pydantic.ValidationError
        print(f"qembed: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
