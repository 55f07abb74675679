"""Toy benchmark: every smooth activation plus ReLU on two-arm spirals."""
import argparse
import sys
from pathlib import Path

from sgblend.cli import main as cli

ROOT = Path(__file__).resolve().parents[1]
KINDS = "relu,swish,gelu_tanh,gelu_exact,mish,sswish,sgblend"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/spirals")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--epochs", type=int, default=500)
    args = ap.parse_args()
    sys.exit(cli(["compare", "--config", str(ROOT / "configs" / "spirals_benchmark.json"),
                  "--kinds", KINDS, "--epochs", str(args.epochs),
                  "--out", args.out, "--jobs", str(args.jobs)]))
