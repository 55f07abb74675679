"""Write curve CSVs for an alpha sweep of SGBlend and a beta sweep of SSwish."""
import argparse
from pathlib import Path

from sgblend.activations import ActivationKind, ActivationParams
from sgblend.cli import cmd_curves

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/curves")
    ap.add_argument("--points", type=int, default=801)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        cmd_curves(ActivationKind.SGBLEND, ActivationParams(alpha=alpha), -6.0, 6.0, args.points,
                   out / f"sgblend_alpha{alpha}.csv")
    for beta in (0.1, 0.5, 1.0, 2.0, 10.0):
        cmd_curves(ActivationKind.SSWISH, ActivationParams(beta=beta), -6.0, 6.0, args.points,
                   out / f"sswish_beta{beta}.csv")
    print(f"wrote {len(list(out.glob('*.csv')))} files to {out}")
