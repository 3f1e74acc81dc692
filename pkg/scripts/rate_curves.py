"""Tabulate the tilted-curve log lambda_u, its kinks, and the rate function.

Example:
    python3 scripts/rate_curves.py --builtin breakdown_example
    python3 scripts/rate_curves.py --model m.json --x-min -0.9 --x-max 0.9 \
        --csv-prefix out/rate
"""
import argparse
import pathlib
import sys

import numpy as np

from oqwalk import builtin, lambda_curve, load_model, rate_function


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    g = ap.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", help="model JSON document")
    g.add_argument("--builtin", help="bundled model name")
    ap.add_argument("--p", type=float, default=None,
                    help="bias for classical_dilation")
    ap.add_argument("--u-min", type=float, default=-4.0)
    ap.add_argument("--u-max", type=float, default=4.0)
    ap.add_argument("--u-points", type=int, default=41)
    ap.add_argument("--x-min", type=float, default=-0.95)
    ap.add_argument("--x-max", type=float, default=0.95)
    ap.add_argument("--x-points", type=int, default=20)
    ap.add_argument("--csv-prefix", default=None,
                    help="write <prefix>_lambda.csv and <prefix>_rate.csv")
    return ap.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    model = (load_model(args.model) if args.model
             else builtin(args.builtin, p=args.p))
    if model.lattice_dim != 1:
        print("rate tables need a one-dimensional walk", file=sys.stderr)
        return 1

    us = np.linspace(args.u_min, args.u_max, args.u_points)
    curve = lambda_curve(model, us)
    print(f"log lambda_u on [{args.u_min}, {args.u_max}] "
          f"({args.u_points} points):")
    print(f"  range [{curve.log_lambda_values.min():.6f}, "
          f"{curve.log_lambda_values.max():.6f}]")
    if curve.kinks:
        for k in curve.kinks:
            print(f"  kink at u = {k.u:.6f}: lambda slopes "
                  f"{k.lambda_slope_left:.6f} -> {k.lambda_slope_right:.6f}, "
                  f"log slopes {k.log_slope_left:.6f} -> {k.log_slope_right:.6f}")
    else:
        print("  no kinks certified on this window")
    if curve.degenerate_parameters:
        print(f"  degenerate top eigenvalue at u in "
              f"{list(curve.degenerate_parameters)}")

    xs = np.linspace(args.x_min, args.x_max, args.x_points)
    table = rate_function(model, xs, u_min=args.u_min, u_max=args.u_max,
                          points=args.u_points)
    tag = " (upper bound only: reducible internal map)" \
        if table.upper_bound_only else ""
    print(f"\nrate function{tag}:")
    print("      x         I(x)      maximizer")
    for x, v, u, fin in zip(table.x_grid, table.rate, table.maximizers,
                            table.finite):
        if fin:
            print(f"  {x:+8.4f}  {v:10.6f}  {u:+10.4f}")
        else:
            print(f"  {x:+8.4f}        +inf           -")

    if args.csv_prefix:
        prefix = pathlib.Path(args.csv_prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        lam = prefix.parent / (prefix.name + "_lambda.csv")
        lam.write_text("\n".join(
            ["u,log_lambda"]
            + [f"{u!r},{v!r}" for u, v in zip(curve.parameters,
                                              curve.log_lambda_values)]
        ) + "\n")
        rt = prefix.parent / (prefix.name + "_rate.csv")
        rt.write_text("\n".join(
            ["x,rate,maximizer,finite"]
            + [f"{float(x)!r},{float(v)!r},{float(u)!r},{int(f)}"
               for x, v, u, f in zip(table.x_grid, table.rate,
                                     table.maximizers, table.finite)]
        ) + "\n")
        print(f"\nwrote {lam} and {rt}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
