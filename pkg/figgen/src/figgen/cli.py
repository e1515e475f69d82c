"""Command line: figgen <kind> --in <csv...> --out <img> [--param eps|x0] [--logy]."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="figgen", description="Render figures from homsr CSV artifacts"
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV file(s); density_map takes the pc and pd grids")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--param", default="eps", choices=("eps", "x0"),
                        help="parameter whose precision to plot (precision_vs_eps)")
    parser.add_argument("--logy", action="store_true", help="log-scale y axis")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.out,
            param=args.param,
            logy=args.logy,
        )
        render(spec)
    except SchemaError as exc:
        print(f"figgen: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
