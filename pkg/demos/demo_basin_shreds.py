"""Basin shreds of maps with a fixed point.

The two stock unit-graph maps, f(x) = x^2 and f(x) = (2/pi) arcsin x, both
fix 0 (attracting) and 1 (repelling). For each accuracy eps the shred point
splits the circle into the sub-basin whose orbits reach an eps-neighbourhood
of the attracting fixed point faster forward than backward, and the
complementary one. Shrinking eps pushes the shred toward the repelling
endpoint for the squaring map but toward the attracting endpoint for the
arcsin map.

Writes shred tables and tau-function plot data to demos/out/, plus a figure
when matplotlib is importable.
"""

from pathlib import Path

import numpy as np

from circle_displace import (compute_shred, find_periodic_points,
                             make_unit_graph, tau_grid)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

EPS_GRID = (0.5, 0.1, 0.01, 0.001)


def shred_report(name):
    lift = make_unit_graph(name)
    structure = find_periodic_points(lift, 1, 0)
    interval = structure.intervals[0]
    print(f"\n{name}: fixed points {structure.points}, "
          f"attracting endpoint = {interval.attractor}")
    rows = []
    for eps in EPS_GRID:
        r = compute_shred(lift, structure, interval, eps)
        rows.append(r)
        print(f"  eps={eps:<6} m~={r.m_tilde:<3} overlap=({r.a:.6f}, {r.b:.6f}) "
              f"shred={r.shred:.12f}")
    with open(OUT / f"shreds_{name}.csv", "w", newline="\n") as fh:
        fh.write("eps,m_tilde,a,b,shred\n")
        for r in rows:
            fh.write(f"{r.eps},{r.m_tilde},{r.a!r},{r.b!r},{r.shred!r}\n")
    return lift, structure, interval, rows


def tau_plot_data(lift, structure, interval, rows, name):
    with open(OUT / f"tau_{name}.csv", "w", newline="\n") as fh:
        fh.write("eps,z,tau_plus,tau_minus\n")
        for r in rows:
            zs, tp, tm = tau_grid(lift, structure, interval, r.m_tilde, 257)
            for z, a, b in zip(zs, tp, tm):
                fh.write(f"{r.eps},{z!r},{a!r},{b!r}\n")


def maybe_plot(data):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not available; skipping the figure")
        return
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for ax, (name, (lift, structure, interval, rows)) in zip(axes, data.items()):
        for r in rows:
            zs, tp, tm = tau_grid(lift, structure, interval, r.m_tilde, 257)
            ax.plot(zs, tp, lw=1, label=f"tau+ m={r.m_tilde} (eps={r.eps})")
            ax.plot(zs, tm, lw=1, ls="--")
            ax.axvline(r.shred, color="k", lw=0.5, alpha=0.5)
        ax.set_title(name)
        ax.set_xlabel("z")
        ax.set_ylim(0, 0.35)
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(OUT / "shreds.png", dpi=120)
    print(f"\nfigure written to {OUT / 'shreds.png'}")


def main():
    data = {}
    for name in ("x_squared", "arcsin_scaled"):
        lift, structure, interval, rows = shred_report(name)
        tau_plot_data(lift, structure, interval, rows, name)
        data[name] = (lift, structure, interval, rows)
    sq = [r.shred for r in data["x_squared"][3]]
    asn = [r.shred for r in data["arcsin_scaled"][3]]
    print("\nshrinking eps moves the shred:")
    print(f"  x_squared:     {' -> '.join(f'{s:.4f}' for s in sq)}  (toward repelling 1)")
    print(f"  arcsin_scaled: {' -> '.join(f'{s:.4f}' for s in asn)}  (toward attracting 0)")
    maybe_plot(data)


if __name__ == "__main__":
    main()
