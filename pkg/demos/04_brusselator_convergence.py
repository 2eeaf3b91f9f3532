"""Second-order convergence on the advective 3-D Brusselator.

The initial data are deterministic, so errors can be compared with published
values directly. The reference solution uses eight times the largest step
count of the sequence. Pass 64 as the first argument for the full-size grid.
"""
import sys

from adrexp import convergence_study, get_model

n = int(sys.argv[1]) if len(sys.argv) > 1 else 32
model = get_model("adv-brusselator3d")
grid = model.grid(n)

for scheme in ("etd2rkds", "lawson2b"):
    rows = convergence_study(model, grid, scheme, 1.0, [50, 100, 150, 200], ref_mult=8)
    print(f"\n{scheme}, n = {n}^3")
    print(f"{'steps':>6} {'seconds':>8} {'error':>10} {'order':>6}")
    for r in rows:
        order = "" if r.order is None else f"{r.order:.2f}"
        print(f"{r.steps:>6} {r.seconds:>8.2f} {r.error:>10.2e} {order:>6}")
