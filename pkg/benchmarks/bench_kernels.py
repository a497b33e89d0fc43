"""Time the compiled kernels against the numpy fallback on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from fourierhedge import OperatorContext, TimeChangedBrownian, VarianceGamma, self_quanto_put
from fourierhedge import _fallback
from fourierhedge.decompose import fs
from fourierhedge.risk import _node_tables, _sum_tables
from fourierhedge.simulate import _Strategy, simulate_paths, terminal_payoff

try:
    from fourierhedge import _native
except ImportError:
    _native = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def j0_case(truncation):
    model = VarianceGamma(2.0, 1.0, 1.0)
    ctx = OperatorContext(model, 1.0)
    mu = self_quanto_put(1.0, truncation=truncation, check=False)
    u, w = mu.density_nodes()
    mg, A = _node_tables(ctx, u)
    B, G = _sum_tables(ctx, 2 * u[0] + mu.step * np.arange(2 * u.size - 1))
    args = (w, A, B, mg.dpsi, G, mg.delta, np.ascontiguousarray(ctx.da))
    args = tuple(np.ascontiguousarray(a) for a in args) + (None,)
    return f"j0_double_sum  {u.size} nodes", lambda impl: impl.j0_double_sum(*args)


def hedge_case(n_paths, steps):
    model = TimeChangedBrownian.from_functions(lambda t: 0.1 * t, lambda t: t, [0.0, 1.0])
    ctx = OperatorContext(model, 1.0)
    mu = self_quanto_put(1.0)
    dec = fs(ctx, mu)
    batch = simulate_paths(model, (1.0, steps), n_paths, seed=0)
    X = np.ascontiguousarray(batch.paths)
    strat = _Strategy(dec, batch.times, (-8.0, 8.0))
    x = strat.htab.x
    args = (X, np.full(steps, 0.1), float(dec.H0), np.ascontiguousarray(terminal_payoff(mu, X[:, -1])),
            float(x[0]), float(x[1] - x[0]), np.ascontiguousarray(strat.htab.values.real),
            np.ascontiguousarray(strat.ktab.values.real), True)
    return f"hedge_table    {n_paths} x {steps}", lambda impl: impl.hedge_table(*args)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _native is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'kernel':34s} {'native [s]':>11s} {'fallback [s]':>13s} {'speedup':>8s} {'max diff':>9s}")
    for name, run in (j0_case(60.0), j0_case(150.0), hedge_case(20_000, 200)):
        tn, a = best_of(lambda: run(_native), args.repeat)
        tf, b = best_of(lambda: run(_fallback), args.repeat)
        a0, b0 = (a[0], b[0]) if isinstance(a, tuple) else (a, b)
        diff = float(np.max(np.abs(np.asarray(a0) - np.asarray(b0))))
        print(f"{name:34s} {tn:11.4f} {tf:13.4f} {tf / tn:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
