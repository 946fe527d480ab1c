"""Time the hot kernels on every available backend and check they agree bit for bit.

    python3 benchmarks/bench_kernels.py [--sizes 10 40 100] [--repeat 5]
"""
import argparse
import time

import numpy as np

from eigengesture._backend import available


def _best(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def _sweep_case(mod, c):
    def run():
        a = c.copy()
        v = np.eye(c.shape[0])
        mod.jacobi_sweep(a, v)
        return np.concatenate([a.ravel(), v.ravel()])
    return run


def bench(sizes, repeat, seed=0):
    backends = available()
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        x = rng.normal(size=(n, n))
        c = np.ascontiguousarray(x @ x.T)
        w = np.ascontiguousarray(rng.normal(size=(n, 4 * n)))
        probe = rng.normal(size=n)
        cases = {
            "jacobi_sweep": lambda mod: _sweep_case(mod, c),
            "nearest_column": lambda mod: lambda: np.asarray(mod.nearest_column(w, probe), dtype=object),
            "max_pairwise": lambda mod: lambda: np.float64(mod.max_pairwise_distance(w)),
        }
        for kernel, make in cases.items():
            timings, outputs = {}, {}
            for name, mod in backends.items():
                timings[name], outputs[name] = _best(make(mod), repeat)
            reference = outputs["python"]
            same = all(np.array_equal(out, reference) for out in outputs.values())
            rows.append((kernel, n, timings, same))
    return list(backends), rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 40, 100])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    names, rows = bench(args.sizes, args.repeat)
    header = f"{'kernel':<16}{'n':>6}" + "".join(f"{name + ' s':>14}" for name in names)
    if "cython" in names:
        header += f"{'speedup':>10}"
    print(header + f"{'identical':>11}")
    for kernel, n, timings, same in rows:
        line = f"{kernel:<16}{n:>6}" + "".join(f"{timings[name]:>14.6f}" for name in names)
        if "cython" in names:
            line += f"{timings['python'] / timings['cython']:>9.1f}x"
        print(line + f"{str(same):>11}")
    if not all(same for *_, same in rows):
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
