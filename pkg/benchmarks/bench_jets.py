"""Compare the compiled and numpy jet-product kernels.

    python3 benchmarks/bench_jets.py [--repeat N]

Times raw jet products at several (nvars, order) sizes and one end-to-end
scalar-curvature evaluation, once per available kernel.
"""

import argparse
import timeit

import numpy as np

from skgeom import curvature, homogeneous, jets

SIZES = [(3, 4), (6, 3), (6, 4)]


def product_case(nvars, order, dtype):
    rng = np.random.default_rng(0)
    size = len(jets.index_table(nvars, order).indices)
    a = jets.Jet(nvars, order, rng.standard_normal(size).astype(dtype))
    b = jets.Jet(nvars, order, rng.standard_normal(size).astype(dtype))
    return lambda: a * b


def curvature_case():
    h = homogeneous.cubic_x_xy_z2()
    field = homogeneous.gprime_c_field(h, -0.3)
    x = np.array([1.2, 2.1, 0.9])
    return lambda: curvature.scalar_curvature(field, x)


def run(repeat):
    kernels = ["python"] + (["cython"] if jets.compiled_available() else [])
    cases = [(f"mul nvars={n} order={k} {np.dtype(dt).name}", product_case(n, k, dt))
             for n, k in SIZES for dt in (float, complex)]
    cases.append(("scalar curvature x(xy-z^2)", curvature_case()))
    previous = jets.KERNEL
    results = {}
    try:
        for kernel in kernels:
            jets.set_kernel(kernel)
            for name, fn in cases:
                number = 200 if name.startswith("mul") else 5
                best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
                results[(name, kernel)] = best
    finally:
        jets.set_kernel(previous)
    print(f"{'case':44s}" + "".join(f"{k:>14s}" for k in kernels) + ("   speedup" if len(kernels) > 1 else ""))
    for name, _ in cases:
        row = [results[(name, k)] for k in kernels]
        line = f"{name:44s}" + "".join(f"{t * 1e6:12.1f}us" for t in row)
        if len(row) > 1:
            line += f"   {row[0] / row[1]:6.2f}x"
        print(line)
    if len(kernels) == 1:
        print("compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    run(parser.parse_args().repeat)
