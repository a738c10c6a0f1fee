"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times the surround convolution and Sobel kernels directly, then one full
fitness evaluation (MSRMCR enhancement + objective) per backend.
"""
import argparse
import time
from statistics import median

import numpy as np

import retinex_pso._ext as ext
from retinex_pso._ext import _pykernels
from retinex_pso.image_io import RgbImage
from retinex_pso.objective import fitness
from retinex_pso.retinex import MSRMCR_DEFAULTS, gaussian_surround, msrmcr

try:
    from retinex_pso._ext import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeat):
    fn()
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return median(samples)


def full_evaluation(backend, img, repeat):
    saved = ext.convolve_separable, ext.sobel_magnitude
    ext.convolve_separable, ext.sobel_magnitude = backend.convolve_separable, backend.sobel_magnitude
    try:
        return timeit(lambda: fitness(msrmcr(img, MSRMCR_DEFAULTS)), repeat)
    finally:
        ext.convolve_separable, ext.sobel_magnitude = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args()

    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing numpy only")

    rng = np.random.default_rng(0)
    rows = []
    for size in (64, 256):
        plane = rng.random((size, size)) * 255
        for sigma in (15.0, 80.0, 250.0):
            taps = gaussian_surround(sigma, size, size).taps
            rows.append((f"convolve {size}x{size} sigma={sigma:g}",
                         {k: timeit(lambda m=m: m.convolve_separable(plane, taps), args.repeat)
                          for k, m in backends.items()}))
        rows.append((f"sobel {size}x{size}",
                     {k: timeit(lambda m=m: m.sobel_magnitude(plane), args.repeat) for k, m in backends.items()}))
        img = RgbImage.from_array(rng.random((size, size, 3)) * 80)
        rows.append((f"fitness evaluation {size}x{size}",
                     {k: full_evaluation(m, img, max(3, args.repeat // 2)) for k, m in backends.items()}))

    names = list(backends)
    print(f"{'case':36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, times in rows:
        line = f"{label:36s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{times['numpy'] / times['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
