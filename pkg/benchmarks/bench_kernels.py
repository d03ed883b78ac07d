"""Compare the compiled kernels against the pure-Python fallback.

Two levels are timed:

* the raw kernels (``poly_mul``, ``poly_add``, ``rref``) on seeded random
  inputs, calling each backend module directly;
* an end-to-end workload (family closure, chain construction, random
  bracket arithmetic) run in a fresh interpreter per backend, with
  ``DERLIE_PURE_PYTHON=1`` forcing the fallback.

Usage: ``python benchmarks/bench_kernels.py [--repeat N] [--skip-workload]``
"""
import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from derlie import kernels

WORKLOAD = r"""
import random, time
from derlie import kernels
from derlie.families import build_rank3_type2
from derlie.liespan import closure, structure_constants
from derlie.chains import theorem1_chain, verify_chain
from derlie.derivation import Derivation, d_bracket
from derlie.ratfield import Polynomial, RationalFunction, VarContext

t = time.perf_counter()
span = build_rank3_type2(2, 2)
closure(span.basis)
sd = structure_constants(span)
verify_chain(sd, theorem1_chain(sd))
ctx = VarContext(3)
rng = random.Random(0)
def rf():
    terms = {tuple(rng.randint(0, 3) for _ in range(3)): rng.randint(-5, 5) or 1 for _ in range(4)}
    return RationalFunction.from_poly(Polynomial(3, terms))
for _ in range(150):
    a = Derivation(ctx, [rf() for _ in range(3)])
    b = Derivation(ctx, [rf() for _ in range(3)])
    d_bracket(a, b)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def _poly(rng, terms, deg, nvars=3):
    return {tuple(rng.randint(0, deg) for _ in range(nvars)): Fraction(rng.randint(-50, 50) or 1, rng.randint(1, 6))
            for _ in range(terms)}


def _rows(rng, count, width):
    return [{(i % 3, (i, 0, 0)): Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.randint(1, 3))
             for i in rng.sample(range(width), width // 2)} for _ in range(count)]


def _key(col):
    return (col[0], sum(col[1]), col[1])


def kernel_table(repeat):
    rng = random.Random(1)
    a, b = _poly(rng, 40, 8), _poly(rng, 40, 8)
    rows = _rows(rng, 40, 60)
    cases = {
        "poly_mul 40x40 terms": lambda m: m.poly_mul(a, b),
        "poly_add 40+40 terms": lambda m: m.poly_add(a, b, Fraction(-1, 3)),
        "rref 40 rows x 60 cols": lambda m: m.rref(rows, _key),
    }
    found = kernels.backends()
    print(f"{'kernel':<26}" + "".join(f"{name:>14}" for name in found) + ("     speedup" if len(found) > 1 else ""))
    for label, fn in cases.items():
        times = {}
        for name, mod in found.items():
            number = 20
            times[name] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=repeat)) / number
        line = f"{label:<26}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in found)
        if "compiled" in times:
            line += f"{times['python'] / times['compiled']:>11.2f}x"
        print(line)


def workload(pure):
    env = dict(os.environ)
    if pure:
        env["DERLIE_PURE_PYTHON"] = "1"
    else:
        env.pop("DERLIE_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-workload", action="store_true")
    args = p.parse_args(argv)
    if "compiled" not in kernels.backends():
        print("note: compiled extension not built; only the Python backend is timed")
    kernel_table(args.repeat)
    if not args.skip_workload:
        print()
        results = [workload(pure=True)] + ([workload(pure=False)] if "compiled" in kernels.backends() else [])
        for backend, seconds in results:
            print(f"workload ({backend:<8}) {seconds:8.3f}s")
        if len(results) == 2:
            print(f"workload speedup       {results[0][1] / results[1][1]:8.2f}x")


if __name__ == "__main__":
    main()
