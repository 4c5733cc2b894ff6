"""Compare the compiled and pure-Python search kernels.

Builds counters of growing width guarded by an enable input and times
``check`` on a property that holds (full product exploration) and on one
that fails, plus plain reachability, once per backend.

    python3 benchmarks/bench_kernels.py [--widths 6 8 10] [--repeat 3]
"""
import argparse
import time

from fpvkit import kernels
from fpvkit.checker import check
from fpvkit.model import model_from_dict
from fpvkit.parser import parse_formula


def counter(width: int):
    return model_from_dict({
        "name": f"counter{width}",
        "variables": {"en": {"type": "bool", "input": True}, "rst": {"type": "bool", "input": True},
                      "c": {"type": "int", "width": width}},
        "init": {"c": 0},
        "transitions": {"rules": {"c": [["rst", "0"], ["en", "c + 1"], ["true", "c"]]}},
    })


CASES = {
    "holds": "G (rst -> X c == 0)",
    "fails": "G (en -> F rst)",
    "liveness": "G F en -> G (c == 1 -> F c != 1)",
}


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'model':<10} {'states':>7} {'case':<9} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for w in args.widths:
        m = counter(w)
        rows = [("reach", lambda b: kernels.reachable(m.succ, m.init, backend=b))]
        for name, text in CASES.items():
            f = parse_formula(text)
            rows.append((name, lambda b, f=f: check(m, f, backend=b, shorten=False)))
        for name, fn in rows:
            secs = [best(lambda: fn(b), args.repeat) for b in backends]
            speed = f"{secs[0] / secs[1]:8.1f}x" if len(secs) == 2 and secs[1] > 0 else ""
            print(f"{m.name:<10} {m.num_states:>7} {name:<9} " + " ".join(f"{s:10.4f}" for s in secs) + "  " + speed)


if __name__ == "__main__":
    main()
