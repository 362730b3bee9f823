"""Smoke test for the chemotaxis_py extension.

Uses an installed module if there is one (``maturin develop`` or a wheel),
otherwise the shared library from ``cargo build -p chemotaxis-py``.
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import chemotaxis_py

        return chemotaxis_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libchemotaxis_py.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp())
            shutil.copy(lib, tmp / "chemotaxis_py.so")
            spec = importlib.util.spec_from_file_location("chemotaxis_py", tmp / "chemotaxis_py.so")
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("chemotaxis_py not found; run `cargo build -p chemotaxis-py` first")


def main():
    cx = load()
    print(cx.__version__)

    p = cx.Params()
    assert p.theta == 2.0 and p.eps == 0.0
    try:
        cx.validate_params(cx.Params(theta=0.5))
        raise AssertionError("theta = 0.5 accepted")
    except ValueError as e:
        assert "theta must exceed 1" in str(e)

    reduced = cx.ar_reduce(2.0, 1.0, cx.Params(gamma=2.0, alpha=1.0, delta=3.0))
    assert abs(reduced.alpha - 2.0) < 1e-12

    g = cx.Grid(64, 64)
    u0 = cx.make_bump(g, (0.5, 0.5), 0.15, 500.0, 2.0)
    cell = g.hx * g.hy
    assert abs(sum(x * x for x in u0) * cell - 500.0) < 1e-8
    assert cx.m1(p, g, u0) >= 1.0

    v, w = cx.solve_signals(p, g, u0)
    mass = sum(u0) * cell
    assert abs(sum(w) * cell - mass) < 1e-8 * mass
    assert abs(sum(v) * cell - mass) < 1e-8 * mass

    line = cx.Grid(128)
    xs = [c[0] for c in line.centers()]
    src = [(1 + math.pi**2) * math.cos(math.pi * x) for x in xs]
    phi = cx.solve_helmholtz(line, 1.0, 1.0, src)
    assert max(abs(a - math.cos(math.pi * x)) for a, x in zip(phi, xs)) < 1e-4

    uniform = cx.Grid(16)
    rep = cx.run(p, uniform, [2.0] * 16, 1.0, dt_max=1e-3)
    assert rep["verdict"] == "completed"
    exact = 2.0 / (2.0 - math.exp(-1.0))
    assert abs(rep["records"][-1]["mean"] - exact) < 1e-3

    collapse = cx.Params(mu=0.1, d2=1e-3, alpha=20.0)
    big = cx.make_bump(g, (0.5, 0.5), 0.15, 5000.0, 2.0)
    rep = cx.run(collapse, g, big, 0.1, blowup_cutoff=1e4, cadence=10)
    assert rep["verdict"] == "blowup_detected", rep["verdict"]
    assert min(rep["u"]) >= 0.0

    assert abs(cx.blowup_time_bound(2.0, 0.0, 1.0, 2.0) - 1.0) < 1e-12
    c, until = cx.fit_bernoulli([(0.0, 1.0), (1.0, 1.0)])
    assert c == 0.0 and until == math.inf

    with tempfile.TemporaryDirectory() as out:
        summary = cx.run_config("grid.dim = 1\ngrid.nx = 32\nrun.t_end = 0.1\n", out)
        assert summary.startswith("completed"), summary
        assert (pathlib.Path(out) / "diagnostics.csv").exists()

    print("smoke test passed")


if __name__ == "__main__":
    main()
