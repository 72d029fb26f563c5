"""Smoke test for the phaselimit Python module.

Build and install first, e.g. ``maturin develop --release -m crates/python/Cargo.toml``,
then run ``python python/smoke_test.py``.
"""

import json
import math

import phaselimit as pl


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    c = pl.constants()
    close(c["k_A"], math.sqrt(2 * math.pi / math.e**3), 1e-12)
    close(c["k_C"], 1.37608, 1e-5)
    close(pl.heisenberg_bound(0.0), c["k_A"], 1e-15)

    s = pl.ProbeState([0.6, 0.8])
    close(s.mean_number(), 0.64, 1e-12)
    close(s.phase_entropy(), 1.564164169037765, 1e-8)
    half = pl.ProbeState([1.0, 1.0])
    try:
        half.phase_entropy(grid=64)
    except RuntimeError:
        pass
    else:
        raise AssertionError("unresolved 64-point entropy should raise")
    close(half.phase_entropy(), 1.5310242469692908, 1e-8)
    assert s.dim == len(s) == 2
    assert math.isinf(pl.ProbeState.fock(3, 5).holevo_variance())

    report = pl.entropy_chain_report(pl.ProbeState.random(12, seed=7))
    assert all(e["satisfied"] for e in report["entries"])

    r = pl.optimize_at_mean(2.0, kind="exact")
    close(r["achieved_mean"], 2.0, 1e-7)
    assert r["product"] >= c["k_C"] - 1e-6
    close(sum(a * a for a in r["amplitudes"]), 1.0, 1e-12)

    rows = pl.figure2_curve([0.5, 1.0, 2.0], kind="surrogate")
    assert [row["mean"] for row in rows] == [0.5, 1.0, 2.0]

    demo = pl.kphase(4)
    close(demo["mean_number"], 1.5, 1e-15)
    assert demo["gram_deviation"] < 1e-12
    assert demo["averaged_delta"] > pl.heisenberg_bound(1.5)

    number_pom = {
        "outcomes": [
            {"estimate": 0.0, "element": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
            {"estimate": 1.0, "element": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]},
        ]
    }
    sim = pl.simulate(json.dumps(number_pom), s)
    close(sim["mean_square_deviation"], math.pi**2 / 3, 1e-12)

    try:
        pl.ProbeState([0.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("zero state accepted")

    print("phaselimit smoke test passed")


if __name__ == "__main__":
    main()
