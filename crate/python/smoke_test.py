"""Smoke test for the dsx extension module.

Build and install with

    pip install --no-build-isolation -e crates/py

then run ``python python/smoke_test.py``.
"""

from fractions import Fraction as F
from math import gcd

import dsx


def phi(n):
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def main():
    assert dsx.factor_phi(360) == ([(2, 3), (3, 2), (5, 1)], 96)

    for n in range(1, 60):
        for rho in (F(1, 2), F(1, 2 * n)):
            e = dsx.build_e(n, rho)
            assert e.measure() == 2 * rho * phi(n) / n, n

    e2, e3 = dsx.build_e(2, F(1, 2)), dsx.build_e(3, F(1, 2))
    assert e2.intervals() == [(F(1, 4), F(3, 4))]
    assert e3.intervals() == [(F(1, 6), F(5, 6))]
    assert e2.intersect(e3) == e2
    assert dsx.union_measure([e2, e3]) == F(2, 3)
    assert e2.contains(F(1, 4)) and not e2.contains(F(3, 4))

    half = dsx.Psi("half", 300)
    d = dsx.decompose_pair(6, 10, half)
    assert (d.r, d.s, d.t, d.g) == (2, 1, 15, 2)
    assert d.r ** 2 * d.s * d.t == 60
    assert d.pv_bound(0) == F(15, 8)

    rec = dsx.overlap_record(14, 30, half, 0)
    assert rec["p_exact"] == dsx.exact_p(14, 30, half, 0)
    assert isinstance(rec["integral_bound"], float)

    total, rows = dsx.averaged_sum(22, 240, half, 3)
    assert total == sum(r["p_exact"] for r in rows)

    assert dsx.block_bounds(2, 2) == (16, 256)
    assert dsx.k_of_h(2, F(3)) == 8
    rep = dsx.select_k(2, 2, half, F(3), [(16, 17), (20, 30), (100, 255)])
    assert 1 <= rep["chosen_k"] <= rep["K"]

    assert dsx.bc_ratio(half, 3) == F(169, 198)
    assert dsx.bc_ratio(dsx.Psi.from_values([F(1, 4)]), 1) == F(1, 2)

    for call, exc in [
        (lambda: dsx.Psi("nope", 10), dsx.ConfigError),
        (lambda: dsx.bc_ratio(dsx.Psi("half", 600), 501), dsx.CapError),
        (lambda: dsx.k_of_h(1, F("0.72134752044448170367996234050094606871332297707649")),
         dsx.PrecisionError),
        (lambda: dsx.build_e(3, F(3, 5)), dsx.ConfigError),
    ]:
        try:
            call()
        except exc:
            pass
        else:
            raise AssertionError(f"expected {exc.__name__}")
    assert issubclass(dsx.CapError, dsx.DsxError)

    print("smoke test ok")


if __name__ == "__main__":
    main()
