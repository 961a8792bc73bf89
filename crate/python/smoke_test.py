"""Smoke test for the selberg3d extension module.

Build and copy the module next to this file first:

    cargo build --release -p selberg3d-py
    cp target/release/libselberg3d_py.so python/selberg3d.so
"""

import cmath
import math
import random

import selberg3d as s3


def test_geometry():
    rng = random.Random(7)
    p, q = s3.Point(0.1, -0.2, 1.5), s3.Point(0.4, 0.3, 0.7)
    for _ in range(20):
        a, b, c = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3))
        m = s3.Moebius(a, b, c, (1 + b * c) / a)
        assert abs(s3.delta(m.apply(p), m.apply(q)) - s3.delta(p, q)) < 1e-9 * s3.delta(p, q)
    assert s3.Moebius(1, 1, 0, 1).classify() == "parabolic"
    assert s3.Moebius(2, 0, 0, 0.5).classify() == "loxodromic"


def test_group():
    g = s3.BianchiGroup(1)
    assert g.d == 1
    assert all(m.classify() in {"identity", "parabolic", "elliptic", "loxodromic"} for m in g.enumerate(1))
    assert g.cusp_identity_residual("trivial")[1]
    assert s3.BianchiGroup(3).cusp_identity_residual("trivial+cubic")[1]
    classes = g.loxodromic_classes(30.0)
    assert classes and all(n0 > 1 for _, n0, _, _ in classes)


def test_lattice():
    rho = cmath.exp(1j * math.pi / 3)
    direct, tail = s3.lattice_sum(rho, 1 / 3, 1 / 4, 1e5)
    closed = s3.lattice_sum_kronecker(rho, 1 / 3, 1 / 4)
    assert abs(direct - closed) < 2e-2 and tail >= 0


def test_zeta():
    g = s3.BianchiGroup(3)
    h = 1e-4
    z = lambda s: cmath.log(g.zeta_partial(s, norm_bound=30.0))
    fd = (z(2.5 + h) - z(2.5 - h)) / (2 * h)
    series = g.zeta_logderiv(2.5, norm_bound=30.0)
    assert abs(fd - series) < 1e-6 * abs(series)
    table = dict(s3.divisor_table(3, 1, 1, 1.0))
    assert table[-1] == (2, 3) and table[-3] == (-1, 3)
    series, quad = s3.cusp_integral(2.0, math.pi / 2)
    assert abs(series - quad) < 1e-8


def test_transforms():
    s, b = 1.5, 3.0
    for x in (0.0, 0.7, 2.0):
        closed = math.exp(-s * x) / (2 * s) - math.exp(-b * x) / (2 * b)
        assert abs(s3.resolvent_g(s, b, x) - closed) < 1e-7
    value = s3.shc_forward(lambda t: s3.phi(t, 2.0) / (4 * math.pi), 1.0)
    assert abs(value - 1 / 3) < 1e-6


def test_eisenstein():
    g = s3.BianchiGroup(1)
    p = s3.Point(0.0, 0.0, 3.0)
    assert g.eisenstein_eigen_residual(1.8, p) < 1e-3


def test_errors():
    for bad in (lambda: s3.Point(0, 0, -1), lambda: s3.BianchiGroup(2), lambda: s3.lattice_sum_kronecker(1j, 0, 0)):
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
