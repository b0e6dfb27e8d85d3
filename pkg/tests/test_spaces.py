import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psop import (
    DualCertificate,
    Element,
    GeometricEnvelope,
    TailUnbounded,
    basis_element,
    dual_certificate_check,
    finite_type_space,
    infinite_type_space,
    nuclearity_check,
    seminorm,
    stability_constant,
    weight,
)
from psop.spaces import (
    ExponentialEnvelope,
    decay_compensation_constant,
    explicit_alpha,
    linear_alpha,
    log_alpha,
    root_alpha,
    tail_majorant,
)
from psop.symbols import geometric_symbol


def test_weight_examples(fin, inf):
    assert weight(fin, 3, 2) == pytest.approx(math.exp(-1.5), rel=1e-15)
    assert weight(inf, 2, 3) == pytest.approx(math.exp(6), rel=1e-15)
    root2 = finite_type_space(root_alpha(2))
    assert weight(root2, 4, 1) == pytest.approx(math.exp(-2), rel=1e-15)


def test_weight_kothe_axioms(fin, inf):
    for space in (fin, inf, finite_type_space(root_alpha(3)),
                  infinite_type_space(log_alpha())):
        for n in range(1, 40):
            prev = 0.0
            for k in range(1, 9):
                w = weight(space, n, k)
                assert w > 0
                assert w >= prev  # nondecreasing in the grade
                prev = w


def test_seminorm_basis_vector_equals_weight(fin, inf):
    for space in (fin, inf):
        for n in (1, 3, 17):
            for k in (1, 2, 5):
                tv = seminorm(space, basis_element(n, 32), k)
                assert tv.value == weight(space, n, k)
                assert tv.tail == 0.0


def test_seminorm_geometric_ones_tail(fin):
    # x_n = 1 for n <= N with the constant-envelope certificate: the norm
    # approaches the full geometric sum as N grows
    target = math.exp(-1) / (1 - math.exp(-1))
    prev_gap = None
    for N in (10, 25, 60):
        x = Element(tuple([1.0] * N), GeometricEnvelope(1.0, 1.0))
        tv = seminorm(fin, x, 1)
        assert tv.value <= target <= tv.value + tv.tail + 1e-15
        gap = target - tv.value
        if prev_gap is not None:
            assert gap < prev_gap
        prev_gap = gap


def test_seminorm_finite_sum_infinite_type(inf):
    x = Element((1, 1))
    tv = seminorm(inf, x, 1)
    assert tv.value == pytest.approx(math.e + math.e ** 2, rel=1e-15)
    assert tv.tail == 0.0


def test_seminorm_tail_unbounded_for_bounded_tail_on_infinite_type(inf):
    x = Element(tuple([1.0] * 8), GeometricEnvelope(1.0, 1.0))
    with pytest.raises(TailUnbounded):
        seminorm(inf, x, 1)


@given(st.lists(st.fractions(min_value=-4, max_value=4), min_size=1, max_size=12),
       st.lists(st.fractions(min_value=-4, max_value=4), min_size=1, max_size=12),
       st.fractions(min_value=-4, max_value=4))
@settings(max_examples=60, deadline=None)
def test_seminorm_subadditive_and_homogeneous(xs, ys, c):
    space = finite_type_space()
    n = max(len(xs), len(ys))
    xs = xs + [Fraction(0)] * (n - len(xs))
    ys = ys + [Fraction(0)] * (n - len(ys))
    x, y = Element(tuple(xs)), Element(tuple(ys))
    both = Element(tuple(a + b for a, b in zip(xs, ys)))
    scaled = Element(tuple(c * a for a in xs))
    for k in (1, 3):
        nx = seminorm(space, x, k).value
        ny = seminorm(space, y, k).value
        ns = seminorm(space, both, k).value
        assert ns <= (nx + ny) * (1 + 1e-12) + 1e-300
        nh = seminorm(space, scaled, k).value
        assert nh == pytest.approx(abs(c) * nx, rel=1e-12, abs=1e-300)


def test_seminorm_homogeneity_high_precision_spot(fin):
    # one case replayed at 50 digits: the float path sits within 1e-12
    xs = (Fraction(3, 7), Fraction(-2, 5), Fraction(1, 9))
    c = Fraction(5, 3)
    with mpmath.workdps(50):
        exact = sum(abs(v) * mpmath.e ** (-(i + 1) / mpmath.mpf(2))
                    for i, v in enumerate(xs))
        got = seminorm(fin, Element(xs), 2).value
        assert abs(got - exact) < 1e-14 * exact
        got_scaled = seminorm(fin, Element(tuple(c * v for v in xs)), 2).value
        assert abs(got_scaled - abs(c) * exact) < 1e-13 * exact


def test_stability_examples():
    lin = stability_constant(linear_alpha(), 1000)
    assert lin.bound == 2 and lin.certified and lin.prefix_sup == 2.0
    rt = stability_constant(root_alpha(2), 1000)
    assert rt.bound == 2 and rt.certified
    assert rt.prefix_sup == pytest.approx(math.sqrt(2), rel=1e-12)
    expl = stability_constant(explicit_alpha([2.0 ** n for n in range(1, 17)], None), 16)
    assert not expl.certified
    assert expl.prefix_sup == 256.0  # grows with the prefix length


def test_stability_prefix_never_exceeds_analytic_bound():
    for alpha in (linear_alpha(), root_alpha(2), root_alpha(5)):
        for N in (10, 100, 1000):
            cert = stability_constant(alpha, N)
            assert cert.prefix_sup <= cert.bound + 1e-12


def test_stability_skips_zero_indices():
    cert = stability_constant(explicit_alpha([0.0, 1.0, 2.0, 3.0], "arithmetic"), 4)
    assert cert.skipped == (1,)


def test_nuclearity_infinite_linear(inf):
    cert = nuclearity_check(inf)
    assert cert.nuclear and cert.certified and cert.m1 == 1
    assert cert.partial_sum <= cert.decay_sum
    assert cert.decay_sum <= math.e / (math.e - 1)
    assert cert.decay_sum == pytest.approx(1 / (math.e - 1), rel=1e-12)


def test_nuclearity_finite_linear_and_log(fin):
    assert nuclearity_check(fin).nuclear
    log_space = finite_type_space(log_alpha())
    cert = nuclearity_check(log_space)
    assert not cert.nuclear and cert.certified
    assert cert.ratio_max == pytest.approx(1.0, abs=1e-3)  # ln n / ln(n+1) -> 1


def test_nuclearity_root_and_log_infinite():
    cert = nuclearity_check(infinite_type_space(root_alpha(2)))
    assert cert.nuclear and cert.m1 == 1
    assert cert.decay_sum >= cert.partial_sum
    cert = nuclearity_check(infinite_type_space(log_alpha()))
    assert cert.nuclear and cert.m1 == 2
    assert cert.decay_sum == pytest.approx(math.pi ** 2 / 6 - 1, rel=1e-3)


def test_decay_compensation_constant_linear(fin):
    for k in (1, 4, 8):
        dk = decay_compensation_constant(fin, k, 10_000)
        assert dk == pytest.approx(2 * k / math.e, rel=1e-12)


def test_dual_certificate_examples(fin, inf):
    ok = dual_certificate_check(inf, geometric_symbol(1, 1), DualCertificate(1.0, 1), 64)
    assert ok.passed
    c = math.exp(-0.5)
    ok = dual_certificate_check(fin, geometric_symbol(c, c), DualCertificate(1.0, 2), 64)
    assert ok.passed  # equality at every index
    bad = dual_certificate_check(fin, geometric_symbol(1, 1), DualCertificate(1.0, 5), 64)
    assert not bad.passed and bad.witness == 1


def test_tail_majorant_shapes(fin, inf):
    # exponential envelope against匹 weights: decaying dual-type on finite
    cert = ExponentialEnvelope(1.0, 2, -1)
    val, _ = tail_majorant(fin, cert, 10, 3)
    # sum_{n>=10} e^{-n/2} e^{-n/3} = sum e^{-5n/6}
    want = math.exp(-50 / 6) / (1 - math.exp(-5 / 6))
    assert val >= want
    assert val == pytest.approx(want, rel=1e-9)
    with pytest.raises(TailUnbounded):
        tail_majorant(inf, ExponentialEnvelope(1.0, 2, 1), 10, 3)


def test_alpha_extension_rules():
    held = explicit_alpha([1.0, 2.0], "hold")
    assert held.value(10) == 2.0
    arith = explicit_alpha([1.0, 2.0], "arithmetic")
    assert arith.value(4) == 4.0
    bare = explicit_alpha([1.0, 2.0], None)
    with pytest.raises(IndexError):
        bare.value(3)
    with pytest.raises(ValueError):
        explicit_alpha([2.0, 1.0])  # decreasing
