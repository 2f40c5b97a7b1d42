import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbforms import fourier as fr
from sbforms import superfunc as sf
from sbforms.domain import Realization
from sbforms.fourier import CuspData, FourierMode
from sbforms.grassmann import EMPTY, MultiIndex

TWIST = CuspData(2.0, 0.25, [0.25, 0.5])
PLAIN = CuspData(1.0)


def const(c):
    return sf.constant_evaluator(c)


def hp_function(components, n=2, r=0, k=4):
    return sf.SuperFunction(n, r, k, components, Realization.HALF_PLANE)


def test_tr_I_examples():
    assert fr.tr_I(TWIST.D, []) == 0
    assert fr.tr_I(TWIST.D, [1, 2]) == pytest.approx(0.75)
    assert fr.tr_I(TWIST.D, [2]) == pytest.approx(0.5)
    with pytest.raises(IndexError):
        fr.tr_I(TWIST.D, [3])


def test_cusp_data_validation():
    with pytest.raises(ValueError):
        CuspData(0.0)
    with pytest.raises(ValueError):
        CuspData(1.0, 0.0, [[0, 1], [0, 0]])
    assert CuspData(1.0, 0.0, [[0.5, 0], [0, 0.25]]).D == (0.5, 0.25)
    assert CuspData.from_dict(TWIST.to_dict()) == TWIST


def test_frequency_lattice_examples():
    assert fr.frequency_lattice(PLAIN, EMPTY, 4, (-2, 2)) == [-2, -1, 0, 1, 2]
    cusp = CuspData(2.0, 0.0, [0.5])
    assert fr.frequency_lattice(cusp, [1], 3, (0, 2)) == pytest.approx([-0.25, 0.25, 0.75])
    shifted = fr.frequency_lattice(CuspData(1.0, 0.25), EMPTY, 4, (-2, 2))
    assert shifted == pytest.approx([-3, -2, -1, 0, 1])
    assert fr.has_zero_frequency(CuspData(1.0, 0.25), EMPTY, 4)
    assert not fr.has_zero_frequency(TWIST, EMPTY, 3)


@given(st.integers(-50, 50), st.sampled_from([(), (1,), (2,), (1, 2)]), st.integers(0, 6))
def test_lattice_index_inverts_frequency(j, I, k):
    m = fr.lattice_frequency(TWIST, I, k, j)
    assert fr.lattice_index(TWIST, I, k, m) == pytest.approx(j, abs=1e-12)
    assert fr.on_lattice(TWIST, I, k, m, atol=1e-9)
    assert not fr.on_lattice(TWIST, I, k, m + 0.1 / TWIST.lambda0, atol=1e-9)


def test_fourier_coefficient_examples():
    one = const(1.0)
    assert fr.fourier_coefficient(one, 0.0, [1.0, 0.0], PLAIN) == pytest.approx(1)
    q = fr.synthesize([FourierMode(EMPTY, -1.0, const(1.0))])[EMPTY]
    base = np.array([1.3 + 0.2j, 0.1])
    assert abs(fr.fourier_coefficient(q, -1.0, base, PLAIN) - np.exp(-2 * math.pi * base[0])) < 1e-12
    assert abs(fr.fourier_coefficient(q, 0.0, base, PLAIN)) < 1e-12


def test_linear_synthesis_recovered():
    q = fr.synthesize([FourierMode(EMPTY, -1.0, const(2.0)), FourierMode(EMPTY, -2.0, const(3.0))])[EMPTY]
    base = np.array([0.7, 0.0])
    for m, c in ((-1.0, 2.0), (-2.0, 3.0)):
        val = fr.fourier_coefficient(q, m, base, PLAIN)
        assert fr.recovered_coefficient(val, m, base) == pytest.approx(c, rel=1e-12)


def test_synthesize_examples():
    assert fr.synthesize([]) == {}
    q = fr.synthesize([FourierMode(EMPTY, -1.0, const(1.0))])[EMPTY]
    assert q(np.array([[1.0, 0.0]]))[0] == pytest.approx(math.exp(-2 * math.pi))


def test_quadrature_needs_points():
    with pytest.raises(ValueError):
        fr.fourier_coefficient(const(1.0), 0.0, [1.0, 0.0], PLAIN, quad_points=4)


def test_non_finite_values_raise():
    bad = sf.Component(lambda w: np.full(w.shape[:-1], np.nan + 0j))
    with pytest.raises(FloatingPointError):
        fr.fourier_coefficient(bad, 0.0, [1.0, 0.0], PLAIN)


@settings(max_examples=25, deadline=None)
# large Re w1 makes the smaller mode underflow relative to its neighbour, so x stays moderate
@given(st.floats(0.2, 1.0), st.floats(-5, 5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_recovered_coefficient_independent_of_base(x, y, a, b):
    u = complex(a, b)
    mode_c = sf.monomial_evaluator(1.0 - 0.5j, [1])
    modes = [FourierMode([1], fr.lattice_frequency(TWIST, [1], 3, j), mode_c) for j in (-2, 0)]
    q = fr.synthesize(modes)[MultiIndex.from_indices([1])]
    base = np.array([x + 0.5 * abs(u) ** 2 + 1j * y, u])
    for md in modes:
        val = fr.fourier_coefficient(q, md.m, base, TWIST, quad_points=64)
        assert abs(fr.recovered_coefficient(val, md.m, base) - (1.0 - 0.5j) * u) < 1e-10


def test_coefficient_table_threads_are_bitwise_identical():
    modes = [FourierMode(I, fr.lattice_frequency(TWIST, I, 3, -1), const(1.5)) for I in ([], [1], [2], [1, 2])]
    f = fr.synthesize_function(modes, 2, 2, 3)
    bases = [np.array([1.0, 0.1j]), np.array([2.0 + 1j, 0.3])]
    a = fr.coefficient_table(f, TWIST, (-3, 2), bases, 128, threads=1)
    b = fr.coefficient_table(f, TWIST, (-3, 2), bases, 128, threads=4)
    assert [r.value for r in a] == [r.value for r in b]
    assert [(r.I, r.m) for r in a] == [(r.I, r.m) for r in b]


def test_coefficient_table_needs_half_plane():
    f = sf.constant_function(2, 0, 3)
    with pytest.raises(ValueError):
        fr.coefficient_table(f, PLAIN, (0, 1), [np.array([1.0, 0])])


def test_koecher_negative_support_passes():
    f = hp_function(fr.synthesize([FourierMode(EMPTY, -1.0, const(1.0)), FourierMode(EMPTY, -2.0, const(0.5))]))
    rep = fr.koecher_check(f, PLAIN, (-3, 3), [np.array([1.0, 0.0])], tol=1e-10)
    assert rep.passed
    assert rep.max_positive < 1e-12


def test_koecher_positive_mode_fails_with_mass():
    f = hp_function(fr.synthesize([FourierMode(EMPTY, -1.0, const(1.0)), FourierMode(EMPTY, 1.0, const(0.5))]))
    base = np.array([1.1, 0.0])
    rep = fr.koecher_check(f, PLAIN, (-3, 3), [base], tol=1e-10)
    assert not rep.passed
    assert [o["m"] for o in rep.offending] == [1.0]
    assert rep.offending[0]["mass"] == pytest.approx(0.5 * math.exp(2 * math.pi * 1.1), rel=1e-12)


def test_koecher_constancy_of_constant_term():
    c0 = sf.monomial_evaluator(1.0, [1])
    f = hp_function(fr.synthesize([FourierMode(EMPTY, 0.0, c0)]))
    bases = [np.array([1.0, 0.2]), np.array([1.0, 0.5j])]
    rep = fr.koecher_check(f, PLAIN, (-1, 1), bases, tol=1e-10)
    assert not rep.passed
    assert rep.constancy[0]["constant"] is False
    ok = hp_function(fr.synthesize([FourierMode(EMPTY, 0.0, const(2.0))]))
    assert fr.koecher_check(ok, PLAIN, (-1, 1), bases, tol=1e-10).passed


def test_liouville_examples():
    one = const(1.0)
    assert fr.liouville_bound_check(one, -1.0, 1.0, [0.5, 1.0, 2.0]).passed
    rep = fr.liouville_bound_check(one, 1.0, 1.0, [2.0])
    assert not rep.passed
    assert rep.worst_ratio == pytest.approx(math.exp(4 * math.pi))
    zero = const(0.0)
    assert fr.liouville_bound_check(zero, 3.0, 0.0, [1.0, 5.0]).passed
    with pytest.raises(ValueError):
        fr.liouville_bound_check(one, 1.0, 1.0, [0.0])
