"""Operator representations, contraction certificates, modulus, adjoints."""

import numpy as np
import pytest

from ergosym import (
    AtomicMeasureSpace,
    CompositionOperator,
    InputError,
    KernelOperator,
    MeasurableFunction,
    adjoint,
    adjoint_modulus_commutation,
    apply,
    ds_certificate,
    linear_modulus,
    majorizes,
    modulus_domination_check,
    norm,
    pairing,
    signed_shift_operator,
)
from oracles import modulus_sup_oracle


def unit_space(n):
    return AtomicMeasureSpace(np.ones(n))


def mk(values, space):
    return MeasurableFunction(np.asarray(values, dtype=complex), space)


def random_ds_kernel(rng, n, weights=None):
    """Random signed kernel scaled so both contraction sums are <= 1."""
    sp = AtomicMeasureSpace(
        np.ones(n) if weights is None else weights
    )
    k = rng.normal(size=(n, n))
    w = sp.weights
    col = np.max((w @ np.abs(k)) / w)
    row = np.max(np.sum(np.abs(k), axis=1))
    k /= max(col, row) * (1.0 + 1e-9)
    return KernelOperator(k, sp)


# --------------------------------------------------------------------- apply


def test_apply_identity():
    sp = unit_space(3)
    f = mk([1.0, 2.0 + 1j, -3.0], sp)
    T = KernelOperator(np.eye(3), sp)
    assert np.array_equal(apply(T, f).values, f.values)


def test_apply_cyclic_composition():
    sp = unit_space(3)
    T = CompositionOperator(
        np.array([1, 2, 0]), np.ones(3, dtype=complex), sp, measure_preserving=True
    )
    out = apply(T, mk([10.0, 20.0, 30.0], sp))
    assert np.allclose(out.values, [20.0, 30.0, 10.0])


def test_apply_kernel_example():
    sp = unit_space(2)
    T = KernelOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), sp)
    out = apply(T, mk([5.0, 7.0], sp))
    assert np.allclose(out.values, [7.0, 0.0])


def test_apply_space_mismatch():
    T = KernelOperator(np.eye(2), unit_space(2))
    f = mk([1.0, 2.0, 3.0], unit_space(3))
    with pytest.raises(InputError):
        apply(T, f)


def test_operator_validation():
    sp = unit_space(2)
    with pytest.raises(InputError):
        KernelOperator(np.eye(3), sp)
    with pytest.raises(InputError):
        CompositionOperator(np.array([0, 5]), np.ones(2), sp)
    with pytest.raises(InputError):
        CompositionOperator(np.array([0, 1]), np.array([1.0, 2.0]), sp)
    with pytest.raises(InputError):
        # declared measure preserving but not a bijection
        CompositionOperator(
            np.array([0, 0]), np.ones(2), sp, measure_preserving=True
        )


# --------------------------------------------------------------- certificates


def test_ds_certificate_permutation_exactly_one():
    sp = unit_space(4)
    T = CompositionOperator(
        np.array([1, 2, 3, 0]),
        np.exp(1j * np.array([0.3, 1.1, -0.4, 2.0])),
        sp,
        measure_preserving=True,
    )
    rep = ds_certificate(T)
    assert rep.ds_ok
    assert rep.worst_column_sum == pytest.approx(1.0, abs=1e-12)
    assert rep.worst_row_sum == pytest.approx(1.0, abs=1e-12)


def test_ds_certificate_row_violation():
    sp = unit_space(2)
    rep = ds_certificate(KernelOperator(np.array([[1.0, 1.0], [0.0, 0.0]]), sp))
    assert rep.l1_ok
    assert not rep.linf_ok
    assert rep.worst_row_sum == pytest.approx(2.0)


def test_ds_certificate_hand_sums():
    sp = unit_space(2)
    rep = ds_certificate(
        KernelOperator(np.array([[0.5, 0.25], [0.25, 0.5]]), sp)
    )
    assert rep.ds_ok
    assert rep.worst_column_sum == pytest.approx(0.75)
    assert rep.worst_row_sum == pytest.approx(0.75)


def test_ds_certificate_weighted_columns():
    # weights skew the L1 condition: mass moved into a light atom counts more
    sp = AtomicMeasureSpace(np.array([2.0, 0.5]))
    k = np.array([[0.0, 0.0], [1.0, 0.0]])  # sends atom-0 values to atom 1
    rep = ds_certificate(KernelOperator(k, sp))
    # column 0 mass: w_1 * 1 / w_0 = 0.5 / 2? no: sum_i w_i |K[i,0]| / w_0 = 0.5/2
    assert rep.worst_column_sum == pytest.approx(0.25)
    assert rep.ds_ok


def test_ds_certificate_sound_on_random_f():
    rng = np.random.default_rng(31)
    T = random_ds_kernel(rng, 12)
    assert ds_certificate(T).ds_ok
    for _ in range(100):
        v = rng.normal(size=12) + 1j * rng.normal(size=12)
        f = MeasurableFunction(v, T.space)
        tf = apply(T, f)
        assert norm(tf, "L1") <= norm(f, "L1") * (1 + 1e-12)
        assert norm(tf, "Linf") <= norm(f, "Linf") * (1 + 1e-12)


def test_ds_implies_majorization():
    rng = np.random.default_rng(32)
    for _ in range(20):
        n = int(rng.integers(2, 16))
        T = random_ds_kernel(rng, n)
        f = MeasurableFunction(rng.normal(size=n), T.space)
        assert majorizes(f, apply(T, f))


# -------------------------------------------------------------------- modulus


def test_modulus_hand_example():
    sp = unit_space(2)
    T = KernelOperator(np.array([[0.3, -0.4], [-0.2, 0.1]]), sp)
    out = apply(linear_modulus(T), mk([1.0, 1.0], sp))
    assert np.allclose(out.values, [0.7, 0.3])
    # and this is the sign-vector supremum
    assert np.allclose(modulus_sup_oracle(T.matrix.real, [1.0, 1.0]), [0.7, 0.3])


def test_modulus_fixes_nonnegative_kernels():
    sp = unit_space(3)
    k = np.array([[0.1, 0.2, 0.0], [0.0, 0.3, 0.1], [0.2, 0.0, 0.2]])
    T = KernelOperator(k, sp)
    assert np.array_equal(linear_modulus(T).matrix, k)


def test_modulus_matches_sign_vector_sup_randomized():
    rng = np.random.default_rng(33)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        k = rng.normal(size=(n, n))
        f = rng.uniform(0.0, 2.0, size=n)
        sp = unit_space(n)
        got = apply(linear_modulus(KernelOperator(k, sp)), mk(f, sp)).values.real
        want = modulus_sup_oracle(k, f)
        assert np.max(np.abs(got - want)) <= 1e-12


def test_modulus_phase_grid_bound_complex():
    # complex kernels: any finite phase grid stays below |K| f and refines up
    rng = np.random.default_rng(34)
    k = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = np.array([1.0, 1.5])
    sp = unit_space(2)
    exact = apply(linear_modulus(KernelOperator(k, sp)), mk(f, sp)).values.real
    prev_gap = np.inf
    for grid in (8, 64):
        phases = np.exp(2j * np.pi * np.arange(grid) / grid)
        best = np.zeros(2)
        for a in phases:
            for b in phases:
                best = np.maximum(best, np.abs(k @ (f * np.array([a, b]))))
        gap = float(np.max(exact - best))
        assert gap >= -1e-12
        assert gap <= prev_gap + 1e-15
        prev_gap = gap
    assert prev_gap <= 1e-3


def test_modulus_domination_equalizes_under_sign_conjugation():
    # K = D |K| D with D = diag(1, -1), so f = (1, -1) gives exact equality
    sp = unit_space(2)
    T = KernelOperator(np.array([[0.3, -0.4], [-0.2, 0.1]]), sp)
    res = modulus_domination_check(T, mk([1.0, -1.0], sp), kmax=5)
    assert res
    assert res.min_slack == pytest.approx(0.0, abs=1e-15)


def test_modulus_domination_strict_slack():
    sp = unit_space(2)
    T = KernelOperator(np.array([[0.3, -0.4], [-0.2, 0.1]]), sp)
    res1 = modulus_domination_check(T, mk([1.0, 1.0], sp), kmax=1)
    assert res1.min_slack == pytest.approx(0.2, abs=1e-15)  # |Tf|=(0.1,0.1)
    res5 = modulus_domination_check(T, mk([1.0, 1.0], sp), kmax=5)
    assert res5
    assert res5.min_slack > 0.0  # cancellation in Tf leaves real room


def test_modulus_domination_positive_equality():
    rng = np.random.default_rng(35)
    sp = unit_space(4)
    k = np.abs(rng.normal(size=(4, 4))) / 4
    f = mk(rng.uniform(0.5, 1.0, size=4), sp)
    res = modulus_domination_check(KernelOperator(k, sp), f, kmax=6)
    assert res.min_slack == pytest.approx(0.0, abs=1e-12)


def test_modulus_domination_signed_permutation_isometry():
    sp = unit_space(3)
    T = CompositionOperator(
        np.array([1, 2, 0]), -np.ones(3), sp, measure_preserving=True
    )
    f = mk([0.3, -1.2, 0.7], sp)
    res = modulus_domination_check(T, f, kmax=7)
    assert res.min_slack == pytest.approx(0.0, abs=1e-15)


def test_modulus_domination_randomized_holds():
    rng = np.random.default_rng(36)
    for _ in range(25):
        n = int(rng.integers(2, 10))
        T = random_ds_kernel(rng, n)
        f = MeasurableFunction(rng.normal(size=n) + 1j * rng.normal(size=n), T.space)
        assert modulus_domination_check(T, f, kmax=10)


def test_modulus_shares_operator_norms():
    # contraction sums only see moduli, so |T| carries the same norms
    rng = np.random.default_rng(37)
    k = rng.normal(size=(5, 5))
    sp = AtomicMeasureSpace(rng.uniform(0.5, 2.0, size=5))
    a, b = ds_certificate(KernelOperator(k, sp)), ds_certificate(
        linear_modulus(KernelOperator(k, sp))
    )
    assert a.worst_column_sum == pytest.approx(b.worst_column_sum, abs=1e-15)
    assert a.worst_row_sum == pytest.approx(b.worst_row_sum, abs=1e-15)


# -------------------------------------------------------------------- adjoint


def test_adjoint_unit_weights_is_conjugate_transpose():
    sp = unit_space(3)
    k = np.array([[1.0, 2.0, 0.0], [0.0, 1j, 0.0], [0.5, 0.0, -1.0]])
    assert np.allclose(adjoint(KernelOperator(k, sp)).matrix, np.conj(k).T)


def test_adjoint_weighted_hand_example():
    sp = AtomicMeasureSpace(np.array([1.0, 2.0]))
    T = KernelOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), sp)
    Ts = adjoint(T)
    assert np.allclose(Ts.matrix, [[0.0, 0.0], [0.5, 0.0]])
    f = mk([0.0, 1.0], sp)
    g = mk([1.0, 0.0], sp)
    lhs = pairing(apply(T, f), g)
    rhs = pairing(f, apply(Ts, g))
    assert lhs == pytest.approx(1.0)
    assert rhs == pytest.approx(1.0)


def test_adjoint_involution_and_duality_randomized():
    rng = np.random.default_rng(38)
    for _ in range(30):
        n = int(rng.integers(1, 9))
        sp = AtomicMeasureSpace(rng.uniform(0.2, 3.0, size=n))
        k = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        T = KernelOperator(k, sp)
        assert np.max(np.abs(adjoint(adjoint(T)).matrix - k)) <= 1e-12
        f = MeasurableFunction(rng.normal(size=n) + 1j * rng.normal(size=n), sp)
        g = MeasurableFunction(rng.normal(size=n) + 1j * rng.normal(size=n), sp)
        lhs = pairing(apply(adjoint(T), f), g)
        rhs = pairing(f, apply(T, g))
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_adjoint_of_ds_is_ds():
    rng = np.random.default_rng(39)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        w = rng.uniform(0.5, 2.0, size=n)
        T = random_ds_kernel(rng, n, weights=w)
        assert ds_certificate(T).ds_ok
        # duality swaps the two contraction conditions
        assert ds_certificate(adjoint(T)).ds_ok


def test_adjoint_modulus_commutation():
    rng = np.random.default_rng(40)
    sp = AtomicMeasureSpace(np.array([1.0, 2.0, 0.7]))
    k = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert adjoint_modulus_commutation(KernelOperator(k, sp))


def test_adjoint_rejects_composition():
    sp = unit_space(2)
    T = CompositionOperator(np.array([1, 0]), np.ones(2), sp)
    with pytest.raises(InputError):
        adjoint(T)


# --------------------------------------------------------------- signed shift


def test_signed_shift_phi_pattern():
    # breakpoints (1, 5): sign flips on cells [0,1) and [4,5)
    T = signed_shift_operator([1, 5], grid=1, window=6)
    assert np.allclose(T.multiplier[:5].real, [-1, 1, 1, 1, -1])
    # last atom absorbs (shift would leave the window)
    assert T.multiplier[5] == 0
    assert T.point_map[5] == 5
    assert np.all(T.point_map[:5] == np.arange(1, 6))


def test_signed_shift_is_ds_and_unit_cells():
    T = signed_shift_operator([1, 5, 17], grid=10, window=17)
    assert ds_certificate(T).ds_ok
    assert np.all(np.isin(T.multiplier.real, [-1.0, 0.0, 1.0]))
    assert T.space.truncated
    assert T.space.n_atoms == 170
    assert T.space.weights[0] == pytest.approx(0.1)


def test_signed_shift_once_reproduces_phi_on_ones():
    T = signed_shift_operator([1, 5], grid=1, window=6)
    f = MeasurableFunction.ones(T.space)
    out = apply(T, f)
    assert np.allclose(out.values[:5].real, [-1, 1, 1, 1, -1])


def test_signed_shift_validation():
    with pytest.raises(InputError):
        signed_shift_operator([], grid=1, window=5)
    with pytest.raises(InputError):
        signed_shift_operator([0, 2], grid=1, window=5)
    with pytest.raises(InputError):
        signed_shift_operator([2, 2], grid=1, window=5)
    with pytest.raises(InputError):
        signed_shift_operator([1, 5], grid=1, window=4)
    with pytest.raises(InputError):
        signed_shift_operator([1, 5], grid=0, window=6)
