import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from metacyc.chainring import (
    ChainMatrix,
    PrecisionError,
    RingCtx,
    as_mat,
    fp_eigenspace_dims,
    inverse_mod,
    is_prime,
    kernel_mod,
    mmul,
    random_invertible,
    rank_mod_p,
    saturated_kernel,
    snf,
    teichmuller,
    valuation,
)


def p_part_exponents(m: list[list[int]], p: int, prec: int) -> list[int]:
    """Oracle: p-adic valuations of the integer Smith invariants, capped at prec."""
    d = sympy_snf(sympy.Matrix(m), domain=sympy.ZZ)
    n = min(d.shape)
    return sorted(min(valuation(int(d[i, i]), p, prec), prec) if d[i, i] else prec for i in range(n))


def test_is_prime_and_valuation():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert valuation(72, 3) == 2
    assert valuation(0, 5, cap=4) == 4


# lifts at precision 3 reduce to the precision-2 lifts (contexts need k >= 3)
@pytest.mark.parametrize("p,s,expected", [(5, 2, 7), (3, 2, 8), (7, 1, 1)])
def test_teichmuller_examples(p, s, expected):
    assert teichmuller(s, RingCtx(p, 3)) % p**2 == expected


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_teichmuller_has_order_dividing_p_minus_1(p):
    ctx = RingCtx(p, 5)
    rng = np.random.default_rng(p)
    for s in rng.integers(1, 10**6, size=100):
        if s % p == 0:
            continue
        rho = teichmuller(int(s), ctx)
        assert rho % p == s % p
        assert pow(rho, p - 1, ctx.modulus) == 1


def test_teichmuller_rejects_nonunit():
    with pytest.raises(ValueError):
        teichmuller(10, RingCtx(5, 3))


def test_mmul_limb_split_matches_python_ints():
    p, k = 13, 8
    mod = p**k
    rng = np.random.default_rng(1)
    a = rng.integers(0, mod, size=(7, 9))
    b = rng.integers(0, mod, size=(9, 5))
    got = mmul(as_mat(a, mod), as_mat(b, mod), mod)
    want = (np.array(a, dtype=object) @ np.array(b, dtype=object)) % mod
    assert (np.array(got, dtype=object) == want).all()


@pytest.mark.parametrize("seed", range(6))
def test_snf_matches_sympy_oracle(seed):
    rng = np.random.default_rng(seed)
    p, prec = 3, 5
    n, m = rng.integers(2, 6, size=2)
    a = rng.integers(-9, 10, size=(n, m)) * rng.choice([1, 3, 9], size=(n, m))
    sf = snf(as_mat(a % p**prec, p**prec), p, prec)
    exps = sorted(sf.exponents + [prec] * (min(n, m) - len(sf.exponents)))
    assert exps[: min(n, m)] == p_part_exponents(a.tolist(), p, prec)


@pytest.mark.parametrize("seed", range(4))
def test_snf_factorization_identities(seed):
    rng = np.random.default_rng(seed)
    p, prec = 5, 4
    mod = p**prec
    a = as_mat(rng.integers(0, mod, size=(4, 6)) * 5, mod)
    sf = snf(a, p, prec)
    D = sf.diagonal(a.shape)
    assert (mmul(mmul(sf.U, D, mod), sf.V, mod) == a).all()
    assert (mmul(mmul(sf.L, a, mod), sf.R, mod) == D).all()
    assert (mmul(sf.U, sf.L, mod) == np.eye(4, dtype=a.dtype)).all()


def test_kernel_of_multiplication_by_p():
    ctx = RingCtx(3, 4)
    A = ChainMatrix(ctx, as_mat([[3, 0], [0, 1]], ctx.modulus), 4)
    K = kernel_mod(A)
    assert K.valid_prec == 3
    # the kernel of diag(3, 1) mod 3^4 is generated by 27 e_1
    assert K.entries.shape[1] == 1
    assert valuation(int(K.entries[0, 0]), 3) == 3 and K.entries[1, 0] == 0


def test_kernel_needs_precision():
    ctx = RingCtx(3, 3)
    with pytest.raises(PrecisionError):
        kernel_mod(ChainMatrix(ctx, as_mat([[1]], 27), 1))


@pytest.mark.parametrize("seed", range(5))
def test_kernel_stable_under_extra_precision(seed):
    # matrices whose cokernel torsion is killed by p, as in the Tate computations
    p, k = 5, 4
    rng = np.random.default_rng(seed)
    base = rng.integers(0, p**6, size=(3, 4))
    base[:, 0] *= p
    spans = []
    for prec in (k, k + 1):
        ctx = RingCtx(p, prec)
        K = kernel_mod(ChainMatrix(ctx, as_mat(base % ctx.modulus, ctx.modulus), prec))
        spans.append(K.entries % p ** (k - 1))
    lo = p ** (k - 1)

    def invariants(m):
        return sorted(d for d in snf(as_mat(m % lo, lo), p, k - 1).exponents if d < k - 1)

    both = np.concatenate(spans, axis=1)
    assert invariants(spans[0]) == invariants(spans[1]) == invariants(both)


def test_saturated_kernel_of_surjection_is_exact():
    p, prec = 5, 3
    mod = p**prec
    a = as_mat([[1, 1, 0], [0, 1, 1]], mod)
    B, C, out = saturated_kernel(a, p, prec, exact=True)
    assert out == prec and B.shape == (3, 1)
    assert not mmul(a, B, mod).any()
    assert (mmul(C, B, mod) == 1).all()


def test_saturated_kernel_rejects_torsion_when_exact():
    with pytest.raises(ValueError):
        saturated_kernel(as_mat([[5, 0]], 125), 5, 3, exact=True)


def test_inverse_and_random_invertible():
    ctx = RingCtx(7, 3)
    q, qi = random_invertible(5, ctx, np.random.default_rng(0))
    assert (mmul(q, qi, ctx.modulus) == np.eye(5, dtype=q.dtype)).all()
    with pytest.raises(ValueError):
        inverse_mod(as_mat([[7]], ctx.modulus), 7, 3)


def test_eigenspace_dims_of_permutation():
    # cyclic shift of order 4 over F_5 has the four 4th roots of unity once each
    shift = np.roll(np.eye(4, dtype=np.int64), 1, axis=0)
    assert fp_eigenspace_dims(shift, [1, 2, 4, 3], 5) == [1, 1, 1, 1]
    with pytest.raises(ValueError):
        fp_eigenspace_dims(shift, [1, 6], 5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_exponents_invariant_under_base_change(seed, n):
    ctx = RingCtx(3, 4)
    rng = np.random.default_rng(seed)
    a = as_mat(rng.integers(0, 3, size=(n, n)) * rng.choice([1, 3, 9], size=(n, n)), ctx.modulus)
    q, _ = random_invertible(n, ctx, rng)
    q2, _ = random_invertible(n, ctx, rng)
    b = mmul(mmul(q, a, ctx.modulus), q2, ctx.modulus)
    assert sorted(snf(a, 3, 4).exponents) == sorted(snf(b, 3, 4).exponents)
    assert rank_mod_p(a, 3) == rank_mod_p(b, 3)
