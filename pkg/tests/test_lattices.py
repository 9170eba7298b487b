import numpy as np
import pytest

from metacyc.chainring import random_invertible, zeros
from metacyc.lattices import (
    ClassVector,
    GammaParams,
    InvalidLattice,
    LatticeRep,
    NotFinite,
    PeClassVector,
    direct_sum,
    fingerprint,
    is_in_phi_image,
    lattice_from_vector,
    make_L1,
    make_L2,
    make_L3,
    omega1_module,
    omega_class,
    omega_lattice,
    omega_vec,
    omega_vec_inv,
    phi,
    projective_cover,
    regular_lattice,
    tate_cohomology_cp,
)
from metacyc.modules import LambdaModule, direct_sum as module_sum, fp_twist

PARAMS = [(3, 2), (5, 4), (7, 3), (7, 6)]


def unit(r: int, kind: int, i: int) -> ClassVector:
    z = [0] * r
    coords = {1: list(z), 2: list(z), 3: list(z)}
    coords[kind][i % r] = 1
    return ClassVector(r, coords[1], coords[2], coords[3])


def lattice_quotient(L: LatticeRep, sub: np.ndarray) -> LambdaModule:
    """L / (columns of ``sub``) as a finite module."""
    M = L.to_module()
    return LambdaModule(M.ctx, M.group, sub, M.actions)


def test_l1_zero_is_trivial():
    L = make_L1(GammaParams(5, 4), 0)
    assert L.sigma.tolist() == [[1]] and L.tau.tolist() == [[1]]


def test_l2_matrices_for_p3():
    gp = GammaParams(3, 2)
    L = make_L2(gp, 0)
    mod = gp.ctx.modulus
    assert (L.sigma % mod).tolist() == (np.array([[0, -1], [1, -1]]) % mod).tolist()
    assert (L.tau % mod).tolist() == (np.array([[1, -1], [0, -1]]) % mod).tolist()


@pytest.mark.parametrize("p,r", PARAMS + [(5, 1)])
def test_constructors_satisfy_relations_and_ranks(p, r):
    gp = GammaParams(p, r)
    for i in range(r):
        for mk, rank in ((make_L1, 1), (make_L2, p - 1), (make_L3, p)):
            L = mk(gp, i)
            assert L.relations_hold()
            assert L.rank == rank


@pytest.mark.parametrize("p,r", PARAMS)
def test_unit_fingerprints(p, r):
    gp = GammaParams(p, r)
    for i in range(r):
        for kind, mk in ((1, make_L1), (2, make_L2), (3, make_L3)):
            assert fingerprint(mk(gp, i)) == unit(r, kind, i)


def test_tate_cohomology_of_constructors():
    gp = GammaParams(5, 4)
    for i in range(4):
        ev = pow(gp.s, i, 5)
        h0, h1 = tate_cohomology_cp(make_L1(gp, i))
        assert (h0.dim, h1.dim) == (1, 0) and h0.tau[0, 0] == ev
        h0, h1 = tate_cohomology_cp(make_L2(gp, i))
        assert (h0.dim, h1.dim) == (0, 1) and h1.tau[0, 0] == ev
        h0, h1 = tate_cohomology_cp(make_L3(gp, i))
        assert (h0.dim, h1.dim) == (0, 0)


@pytest.mark.parametrize("p,r", PARAMS)
def test_regular_lattice_is_sum_of_free_lattices(p, r):
    assert fingerprint(regular_lattice(GammaParams(p, r))) == ClassVector(r, [0] * r, [0] * r, [1] * r)


@pytest.mark.parametrize("p,r", [(5, 4), (7, 3)])
def test_fingerprint_recovers_scrambled_sums(p, r):
    gp = GammaParams(p, r)
    rng = np.random.default_rng(7)
    for _ in range(10):
        v = ClassVector(r, *(rng.integers(0, 2, size=(3, r))))
        L = lattice_from_vector(gp, v)
        if L.rank == 0:
            continue
        q, qi = random_invertible(L.rank, gp.ctx, rng)
        assert fingerprint(L.base_change(q, qi)) == v


def test_fingerprint_of_permutation_lattice_and_bad_data():
    gp = GammaParams(3, 2)
    mod = gp.ctx.modulus
    # trivial σ, τ swapping two basis vectors: the eigenlines of τ are L_1^0 and L_1^1
    perm = LatticeRep(gp, [[1, 0], [0, 1]], [[0, 1], [1, 0]])
    assert fingerprint(perm) == ClassVector(2, [1, 1], [0, 0], [0, 0])
    bad = LatticeRep(gp, zeros((2, 2), mod), [[1, 0], [0, 1]])
    with pytest.raises((InvalidLattice, ValueError, ArithmeticError)):
        fingerprint(bad)


@pytest.mark.parametrize("p,r", PARAMS)
def test_omega_identities(p, r):
    gp = GammaParams(p, r)
    for i in range(r):
        assert omega_class(make_L1(gp, i)) == PeClassVector.unit(r, 2, i + 1)
        assert omega_class(make_L2(gp, i)) == PeClassVector.unit(r, 1, i)
        assert omega_lattice(make_L3(gp, i)).rank == 0


@pytest.mark.parametrize("p,r", [(3, 2), (7, 3)])
def test_omega_rank_bookkeeping(p, r):
    gp = GammaParams(p, r)
    L = lattice_from_vector(gp, ClassVector(r, [1] + [0] * (r - 1), [0] * (r - 1) + [2], [1] * r))
    cov = projective_cover(gp, gp.ctx, L.sigma, L.tau, zeros((L.rank, 0), gp.ctx.modulus))
    assert omega_lattice(L).rank == p * sum(cov.tops) - L.rank


def test_omega_vec_inverse():
    v = PeClassVector(4, [1, 0, 2, 0], [0, 3, 0, 1])
    assert omega_vec_inv(omega_vec(v)) == v
    assert omega_vec(omega_vec_inv(v)) == v


@pytest.mark.parametrize("p,r", PARAMS)
def test_phi_of_twisted_fp(p, r):
    gp = GammaParams(p, r)
    for i in range(r):
        expect = PeClassVector.unit(r, 1, i) + PeClassVector.unit(r, 2, i + 1)
        assert phi(fp_twist(p, r, i, gp.s, gp.ctx)) == expect


def test_phi_additive_and_in_image():
    gp = GammaParams(5, 4)
    X = module_sum(fp_twist(5, 4, 1, ctx=gp.ctx), fp_twist(5, 4, 3, ctx=gp.ctx))
    v = phi(X)
    assert v == phi(fp_twist(5, 4, 1, ctx=gp.ctx)) + phi(fp_twist(5, 4, 3, ctx=gp.ctx))
    assert is_in_phi_image(v)


def test_phi_rejects_infinite_module():
    L = make_L2(GammaParams(3, 2), 0)
    with pytest.raises(NotFinite):
        phi(lattice_quotient(L, zeros((2, 0), L.ctx.modulus)))


@pytest.mark.parametrize("p,r", [(3, 2), (5, 4)])
def test_omega1_square_commutes(p, r):
    gp = GammaParams(p, r)
    for i in range(r):
        X = fp_twist(p, r, i, gp.s, gp.ctx)
        assert phi(omega1_module(X)) == omega_vec(phi(X))


def test_phi_image_examples():
    assert is_in_phi_image(PeClassVector(2, [1, 0], [0, 1]))
    assert not is_in_phi_image(PeClassVector(2, [1, 0], [0, 0]))


def test_r2_mixed_pairs_all_reachable():
    """Quotients L_2^j / (1 - ζ)^m hit (e_i, e_j) for all four index pairs."""
    gp = GammaParams(3, 2)
    mod = gp.ctx.modulus
    seen = set()
    for j in range(2):
        L = make_L2(gp, j)
        one_minus = (np.eye(2, dtype=np.int64) - L.sigma) % mod
        for m in (1, 2, 3):
            x = np.linalg.matrix_power(np.array(one_minus, dtype=object), m) % mod
            v = phi(lattice_quotient(L, x))
            assert sum(v.a) == sum(v.b) == 1
            seen.add((v.a.index(1), v.b.index(1)))
    assert seen == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_rank_formula():
    v = ClassVector(2, [1, 0], [0, 2], [1, 1])
    assert v.rank(5) == 1 + 2 * 4 + 2 * 5
    assert lattice_from_vector(GammaParams(5, 2), v).rank == v.rank(5)


def test_direct_sum_of_lattices():
    gp = GammaParams(3, 2)
    L = direct_sum(gp, [make_L1(gp, 0), make_L3(gp, 1)])
    assert L.rank == 4 and L.relations_hold()
    assert fingerprint(L) == ClassVector(2, [1, 0], [0, 0], [0, 1])
