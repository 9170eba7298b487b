import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metacyc.admissible import (
    NotAdmissible,
    NotInPhiImage,
    adm_basis,
    adm_generators,
    adm_membership,
    echelon_rows,
    generator_vector,
    non_admissible_witness,
    predict,
    realize,
)
from metacyc.groups import Subgroup, divisors, make_g, pair_for, whole
from metacyc.lattices import PeClassVector, omega_vec

PRIMES = [p for p in range(3, 100) if all(p % q for q in range(2, int(p**0.5) + 1))]


def vec(a, b) -> PeClassVector:
    return PeClassVector(len(a), a, b)


def test_basis_r2():
    basis = adm_basis(3, 2)
    assert [g.name for g in basis] == ["L(2)", "L'(2)"]
    assert basis[0].vector == vec([1, 0], [0, 1])
    assert basis[1].vector == vec([0, 1], [1, 0])


def test_basis_r6():
    assert sorted(g.name for g in adm_basis(7, 6)) == sorted(["L(2)", "L(6)", "L'(2)", "L'(6)"])


def test_printed_matrix_r6():
    assert echelon_rows(6) == [
        [1, 1, 1, 1, 1, 1],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 0, 1],
        [0, 0, 0, 0, 0, 1],
    ]


@pytest.mark.parametrize("p", PRIMES)
def test_basis_size_and_independence(p):
    for r in divisors(p - 1):
        basis = adm_basis(p, r)
        assert len(basis) == len(divisors(r))
        m = np.array([g.vector.coords() for g in basis])
        assert np.linalg.matrix_rank(m) == len(basis)
        if r >= 2:
            assert len(basis) < 2 * r - 1


def test_generators_lie_in_phi_image():
    for g in adm_generators(13, 12):
        assert sum(g.vector.a) == sum(g.vector.b)


def test_half_index_relation():
    # L(e/2) = L(e) + L'(e)
    for e in (2, 4, 6, 12):
        lhs = generator_vector(12, "I", e // 2)
        assert lhs == generator_vector(12, "I", e) + generator_vector(12, "II", e)


@pytest.mark.parametrize(
    "v,expected",
    [
        (vec([1, 1], [1, 1]), {"L(2)": 1, "L'(2)": 1}),
        (vec([0, 0], [0, 0]), {}),
        (vec([2, 0], [0, 2]), {"L(2)": 2}),
    ],
)
def test_membership_examples(v, expected):
    dec = adm_membership(v, 3)
    assert {g.name: m for g, m in dec.terms} == expected
    assert dec.evaluate() == v


def test_membership_rejections():
    with pytest.raises(NotInPhiImage):
        adm_membership(vec([1, 0], [0, 0]), 3)
    with pytest.raises(NotAdmissible) as info:
        adm_membership(vec([1, 0], [1, 0]), 3)
    assert info.value.certificate["reason"] in ("outside-span", "coefficient")


def test_shifted_coordinates():
    v = generator_vector(2, "I", 2)
    dec = adm_membership(omega_vec(v), 3, coords="shifted")
    assert [(g.name, m) for g, m in dec.terms] == [("L(2)", 1)]
    assert dec.evaluate() == omega_vec(v)


def test_predict_examples():
    G = make_g(3, 2)
    sigma, tau, j = (G.named[x] for x in ("sigma", "tau", "j"))
    gamma = Subgroup.generated(G, [sigma, tau])
    pre, shifted = predict(G, [(gamma, gamma)])
    assert pre == vec([1, 0], [0, 1])
    assert shifted == vec([0, 1], [0, 1])
    assert predict(G, [(whole(G), whole(G))])[0] == PeClassVector.zero(2)
    D = Subgroup.generated(G, [sigma, G.mul(tau, j)])
    C3 = Subgroup.generated(G, [sigma])
    assert predict(G, [(D, C3)]) == predict(G, [(D, D)])


def test_realize_examples():
    _, steps = realize(vec([1, 0], [0, 1]), 3)
    G = make_g(3, 2)
    gamma = Subgroup.generated(G, [G.named["sigma"], G.named["tau"]])
    assert len(steps) == 1 and steps[0].pair.D == gamma == steps[0].pair.I
    assert steps[0].witness.ell == 3
    _, steps = realize(vec([0, 1], [1, 0]), 3)
    D = Subgroup.generated(G, [G.named["sigma"], G.mul(G.named["tau"], G.named["j"])])
    assert steps[0].pair.D == D == steps[0].pair.I
    with pytest.raises(NotAdmissible):
        realize(vec([1, 0], [1, 0]), 3)


@pytest.mark.parametrize("p,r", [(3, 2), (7, 6), (13, 12)])
def test_non_admissible_witness(p, r):
    v = non_admissible_witness(p, r)
    assert sum(v.a) == sum(v.b)
    with pytest.raises(NotAdmissible):
        adm_membership(v, p)


def test_realize_of_predict_preserves_vectors():
    G = make_g(7, 6)
    pairs = [pair_for(G, "I", 1, 3), pair_for(G, "II", 2, 6), pair_for(G, "I", 6, 6)]
    pre, _ = predict(G, pairs)
    _, steps = realize(pre, 7)
    assert predict(G, [st.pair for st in steps])[0] == pre
    got = sorted((st.pair.case, st.pair.e) for st in steps)
    # L(3) is not a basis element for r = 6; it splits as L(6) + L'(6)
    assert got == sorted([("I", 6), ("II", 6), ("II", 6), ("I", 6)])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(5, 4), (7, 6), (13, 12)]), st.data())
def test_round_trip(params, data):
    p, r = params
    basis = adm_basis(p, r)
    mults = data.draw(st.lists(st.integers(0, 3), min_size=len(basis), max_size=len(basis)))
    v = PeClassVector.zero(r)
    for g, m in zip(basis, mults):
        v = v + g.vector.scale(m)
    dec, steps = realize(v, p)
    G = make_g(p, r)
    assert predict(G, [st.pair for st in steps])[0] == v
    assert dec.evaluate() == v
