"""The admissible submonoid and the ramification predictor/realizer.

Two coordinate systems appear: ``preshift`` vectors are Φ of minus parts of
the local modules A; ``shifted`` vectors are Φ of the class-group side, one
application of Ω later.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groups import (
    GroupModel,
    LocalWitness,
    PairDI,
    Subgroup,
    classify_pair,
    divisors,
    local_witness,
    make_g,
    pair_for,
)
from .lattices import PeClassVector, is_in_phi_image, omega_vec, omega_vec_inv

COORDS = ("preshift", "shifted")


class NotAdmissible(ValueError):
    def __init__(self, message: str, certificate: dict):
        super().__init__(message)
        self.certificate = certificate


class NotInPhiImage(NotAdmissible):
    pass


@dataclass(frozen=True)
class AdmGenerator:
    kind: str  # "I" or "II"
    e: int
    vector: PeClassVector

    @property
    def name(self) -> str:
        return f"L({self.e})" if self.kind == "I" else f"L'({self.e})"


def generator_vector(r: int, kind: str, e: int) -> PeClassVector:
    """``Σ (L_1^i + L_2^{i+1})`` over ``e | i`` (kind I) or ``e/2 | i, e ∤ i`` (kind II)."""
    if r % e or (kind == "II" and e % 2):
        raise ValueError(f"no generator of kind {kind} for e = {e}, r = {r}")
    a, b = [0] * r, [0] * r
    for i in range(r):
        hit = i % e == 0 if kind == "I" else (i % (e // 2) == 0 and i % e != 0)
        if hit:
            a[i] += 1
            b[(i + 1) % r] += 1
    return PeClassVector(r, a, b)


def adm_generators(p: int, r: int) -> list[AdmGenerator]:
    if (p - 1) % r:
        raise ValueError(f"r = {r} does not divide p - 1 = {p - 1}")
    gens = [AdmGenerator("I", e, generator_vector(r, "I", e)) for e in divisors(r)]
    gens += [AdmGenerator("II", e, generator_vector(r, "II", e)) for e in divisors(r) if e % 2 == 0]
    return gens


def adm_basis(p: int, r: int) -> list[AdmGenerator]:
    """``L(e)`` for ``2e ∤ r`` and ``L'(e)`` for even ``e``; ``L(e/2) = L(e) + L'(e)`` covers the rest."""
    return [g for g in adm_generators(p, r) if (g.kind == "I" and r % (2 * g.e)) or g.kind == "II"]


def echelon_rows(r: int) -> list[list[int]]:
    """Rows ``v(e)`` for ``e | r``, columns ``i = 1 .. r``, entry 1 iff ``e | i``."""
    return [[1 if i % e == 0 else 0 for i in range(1, r + 1)] for e in divisors(r)]


def _solve_exact(columns: list[list[int]], target: list[int]) -> list[Fraction] | None:
    """Unique solution of ``Σ x_j columns[j] = target`` over Q, or None if inconsistent.

    The columns must be linearly independent.
    """
    n = len(columns)
    rows = [[Fraction(col[i]) for col in columns] + [Fraction(target[i])] for i in range(len(target))]
    piv_cols, r = [], 0
    for c in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            raise ValueError("basis columns are linearly dependent")
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    return [rows[i][n] for i in range(n)]


@dataclass
class AdmDecomposition:
    coords: str
    r: int
    terms: list[tuple[AdmGenerator, int]]
    witnesses: list[dict] = field(default_factory=list)

    def evaluate(self) -> PeClassVector:
        v = PeClassVector.zero(self.r)
        for g, m in self.terms:
            v = v + g.vector.scale(m)
        return omega_vec(v) if self.coords == "shifted" else v

    def to_json(self) -> dict:
        return {
            "coords": self.coords,
            "terms": [{"kind": g.kind, "e": g.e, "mult": m} for g, m in self.terms],
            "witnesses": self.witnesses,
        }


def _to_preshift(v: PeClassVector, coords: str) -> PeClassVector:
    if coords not in COORDS:
        raise ValueError(f"coords must be one of {COORDS}")
    return omega_vec_inv(v) if coords == "shifted" else v


def adm_membership(v: PeClassVector, p: int, coords: str = "preshift") -> AdmDecomposition:
    """Unique decomposition over the free basis, or :class:`NotAdmissible`."""
    r = v.r
    if not is_in_phi_image(v):
        raise NotInPhiImage(
            f"not in the image of Φ: Σa = {sum(v.a)} != Σb = {sum(v.b)}",
            {"reason": "sum-mismatch", "sum_a": sum(v.a), "sum_b": sum(v.b)},
        )
    w = _to_preshift(v, coords)
    basis = adm_basis(p, r)
    x = _solve_exact([g.vector.coords() for g in basis], w.coords())
    if x is None:
        raise NotAdmissible(
            "vector is outside the span of the admissible basis",
            {"reason": "outside-span", "vector": v.to_json(), "coords": coords},
        )
    bad = [(g, c) for g, c in zip(basis, x) if c.denominator != 1 or c < 0]
    if bad:
        g, c = bad[0]
        raise NotAdmissible(
            f"coefficient of {g.name} is {c}, not a nonnegative integer",
            {
                "reason": "coefficient",
                "coords": coords,
                "coefficients": {h.name: str(cx) for h, cx in zip(basis, x)},
                "failing": g.name,
            },
        )
    terms = [(g, int(c)) for g, c in zip(basis, x) if c != 0]
    return AdmDecomposition(coords, r, terms)


def pair_vector(pr: PairDI, r: int) -> PeClassVector:
    """Φ of the minus part of A for one pair, in preshift coordinates."""
    if pr.case == "irrelevant":
        return PeClassVector.zero(r)
    return generator_vector(r, pr.case, pr.e)


def predict(G: GroupModel, pairs: list[PairDI | tuple[Subgroup, Subgroup]]) -> tuple[PeClassVector, PeClassVector]:
    """Summed per-pair vectors: ``(preshift, shifted)``."""
    p, r, _ = G.params
    total = PeClassVector.zero(r)
    for pr in pairs:
        if not isinstance(pr, PairDI):
            pr = classify_pair(G, *pr)
        total = total + pair_vector(pr, r)
    return total, omega_vec(total)


@dataclass
class RealizationStep:
    generator: AdmGenerator
    pair: PairDI
    witness: LocalWitness

    def to_json(self) -> dict:
        out = self.pair.to_json()
        out.update(generator=self.generator.name, witness=self.witness.to_json())
        return out


def realize(v: PeClassVector, p: int, s: int | None = None, coords: str = "preshift") -> tuple[AdmDecomposition, list[RealizationStep]]:
    """A ramification plan: one pair ``D = I`` per copy of a basis generator."""
    dec = adm_membership(v, p, coords)
    G = make_g(p, v.r, s)
    steps = []
    for g, mult in dec.terms:
        pr = pair_for(G, g.kind, g.e, g.e)
        w = local_witness(pr.D, pr.I)
        steps += [RealizationStep(g, pr, w)] * mult
    dec.witnesses = [st.witness.to_json() for st in steps]
    return dec, steps


def non_admissible_witness(p: int, r: int) -> PeClassVector:
    """A Φ-image vector outside the admissible monoid (exists for every ``r >= 2``)."""
    if r < 2:
        raise ValueError("every Φ-image vector is admissible when r = 1")
    cand = PeClassVector(r, [1] + [0] * (r - 1), [1] + [0] * (r - 1))
    try:
        adm_membership(cand, p)
    except NotAdmissible:
        return cand
    raise AssertionError("expected (e_0, e_0) to be non-admissible")
