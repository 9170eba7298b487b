"""Finite groups as multiplication tables.

Structured constructors build ``Γ = C_p ⋊ C_r`` and ``G = Γ × <j>`` (plus the
quotients ``C_r`` and ``C_r × <j>``); element ``(a, b, c)`` stands for
``σ^a τ^b j^c`` with ``τ σ τ^-1 = σ^s``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .chainring import is_prime


class NotRealizableShape(ValueError):
    """(D, I) violates the local shape constraint: I normal in D, D/I cyclic."""


def multiplicative_order(s: int, p: int) -> int:
    if gcd(s, p) != 1:
        raise ValueError(f"{s} is not a unit mod {p}")
    x, n = s % p, 1
    while x != 1:
        x = x * s % p
        n += 1
    return n


def default_s(p: int, r: int) -> int:
    """Smallest residue of exact multiplicative order ``r`` mod ``p``."""
    for s in range(1, p):
        if multiplicative_order(s, p) == r:
            return s
    raise ValueError(f"no element of order {r} mod {p}")


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def check_params(p: int, r: int, s: int | None = None) -> int:
    """Validate ``(p, r, s)`` and return ``s`` (defaulted when ``None``)."""
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if r < 1 or (p - 1) % r:
        raise ValueError(f"r must divide p - 1: {r} does not divide {p - 1}")
    if s is None:
        return default_s(p, r)
    if multiplicative_order(s, p) != r:
        raise ValueError(f"s = {s} does not have exact order {r} mod {p}")
    return s


@dataclass(eq=False)
class GroupModel:
    table: np.ndarray
    identity: int = 0
    labels: list[tuple[int, int, int]] | None = None
    params: tuple[int, int, int] | None = None  # (p, r, s)
    kind: str = "generic"
    named: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise ValueError("table must be a square array of element indices")
        self.table = t
        e = self.identity
        if not (t[e] == np.arange(n)).all() or not (t[:, e] == np.arange(n)).all():
            raise ValueError("identity element does not act trivially")
        for row in t:
            if len(set(row.tolist())) != n:
                raise ValueError("table is not a Latin square")
        inv = np.argmax(t == e, axis=1)
        if not (t[np.arange(n), inv] == e).all():
            raise ValueError("missing inverses")
        self.inverse = inv
        self.gens = self._generating_set()
        # Light's test: associativity against a generating set suffices.
        for g in self.gens:
            if not (t[t, g] == t[:, t[:, g]]).all():
                raise ValueError("table is not associative")
        if self.labels is not None:
            self.index_of = {lab: i for i, lab in enumerate(self.labels)}
            self._check_presentation()

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, a: int, n: int) -> int:
        x = self.identity
        if n < 0:
            a, n = self.inv(a), -n
        for _ in range(n):
            x = self.mul(x, a)
        return x

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    def elem(self, a: int = 0, b: int = 0, c: int = 0) -> int:
        """Index of ``σ^a τ^b j^c`` in a structured group."""
        p, r, _ = self.params
        lab = (a % p if self.has_sigma else 0, b % r, c % 2 if self.has_j else 0)
        if (not self.has_sigma and a % p) or (not self.has_j and c % 2):
            raise ValueError(f"{self.kind} has no element σ^{a} τ^{b} j^{c}")
        return self.index_of[lab]

    @property
    def has_sigma(self) -> bool:
        return self.kind in ("gamma", "g")

    @property
    def has_j(self) -> bool:
        return self.kind in ("g", "crxj")

    def _generating_set(self) -> list[int]:
        gens: list[int] = []
        span = {self.identity}
        for x in range(self.order):
            if x not in span:
                gens.append(x)
                span = set(closure(self, gens))
            if len(span) == self.order:
                break
        return gens

    def _check_presentation(self):
        p, r, s = self.params
        if multiplicative_order(s, p) != r:
            raise ValueError("s must have exact order r mod p")
        tau = self.named["tau"]
        if self.power(tau, r) != self.identity:
            raise ValueError("τ^r != 1")
        if self.has_sigma:
            sig = self.named["sigma"]
            if self.power(sig, p) != self.identity:
                raise ValueError("σ^p != 1")
            if self.conj(tau, sig) != self.power(sig, s):
                raise ValueError("τστ^-1 != σ^s")
        if self.has_j:
            j = self.named["j"]
            if self.mul(j, j) != self.identity or any(self.mul(j, g) != self.mul(g, j) for g in self.gens):
                raise ValueError("j must be central of order 2")

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        if self.params is not None:
            p, r, s = self.params
            return {"p": p, "r": r, "s": s, "group": self.kind}
        return {"order": self.order, "table": self.table.tolist()}


def _structured(p: int, r: int, s: int, kind: str) -> GroupModel:
    with_sigma = kind in ("gamma", "g")
    with_j = kind in ("g", "crxj")
    labels = [
        (a, b, c)
        for a in range(p if with_sigma else 1)
        for b in range(r)
        for c in range(2 if with_j else 1)
    ]
    index = {lab: i for i, lab in enumerate(labels)}
    spow = [pow(s, b, p) for b in range(r)]
    n = len(labels)
    table = np.empty((n, n), dtype=np.int64)
    for i, (a, b, c) in enumerate(labels):
        for i2, (a2, b2, c2) in enumerate(labels):
            lab = ((a + spow[b] * a2) % p if with_sigma else 0, (b + b2) % r, (c + c2) % 2)
            table[i, i2] = index[lab]
    named = {"tau": index[(0, 1 % r, 0)]}
    if with_sigma:
        named["sigma"] = index[(1, 0, 0)]
    if with_j:
        named["j"] = index[(0, 0, 1)]
    return GroupModel(table, index[(0, 0, 0)], labels, (p, r, s), kind, named)


def make_gamma(p: int, r: int, s: int | None = None) -> GroupModel:
    """``Γ = <σ, τ | σ^p = τ^r = 1, τστ^-1 = σ^s>`` of order ``pr``."""
    return _structured(p, r, check_params(p, r, s), "gamma")


def make_g(p: int, r: int, s: int | None = None) -> GroupModel:
    """``G = Γ × <j>`` of order ``2pr``."""
    return _structured(p, r, check_params(p, r, s), "g")


def make_cr(p: int, r: int, s: int | None = None) -> GroupModel:
    return _structured(p, r, check_params(p, r, s), "cr")


def make_crxj(p: int, r: int, s: int | None = None) -> GroupModel:
    return _structured(p, r, check_params(p, r, s), "crxj")


MAKERS = {"gamma": make_gamma, "g": make_g, "cr": make_cr, "crxj": make_crxj}


def from_permutations(perms: Sequence[Sequence[int]]) -> GroupModel:
    """The permutation group generated by ``perms`` as a table (identity first)."""
    n = len(perms[0])
    ident = tuple(range(n))
    gens = [tuple(g) for g in perms]
    elems = [ident]
    seen = {ident}
    for x in elems:
        for g in gens:
            y = tuple(x[g[i]] for i in range(n))
            if y not in seen:
                seen.add(y)
                elems.append(y)
    idx = {e: i for i, e in enumerate(elems)}
    table = [[idx[tuple(x[y[i]] for i in range(n))] for y in elems] for x in elems]
    return GroupModel(np.array(table), 0)


def cyclic_group(n: int) -> GroupModel:
    return GroupModel(np.array([[(i + j) % n for j in range(n)] for i in range(n)]), 0)


def alternating_a4() -> GroupModel:
    return from_permutations([(1, 2, 0, 3), (1, 0, 3, 2)])


# --- subgroups ----------------------------------------------------------------


def closure(G: GroupModel, gens: Iterable[int]) -> list[int]:
    """Elements of the subgroup generated by ``gens`` (finite, so products suffice)."""
    gens = list(dict.fromkeys(gens))
    elems = [G.identity]
    seen = {G.identity}
    for x in elems:
        for g in gens:
            y = int(G.table[x, g])
            if y not in seen:
                seen.add(y)
                elems.append(y)
    return elems


def same_group(G: GroupModel, H: GroupModel) -> bool:
    """Identical objects, or two builds of the same structured group."""
    if G is H:
        return True
    return G.params is not None and (G.params, G.kind) == (H.params, H.kind)


@dataclass(frozen=True, eq=False)
class Subgroup:
    group: GroupModel
    elements: tuple[int, ...]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        els = tuple(sorted(set(int(e) for e in self.elements)))
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "_set", frozenset(els))
        G = self.group
        if not self.check:
            return
        if G.identity not in self._set:
            raise ValueError("subgroup must contain the identity")
        for a in els:
            if G.inv(a) not in self._set or any(G.mul(a, b) not in self._set for b in els):
                raise ValueError("element set is not closed")

    @classmethod
    def generated(cls, G: GroupModel, gens: Iterable[int]) -> "Subgroup":
        return cls(G, tuple(closure(G, gens)), check=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __eq__(self, other):
        return isinstance(other, Subgroup) and same_group(self.group, other.group) and other._set == self._set

    def __hash__(self):
        return hash(self._set)

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def sort_key(self):
        return (self.order, self.elements)

    def conjugate(self, g: int) -> "Subgroup":
        return Subgroup(self.group, tuple(self.group.conj(g, x) for x in self.elements), check=False)

    def is_normal_in(self, other: "Subgroup | None" = None) -> bool:
        G = self.group
        ambient = other.elements if other is not None else range(G.order)
        return all(G.conj(g, x) in self._set for g in ambient for x in self.elements)

    def generators(self) -> list[int]:
        gens: list[int] = []
        span = {self.group.identity}
        for x in self.elements:
            if x not in span:
                gens.append(x)
                span = set(closure(self.group, gens))
        return gens

    def labels(self) -> list[tuple[int, int, int]]:
        return [self.group.labels[x] for x in self.elements]

    def to_json(self) -> dict:
        G = self.group
        if G.params is None:
            return {"order": G.order, "elements": list(self.elements)}
        p, r, s = G.params
        return {"p": p, "r": r, "s": s, "elements": [list(lab) for lab in self.labels()]}

    @classmethod
    def from_json(cls, G: GroupModel, obj: dict) -> "Subgroup":
        if G.params is not None and (obj.get("p"), obj.get("r"), obj.get("s")) != G.params and "p" in obj:
            raise ValueError(f"subgroup parameters {obj.get('p'), obj.get('r'), obj.get('s')} do not match {G.params}")
        key = "elements" if "elements" in obj else "generators"
        items = obj[key]
        idx = [G.elem(*it) if isinstance(it, (list, tuple)) else int(it) for it in items]
        return cls(G, tuple(idx)) if key == "elements" else cls.generated(G, idx)


def whole(G: GroupModel) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def enumerate_subgroups(G: GroupModel) -> list[Subgroup]:
    """All subgroups, found as joins of cyclic subgroups, sorted by (order, elements)."""
    if G.order > 10**4:
        raise ValueError("group too large for subgroup enumeration")
    cyclic: dict[frozenset, int] = {}
    for x in range(G.order):
        cyclic.setdefault(frozenset(closure(G, [x])), x)
    found: dict[frozenset, list[int]] = {c: [x] for c, x in cyclic.items()}
    queue = list(found)
    while queue:
        H = queue.pop()
        gens = found[H]
        for C, x in cyclic.items():
            if C <= H:
                continue
            J = frozenset(closure(G, gens + [x]))
            if J not in found:
                found[J] = gens + [x]
                queue.append(J)
    subs = [Subgroup(G, tuple(H), check=False) for H in found]
    return sorted(subs, key=Subgroup.sort_key)


def normal_closure(G: GroupModel, elems: Iterable[int]) -> list[int]:
    conj = {G.conj(g, x) for x in elems for g in range(G.order)}
    return closure(G, conj)


def commutator_subgroup(D: Subgroup) -> Subgroup:
    G = D.group
    comms = {G.mul(G.mul(a, b), G.mul(G.inv(a), G.inv(b))) for a in D.elements for b in D.elements}
    return Subgroup.generated(G, comms)


def quotient_is_cyclic(D: Subgroup, I: Subgroup) -> bool:
    G = D.group
    return any(len(closure(G, list(I.generators()) + [x])) == D.order for x in D.elements)


def is_supersolvable(G: GroupModel) -> tuple[bool, list[Subgroup]]:
    """Greedy search for a normal series with prime-order (hence cyclic) factors.

    Greedy is complete: a quotient of a supersolvable group is supersolvable,
    and every minimal normal subgroup of one has prime order.
    """
    if G.order > 10**3:
        raise ValueError("group too large for the supersolvability check")
    H = [G.identity]
    chain = [Subgroup(G, tuple(H))]
    while len(H) < G.order:
        hs = set(H)
        step = None
        for x in range(G.order):
            if x in hs:
                continue
            N = normal_closure(G, H + [x])
            q = len(N) // len(H)
            if is_prime(q):
                step = N
                break
        if step is None:
            return False, chain
        H = step
        chain.append(Subgroup(G, tuple(H)))
    return True, chain


def conjugates_generate(G: GroupModel, subgroups: Sequence[Subgroup]) -> bool:
    """Do arbitrary conjugates of the given subgroups always generate ``G``?

    The first conjugator may be fixed to 1: conjugating the whole tuple by a
    common element does not change whether it generates.
    """
    if not subgroups:
        return G.order == 1
    classes = []
    for i, D in enumerate(subgroups):
        if i == 0:
            classes.append([D])
        else:
            classes.append(list({D.conjugate(g) for g in range(G.order)}))
    for choice in itertools.product(*classes):
        gens = [x for D in choice for x in D.generators()]
        if len(closure(G, gens)) != G.order:
            return False
    return True


# --- pairs (D, I) -------------------------------------------------------------


@dataclass
class PairDI:
    D: Subgroup
    I: Subgroup
    case: str  # "I", "II" or "irrelevant"
    d: int | None = None
    e: int | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"D": self.D.to_json(), "I": self.I.to_json(), "case": self.case}
        if self.case in ("I", "II"):
            out.update(d=self.d, e=self.e)
        if self.reason:
            out["reason"] = self.reason
        return out


def _require_structured(G: GroupModel):
    if G.kind != "g":
        raise ValueError("pair classification needs the structured group G = Γ × <j>")


def classify_pair(G: GroupModel, D: Subgroup, I: Subgroup) -> PairDI:
    _require_structured(G)
    p, r, _ = G.params
    if not I <= D:
        raise ValueError("I must be contained in D")
    if not I.is_normal_in(D):
        raise NotRealizableShape("I is not normal in D")
    if not quotient_is_cyclic(D, I):
        raise NotRealizableShape("D/I is not cyclic")
    if I.order % p:
        return PairDI(D, I, "irrelevant", reason="p does not divide #I")
    if G.named["j"] in D:
        return PairDI(D, I, "irrelevant", reason="j lies in D")
    e, d = D.order // p, I.order // p
    sigma = G.named["sigma"]
    if G.elem(0, r // e, 0) in D:
        case, gen = "I", G.elem(0, r // e, 0)
    else:
        case, gen = "II", G.elem(0, r // e, 1)
    if case == "II" and e % 2:
        raise AssertionError("case II requires even e")
    if Subgroup.generated(G, [sigma, gen]) != D:
        raise AssertionError("D is not of the expected shape")
    if Subgroup.generated(G, [sigma, G.power(gen, e // d)]) != I:
        raise AssertionError("I is not of the expected shape")
    return PairDI(D, I, case, d, e)


def pair_for(G: GroupModel, case: str, d: int, e: int) -> PairDI:
    """The pair with parameters ``(case, d, e)`` and the generator it is built from."""
    _require_structured(G)
    p, r, _ = G.params
    if r % e or e % d or (case == "II" and e % 2):
        raise ValueError(f"invalid parameters case {case}, d={d}, e={e} for r={r}")
    gen = G.elem(0, r // e, 0 if case == "I" else 1)
    sigma = G.named["sigma"]
    D = Subgroup.generated(G, [sigma, gen])
    I = Subgroup.generated(G, [sigma, G.power(gen, e // d)])
    return PairDI(D, I, case, d, e)


def enumerate_relevant_pairs(G: GroupModel) -> list[PairDI]:
    """Pairs with ``p | #I`` and ``j ∉ D``, one per ``(case, d, e)``.

    Found by brute force over subgroups containing σ, then classified.
    """
    _require_structured(G)
    sigma, j = G.named["sigma"], G.named["j"]
    over_sigma = {Subgroup.generated(G, [sigma, x]) for x in range(G.order)}
    pairs = {}
    for D in over_sigma:
        if j in D:
            continue
        for I in {Subgroup.generated(G, [sigma, y]) for y in D.elements}:
            pr = classify_pair(G, D, I)
            pairs.setdefault((pr.case, pr.e, pr.d), pr)
    return [pairs[k] for k in sorted(pairs)]


def relevant_pair_count(r: int) -> int:
    sigma0 = lambda n: len(divisors(n))
    return sum(sigma0(e) for e in divisors(r)) + sum(sigma0(e) for e in divisors(r) if e % 2 == 0)


# --- local realizability --------------------------------------------------------


def _prime_factors(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if n % q == 0 and is_prime(q)]


@dataclass
class GoingUpResult:
    status: str  # "ok", "fail(a)" or "fail(c)"
    ell: int
    index_D_I: int
    index_I_comm: int
    assumption_b: str


def going_up_check(D: Subgroup, I: Subgroup, ell: int) -> GoingUpResult:
    """Check the group-theoretic going-up conditions (a) and (c) for ``ell``.

    Condition (b), total ramification of the cyclotomic Z_ell-extension of the
    local base field, is field-theoretic; it is reported, never decided.
    """
    if not I <= D:
        raise ValueError("I must be contained in D")
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    idx = D.order // I.order
    comm = commutator_subgroup(D)
    if not comm <= I:
        raise NotRealizableShape("[D, D] is not contained in I")
    idx_c = I.order // comm.order
    rest = idx
    while rest % ell == 0:
        rest //= ell
    if D == I:
        b = "not needed (D = I)"
    else:
        b = "assumed: cyclotomic Z_ell-extension of K_v totally ramified"
    if rest != 1:
        status = "fail(a)"
    elif idx_c % ell == 0:
        status = "fail(c)"
    else:
        status = "ok"
    return GoingUpResult(status, ell, idx, idx_c, b)


class ImpossibleWitness(ValueError):
    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = reasons


@dataclass
class LocalWitness:
    ell: int | None  # None when any prime other than ``excluded`` works
    excluded: int | None
    suggested_ell: int
    descriptor: str
    e: int | None
    constructed: bool
    assumption_b: str

    def to_json(self) -> dict:
        return {
            "ell": self.ell if self.ell is not None else f"any prime != {self.excluded}",
            "suggested_ell": self.suggested_ell,
            "descriptor": self.descriptor,
            "e": self.e,
            "constructed": self.constructed,
            "condition_b": self.assumption_b,
        }


def local_witness(D: Subgroup, I: Subgroup) -> LocalWitness:
    """Suggest a residue characteristic ``ell`` for which (D, I) meets (a)-(c)."""
    G = D.group
    if not I <= D:
        raise ValueError("I must be contained in D")
    if not I.is_normal_in(D) or not quotient_is_cyclic(D, I):
        raise NotRealizableShape("I must be normal in D with cyclic quotient")
    idx = D.order // I.order
    comm = commutator_subgroup(D)
    idx_c = I.order // comm.order
    p = G.params[0] if G.params else None
    if D == I:
        b = "not needed (D = I)"
        if p is not None and D.order % p == 0 and G.named.get("sigma") in D:
            e = D.order // p
            if e == 1:
                ell = 2 if p != 2 else 3
                return LocalWitness(
                    None, p, ell,
                    f"totally ramified abelian degree-{p} extension of a large enough finite extension of Q_ell",
                    1, True, b,
                )
            return LocalWitness(
                p, None, p,
                f"subfield of Q_{p}(mu_{p}, {p}^(1/{p})) over K_v with [Q_{p}(mu_{p}) : K_v] = {e}",
                e, True, b,
            )
        ell = next(q for q in itertools.count(2) if is_prime(q) and idx_c % q)
        return LocalWitness(None, None, ell, "conditions (a), (c) hold; no construction recorded", None, False, b)
    reasons = []
    primes = _prime_factors(idx)
    if len(primes) != 1:
        raise ImpossibleWitness([f"(a): (D:I) = {idx} is not a prime power"])
    ell = primes[0]
    if idx_c % ell == 0:
        reasons.append(f"(a) forces ell = {ell}")
        reasons.append(f"(c) forbids ell = {ell}: (I:[D,D]) = {idx_c}")
        raise ImpossibleWitness(reasons)
    return LocalWitness(
        ell, None, ell, "conditions (a), (c) hold; no construction recorded", None, False,
        "assumed: cyclotomic Z_ell-extension of K_v totally ramified",
    )
