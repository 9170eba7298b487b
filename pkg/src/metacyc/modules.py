"""Finitely presented modules over (Z/p^k)[H].

A module is a cokernel: ambient ``(Z/p^k)^n`` modulo the column span of a
relation matrix, with one action matrix per generator of the acting group.
A module with no (nonzero) relations is a lattice at precision ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chainring import (
    PrecisionError,
    RingCtx,
    as_mat,
    identity,
    mmul,
    mpow,
    saturated_kernel,
    snf,
    teichmuller,
    zeros,
)
from .groups import MAKERS, GroupModel, Subgroup, closure, quotient_is_cyclic


@dataclass(eq=False)
class LambdaModule:
    ctx: RingCtx
    group: GroupModel
    relations: np.ndarray  # n x m, columns span the relation submodule
    actions: dict[int, np.ndarray]  # generator element -> n x n matrix
    domain: Subgroup | None = None  # acting subgroup (default: the whole group)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        mod = self.ctx.modulus
        n = len(next(iter(self.actions.values()))) if self.actions else np.asarray(self.relations).shape[0]
        rel = np.asarray(self.relations)
        if rel.size == 0:
            rel = zeros((n, 0), mod)
        self.relations = as_mat(rel, mod)
        self.actions = {int(g): as_mat(a, mod) for g, a in self.actions.items()}
        for a in self.actions.values():
            if a.shape != (n, n):
                raise ValueError(f"action matrix has shape {a.shape}, expected {(n, n)}")
        if self.relations.shape[0] != n:
            raise ValueError("relation matrix has the wrong number of rows")
        gens = set(self.actions)
        dom = self.domain.elements if self.domain is not None else range(self.group.order)
        if set(closure(self.group, gens)) != set(dom):
            raise ValueError("action generators do not generate the acting group")

    @property
    def rank(self) -> int:
        return self.relations.shape[0]

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def is_lattice(self) -> bool:
        return not self.relations.any()

    def named(self, name: str) -> np.ndarray:
        return self.actions[self.group.named[name]]

    def act(self, g: int) -> np.ndarray:
        """Matrix of an arbitrary element of the acting group."""
        if g in self.actions:
            return self.actions[g]
        if "words" not in self._cache:
            self._cache["words"] = self._words()
        mats = self._cache.setdefault("mats", {})
        if g not in mats:
            prev, gen = self._cache["words"][g]
            if prev is None:
                mats[g] = identity(self.rank, self.ctx.modulus)
            else:
                mats[g] = mmul(self.act(prev), self.actions[gen], self.ctx.modulus)
        return mats[g]

    def _words(self) -> dict[int, tuple[int | None, int | None]]:
        G = self.group
        words = {G.identity: (None, None)}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.actions:
                    y = G.mul(x, g)
                    if y not in words:
                        words[y] = (x, g)
                        nxt.append(y)
            frontier = nxt
        return words

    def elements(self) -> list[int]:
        return list(self.domain.elements) if self.domain is not None else list(range(self.group.order))

    def with_ctx(self, ctx: RingCtx) -> "LambdaModule":
        """Re-read the same integer matrices at another precision.

        Raising the precision is legitimate for finite modules whose relations
        already kill every coordinate: the module itself does not change.
        """
        return LambdaModule(ctx, self.group, self.relations.astype(object), dict(self.actions), self.domain)

    def in_relation_span(self, x: np.ndarray) -> bool:
        """Whether all columns of ``x`` lie in the relation submodule."""
        return bool(relation_membership(self.relations, x, self.p, self.ctx.k))

    def check(self) -> None:
        """Assert the module axioms modulo the relation submodule."""
        mod = self.ctx.modulus
        for a in self.actions.values():
            if self.relations.shape[1] and not self.in_relation_span(mmul(a, self.relations, mod)):
                raise ValueError("an action matrix does not preserve the relations")
        G = self.group
        if G.params is not None and self.domain is None:
            p, r, s = G.params
            eye = identity(self.rank, mod)
            checks = []
            T = self.named("tau")
            checks.append(mpow(T, r, mod) - eye)
            if G.has_sigma:
                S = self.named("sigma")
                checks.append(mpow(S, p, mod) - eye)
                checks.append(mmul(T, S, mod) - mmul(mpow(S, s, mod), T, mod))
            if G.has_j:
                J = self.named("j")
                checks.append(mmul(J, J, mod) - eye)
                for other in self.actions.values():
                    checks.append(mmul(J, other, mod) - mmul(other, J, mod))
        else:
            checks = [
                self.act(G.mul(g, x)) - mmul(self.actions[g], self.act(x), mod)
                for g in self.actions
                for x in self.elements()
            ]
        for c in checks:
            if not self.in_relation_span(c % mod):
                raise ValueError("action matrices violate the group relations")

    def to_json(self) -> dict:
        G = self.group
        if G.params is None:
            raise ValueError("only structured modules have a JSON form")
        p, r, s = G.params
        return {
            "p": p,
            "r": r,
            "s": s,
            "k": self.ctx.k,
            "group": G.kind,
            "rank": self.rank,
            "relations": self.relations.astype(object).tolist() if self.relations.shape[1] else [],
            "action": {name: self.named(name).astype(object).tolist() for name in G.named if G.named[name] in self.actions},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LambdaModule":
        p, r = obj["p"], obj["r"]
        kind = obj.get("group", "gamma")
        if kind not in MAKERS:
            raise ValueError(f"group: unknown kind {kind!r}")
        G = MAKERS[kind](p, r, obj.get("s"))
        ctx = RingCtx(p, obj.get("k", 6))
        n = obj["rank"]
        actions = {}
        for name in ("sigma", "tau", "j"):
            if name in G.named and G.named[name] != G.identity:
                mat = obj["action"].get(name)
                if mat is None:
                    raise ValueError(f"action.{name}: missing")
                actions[G.named[name]] = np.array(mat, dtype=object).reshape(n, n)
        if not actions:
            actions[G.named["tau"]] = identity(n, ctx.modulus)
        rel = obj.get("relations") or []
        rel = np.array(rel, dtype=object).reshape(n, -1) if len(rel) else zeros((n, 0), ctx.modulus)
        M = cls(ctx, G, rel, actions)
        M.check()
        return M


def relation_membership(rel: np.ndarray, x: np.ndarray, p: int, k: int) -> bool:
    mod = p**k
    if not np.asarray(x).any():
        return True
    if rel.shape[1] == 0:
        return False
    sf = snf(rel, p, k)
    y = mmul(sf.L, as_mat(x, mod), mod)
    for i in range(y.shape[0]):
        d = sf.exponents[i] if i < len(sf.exponents) else k
        if (y[i] % p**d).any():
            return False
    return True


# --- constructors -------------------------------------------------------------


def _gen_keys(H: GroupModel) -> list[int]:
    if H.params is not None:
        keys = [g for g in H.named.values() if g != H.identity]
        return keys or [H.named["tau"]]
    return H.gens or [H.identity]


def group_ring(H: GroupModel, ctx: RingCtx) -> LambdaModule:
    """The regular module ``(Z/p^k)[H]`` with basis the group elements."""
    n = H.order
    actions = {}
    for g in _gen_keys(H):
        m = zeros((n, n), ctx.modulus)
        m[H.table[g], np.arange(n)] = 1
        actions[g] = m
    return LambdaModule(ctx, H, zeros((n, 0), ctx.modulus), actions)


def ring_element(H: GroupModel, terms: dict[int, int], n: int | None = None) -> np.ndarray:
    v = np.zeros(H.order, dtype=object)
    for g, c in terms.items():
        v[g] += c
    return v


def submodule_columns(M: LambdaModule, vectors: np.ndarray) -> np.ndarray:
    """Columns spanning the submodule generated by the columns of ``vectors``."""
    mod = M.ctx.modulus
    vectors = as_mat(np.asarray(vectors).reshape(M.rank, -1), mod)
    return np.concatenate([mmul(M.act(g), vectors, mod) for g in M.elements()], axis=1)


def quotient(M: LambdaModule, vectors: np.ndarray) -> LambdaModule:
    """``M`` modulo the submodule generated by the given column vectors."""
    rel = np.concatenate([M.relations, submodule_columns(M, vectors)], axis=1)
    return LambdaModule(M.ctx, M.group, rel, dict(M.actions), M.domain)


def quotient_by_left_ideal(H: GroupModel, ctx: RingCtx, gens: list[np.ndarray]) -> LambdaModule:
    """``(Z/p^k)[H]`` modulo the left ideal generated by ``gens``."""
    R = group_ring(H, ctx)
    return quotient(R, np.stack([np.asarray(x, dtype=object) for x in gens], axis=1))


def prune(M: LambdaModule) -> LambdaModule:
    """An equivalent presentation with diagonal relations ``p^{d_i}``, ``d_i >= 1``.

    Unit relations are used to eliminate generators.
    """
    mod, p, k = M.ctx.modulus, M.p, M.ctx.k
    n = M.rank
    if M.relations.shape[1] == 0 or not M.relations.any():
        return M
    sf = snf(M.relations, p, k)
    exps = sf.exponents + [k] * (n - len(sf.exponents))
    keep = [i for i in range(n) if exps[i] > 0]
    L, U = sf.L, sf.U
    actions = {g: mmul(mmul(L, a, mod), U, mod)[np.ix_(keep, keep)] for g, a in M.actions.items()}
    rel_cols = [i for i, idx in enumerate(keep) if exps[idx] < k]
    rel = zeros((len(keep), len(rel_cols)), mod)
    for c, i in enumerate(rel_cols):
        rel[i, c] = p ** exps[keep[i]]
    return LambdaModule(M.ctx, M.group, rel, actions, M.domain)


def torsion_exponents(M: LambdaModule) -> list[int]:
    """Exponents of the cyclic factors of a pruned module (``k`` marks a free one)."""
    k = M.ctx.k
    out = []
    for i in range(M.rank):
        col = M.relations[i]
        nz = [int(x) for x in col if int(x) % M.ctx.modulus]
        out.append(min(_val(x, M.p) for x in nz) if nz else k)
    return out


def _val(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def fp_dimension(M: LambdaModule) -> int:
    """``dim_{F_p} M/pM``."""
    P = prune(M)
    return P.rank


def direct_sum(*mods: LambdaModule) -> LambdaModule:
    first = mods[0]
    mod = first.ctx.modulus
    n = sum(m.rank for m in mods)
    offs = np.cumsum([0] + [m.rank for m in mods])
    actions = {}
    for g in first.actions:
        a = zeros((n, n), mod)
        for m, o in zip(mods, offs):
            a[o : o + m.rank, o : o + m.rank] = m.actions[g]
        actions[g] = a
    rels = []
    for m, o in zip(mods, offs):
        block = zeros((n, m.relations.shape[1]), mod)
        block[o : o + m.rank] = m.relations
        rels.append(block)
    return LambdaModule(first.ctx, first.group, np.concatenate(rels, axis=1), actions, first.domain)


def tate_twist(M: LambdaModule, i: int) -> LambdaModule:
    """Multiply the τ-action by ``ρ^i``; σ and j are unchanged."""
    G = M.group
    p, r, s = G.params
    rho = teichmuller(s, M.ctx)
    t = G.named["tau"]
    actions = dict(M.actions)
    if t in actions:
        actions[t] = (actions[t] * pow(rho, i % r, M.ctx.modulus)) % M.ctx.modulus
    return LambdaModule(M.ctx, G, M.relations, actions, M.domain)


def fp_twist(p: int, r: int, i: int, s: int | None = None, ctx: RingCtx | None = None) -> LambdaModule:
    """``F_p(i)``: one generator killed by p, σ trivial, τ acting by ``s^i``."""
    ctx = ctx or RingCtx(p)
    G = MAKERS["gamma"](p, r, s)
    s = G.params[2]
    actions = {G.named["sigma"]: [[1]]}
    if r > 1:
        actions[G.named["tau"]] = [[pow(s, i % r, p)]]
    return LambdaModule(ctx, G, [[p]], actions)


def zero_module(p: int, r: int, s: int | None = None, ctx: RingCtx | None = None) -> LambdaModule:
    ctx = ctx or RingCtx(p)
    G = MAKERS["gamma"](p, r, s)
    actions = {g: zeros((0, 0), ctx.modulus) for g in _gen_keys(G)}
    return LambdaModule(ctx, G, zeros((0, 0), ctx.modulus), actions)


# --- induction and minus parts ------------------------------------------------


def coset_representatives(G: GroupModel, D: Subgroup) -> list[int]:
    """Left coset representatives of ``D``, each the smallest index in its coset."""
    reps, seen = [], set()
    for g in range(G.order):
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, d) for d in D.elements)
    return reps


def induce(N: LambdaModule, G: GroupModel | None = None) -> LambdaModule:
    """``Z[G] ⊗_{Z[D]} N`` for a module ``N`` over a subgroup ``D``.

    Basis ``t_k ⊗ n_l``; ``g t_k = t_{k'} h`` with ``h ∈ D`` sends
    ``t_k ⊗ n`` to ``t_{k'} ⊗ h n``.
    """
    G = G or N.group
    if N.group is not G:
        raise ValueError("N must be a module over a subgroup of G")
    D = N.domain if N.domain is not None else Subgroup(G, tuple(range(G.order)))
    mod = N.ctx.modulus
    reps = coset_representatives(G, D)
    where = {}
    for k, t in enumerate(reps):
        for d in D.elements:
            where[G.mul(t, d)] = (k, d)
    q, n = len(reps), N.rank
    actions = {}
    for g in _gen_keys(G):
        a = zeros((q * n, q * n), mod)
        for k, t in enumerate(reps):
            k2, h = where[G.mul(g, t)]
            a[k2 * n : (k2 + 1) * n, k * n : (k + 1) * n] = N.act(h)
        actions[g] = a
    m = N.relations.shape[1]
    rel = zeros((q * n, q * m), mod)
    for k in range(q):
        rel[k * n : (k + 1) * n, k * m : (k + 1) * m] = N.relations
    return LambdaModule(N.ctx, G, rel, actions)


def restrict(M: LambdaModule, H: GroupModel, mapping: dict[str, str] | None = None) -> LambdaModule:
    """Reinterpret ``M`` over a structured group sharing generator names."""
    actions = {H.named[name]: M.named(name) for name in H.named if H.named[name] != H.identity and name in M.group.named}
    if not actions:
        actions = {H.named["tau"]: identity(M.rank, M.ctx.modulus)}
    return LambdaModule(M.ctx, H, M.relations, actions)


def _check_has_j(M: LambdaModule):
    G = M.group
    if G.params is None or not G.has_j or M.domain is not None:
        raise ValueError("minus part needs a module over a group with central j of order 2")


def _plus_minus_target(M: LambdaModule) -> GroupModel:
    p, r, s = M.group.params
    return MAKERS["gamma" if M.group.has_sigma else "cr"](p, r, s)


def minus_part(M: LambdaModule, sign: int = -1) -> LambdaModule:
    """Image of ``(1 - j)/2`` (``sign=-1``) or ``(1 + j)/2`` (``sign=+1``), over Γ.

    Lattices get an honest basis of the image; finite modules are presented as
    ``M / (1 ∓ j) M``, which is the same module because 2 is a unit.
    """
    _check_has_j(M)
    mod, p, k = M.ctx.modulus, M.p, M.ctx.k
    n = M.rank
    J = M.named("j")
    target = _plus_minus_target(M)
    if M.is_lattice:
        eye = identity(n, mod)
        inv2 = pow(2, -1, mod)
        E = ((eye + sign * J) * inv2) % mod
        B, C, _ = saturated_kernel((eye - E) % mod, p, k, exact=True)
        actions = {}
        for name in ("sigma", "tau"):
            if name in target.named and target.named[name] != target.identity:
                actions[target.named[name]] = mmul(mmul(C, M.named(name), mod), B, mod)
        if not actions:
            actions[target.named["tau"]] = identity(B.shape[1], mod)
        return LambdaModule(M.ctx, target, zeros((B.shape[1], 0), mod), actions)
    eye = identity(n, mod)
    extra = (eye - sign * J) % mod
    rel = np.concatenate([M.relations, extra], axis=1)
    N = LambdaModule(M.ctx, M.group, rel, dict(M.actions))
    return prune(restrict(prune(N), target))


def p_minus_part(M: LambdaModule) -> LambdaModule:
    """The p-part of the minus part of a finite module, pruned.

    Working mod p^k already discards prime-to-p torsion; an exponent reaching
    ``k`` means the precision was too small to see the whole p-part.
    """
    X = minus_part(M)
    exps = torsion_exponents(X)
    if any(e >= M.ctx.k for e in exps):
        raise PrecisionError("module is not finite at this precision; raise k")
    return X


# --- A_{I, φ} and the fractional lattice --------------------------------------


@dataclass
class AIDSpec:
    G: GroupModel
    D: Subgroup
    I: Subgroup
    phi: int

    def __post_init__(self):
        G, D, I = self.G, self.D, self.I
        if not I <= D:
            raise ValueError("I must be contained in D")
        if not I.is_normal_in(D) or not quotient_is_cyclic(D, I):
            raise ValueError("I must be normal in D with cyclic quotient")
        if self.phi not in D:
            raise ValueError("φ must lie in D")
        if len(closure(G, I.generators() + [self.phi])) != D.order:
            raise ValueError("φ does not generate D/I")

    @property
    def index(self) -> int:
        return self.D.order // self.I.order

    def g_phi(self) -> dict[int, int]:
        """``g_φ = 1 - φ^{-1} + #I`` on the cosets ``φ^t I`` (keyed by ``t``)."""
        m = self.index
        g = {0: 1 + self.I.order}
        g[(m - 1) % m] = g.get((m - 1) % m, 0) - 1
        return g

    def cosets(self) -> list[frozenset]:
        G = self.G
        out, x = [], G.identity
        for _ in range(self.index):
            out.append(frozenset(G.mul(x, i) for i in self.I.elements))
            x = G.mul(x, self.phi)
        return out


def generating_phis(D: Subgroup, I: Subgroup) -> list[int]:
    """One element of D per coset of I that generates D/I (smallest index)."""
    G = D.group
    gens, seen = [], set()
    for x in D.elements:
        if x in seen:
            continue
        coset = {G.mul(x, i) for i in I.elements}
        seen |= coset
        if len(closure(G, I.generators() + [x])) == D.order:
            gens.append(min(coset))
    return gens


def cyclic_quotient_module(spec: AIDSpec, ctx: RingCtx) -> LambdaModule:
    """``Z[D/I]/(g_φ)`` as a module over D (basis: cosets ``φ^t I``)."""
    G, D = spec.G, spec.D
    m = spec.index
    mod = ctx.modulus
    cos = spec.cosets()
    which = {x: t for t, c in enumerate(cos) for x in c}
    actions = {}
    for d in D.generators() or [G.identity]:
        a = zeros((m, m), mod)
        for t, c in enumerate(cos):
            a[which[G.mul(d, next(iter(c)))], t] = 1
        actions[d] = a
    rel = zeros((m, m), mod)
    for t in range(m):
        for off, coeff in spec.g_phi().items():
            rel[(t + off) % m, t] = (rel[(t + off) % m, t] + coeff) % mod
    return LambdaModule(ctx, G, rel, actions, domain=D)


def build_AID(spec: AIDSpec, ctx: RingCtx) -> LambdaModule:
    """``A_{I,φ} = Z[G] ⊗_{Z[D]} Z[D/I]/(g_φ)`` over G."""
    return induce(cyclic_quotient_module(spec, ctx), spec.G)


def _left_mult(G: GroupModel, x: np.ndarray, mod: int) -> np.ndarray:
    """Columns ``g·x`` for every ``g``; they span the left ideal ``Z[G]x``."""
    n = G.order
    m = zeros((n, n), mod)
    for h, c in enumerate(x):
        if c % mod:
            m[G.table[:, h], np.arange(n)] = (m[G.table[:, h], np.arange(n)] + int(c)) % mod
    return m


def fractional_generators(spec: AIDSpec) -> tuple[np.ndarray, np.ndarray]:
    """``#I·ν_I`` and ``#I - φ^{-1} ν_I`` as coefficient vectors in ``Z[G]``."""
    G, I = spec.G, spec.I
    nI = I.order
    x1 = ring_element(G, {i: nI for i in I.elements})
    pinv = G.inv(spec.phi)
    x2 = ring_element(G, {G.identity: nI})
    for i in I.elements:
        x2[G.mul(pinv, i)] -= 1
    return x1, x2


def sublattice(H: GroupModel, ctx: RingCtx, gens: np.ndarray, lift: int = 2) -> LambdaModule:
    """The full-rank sublattice of ``(Z/p^k)[H]`` spanned by the columns of ``gens``.

    The basis ``U·diag(p^d)`` from a Smith form; action matrices come from
    exact division by ``p^d``, done at a raised precision so the result is
    valid mod ``p^k``.
    """
    p, k = ctx.p, ctx.k
    hi = ctx.with_k(k + lift)
    mod_hi = hi.modulus
    sf = snf(as_mat(gens, mod_hi), p, hi.k)
    n = H.order
    exps = sf.exponents[:n]
    if len(exps) < n or max(exps) > lift:
        raise PrecisionError(f"sublattice index exponent {max(exps) if exps else '?'} needs lift > {lift}")
    U, Linv = sf.U, sf.L
    Delta = np.array([p**d for d in exps], dtype=object)
    regular = group_ring(H, hi)
    actions = {}
    for g, a in regular.actions.items():
        x = mmul(mmul(Linv, a, mod_hi), U, mod_hi).astype(object) * Delta[None, :]
        x = x % mod_hi
        if any((x[i] % p ** exps[i]).any() for i in range(n)):
            raise ArithmeticError("sublattice is not stable under the action")
        x = x // np.array([p**d for d in exps], dtype=object)[:, None]
        actions[g] = as_mat(x, ctx.modulus)
    return LambdaModule(ctx, H, zeros((n, 0), ctx.modulus), actions)


def build_fractional_lattice(spec: AIDSpec, ctx: RingCtx, minus: bool = False) -> LambdaModule:
    """``#I·ℒ_{I,φ} = Z[G](#I ν_I) + Z[G](#I - φ^{-1} ν_I)``.

    With ``minus=True`` the generators are first pushed to ``Z[G]/(1+j) = Z[Γ]``,
    which yields the minus part directly at half the size.
    """
    x1, x2 = fractional_generators(spec)
    # the index exponent is small; retry with a larger lift if it is not
    for lift in (2, 4, 8):
        try:
            return _fractional(spec, ctx, x1, x2, minus, lift)
        except PrecisionError:
            continue
    raise PrecisionError("fractional lattice index too large")


def _fractional(spec: AIDSpec, ctx: RingCtx, x1, x2, minus: bool, lift: int) -> LambdaModule:
    G = spec.G
    mod = ctx.with_k(ctx.k + lift).modulus
    if not minus:
        gens = np.concatenate([_left_mult(G, x1, mod), _left_mult(G, x2, mod)], axis=1)
        return sublattice(G, ctx, gens, lift)
    p, r, s = G.params
    Gam = MAKERS["gamma"](p, r, s)

    def push(x):
        y = np.zeros(Gam.order, dtype=object)
        for g, c in enumerate(x):
            a, b, cj = G.labels[g]
            y[Gam.elem(a, b)] += -c if cj else c
        return y

    gens = np.concatenate([_left_mult(Gam, push(x1), mod), _left_mult(Gam, push(x2), mod)], axis=1)
    return sublattice(Gam, ctx, gens, lift)


def induced_minus_part(N: LambdaModule, sign: int = -1) -> LambdaModule:
    """Minus (or plus) part of ``induce(N)`` computed at half the size.

    With ``π: G → Γ`` killing j, the minus part of ``Z[G] ⊗_{Z[D]} N`` is
    ``Z[Γ] ⊗_{Z[πD]} N'`` where ``πd`` acts on ``N' = N/(1 - sign·j)N`` by
    ``sign^c ρ(d)`` for ``d = σ^a τ^b j^c``.
    """
    G = N.group
    if G.kind != "g" or N.domain is None:
        raise ValueError("expected a module over a subgroup of G = Γ × <j>")
    p, r, s = G.params
    Gam = MAKERS["gamma"](p, r, s)
    mod = N.ctx.modulus
    D = N.domain
    proj = lambda d: Gam.elem(*G.labels[d][:2])
    actions = {}
    for d in N.actions:
        sgn = sign if G.labels[d][2] else 1
        actions[proj(d)] = (sgn * N.actions[d]) % mod
    rel = N.relations
    if G.named["j"] in D:
        eye = identity(N.rank, mod)
        rel = np.concatenate([rel, (eye - sign * N.act(G.named["j"])) % mod], axis=1)
    image = Subgroup(Gam, tuple({proj(d) for d in D.elements}))
    twisted = LambdaModule(N.ctx, Gam, rel, actions, domain=image)
    return prune(induce(twisted, Gam))
