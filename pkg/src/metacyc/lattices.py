"""Z_p[C_p ⋊ C_r]-lattices: constructors, fingerprints, Φ and Ω.

Indexing of twists is 0-based over Z/rZ.  ``b[i]`` in every vector here
counts ``L_2^i`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chainring import (
    PrecisionError,
    RingCtx,
    _fp,
    as_mat,
    column_basis_mod_p,
    fp_eigenspace_dims,
    identity,
    inverse_mod,
    mmul,
    mpow,
    rref_mod_p,
    saturated_kernel,
    snf,
    teichmuller,
    zeros,
)
from .groups import check_params, make_gamma
from .modules import LambdaModule, prune, torsion_exponents


class InvalidLattice(ValueError):
    """Fingerprint inconsistency: negative multiplicity or rank mismatch."""


class NotFinite(ValueError):
    """A module expected to be finite has a free coordinate."""


@dataclass(frozen=True)
class GammaParams:
    p: int
    r: int
    s: int | None = None
    k: int = 6

    def __post_init__(self):
        object.__setattr__(self, "s", check_params(self.p, self.r, self.s))
        if self.k < 3:
            raise ValueError("precision k must be at least 3")

    @property
    def ctx(self) -> RingCtx:
        return RingCtx(self.p, self.k)

    def with_k(self, k: int) -> "GammaParams":
        return GammaParams(self.p, self.r, self.s, k)

    def eigenvalues(self) -> list[int]:
        """``s^i mod p`` for ``i = 0 .. r-1``."""
        return [pow(self.s, i, self.p) for i in range(self.r)]


@dataclass(eq=False)
class LatticeRep:
    params: GammaParams
    sigma: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        mod = self.params.ctx.modulus
        self.sigma = as_mat(self.sigma, mod)
        self.tau = as_mat(self.tau, mod)

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def ctx(self) -> RingCtx:
        return self.params.ctx

    def relations_hold(self) -> bool:
        p, r, s = self.params.p, self.params.r, self.params.s
        mod = self.ctx.modulus
        eye = identity(self.rank, mod)
        S, T = self.sigma, self.tau
        return bool(
            (mpow(S, p, mod) == eye).all()
            and (mpow(T, r, mod) == eye).all()
            and (mmul(T, S, mod) == mmul(mpow(S, s, mod), T, mod)).all()
        )

    def base_change(self, q: np.ndarray, qinv: np.ndarray) -> "LatticeRep":
        """Same lattice in the basis given by the columns of ``q``."""
        mod = self.ctx.modulus
        conj = lambda a: mmul(mmul(qinv, a, mod), q, mod)
        return LatticeRep(self.params, conj(self.sigma), conj(self.tau))

    def with_k(self, k: int) -> "LatticeRep":
        return LatticeRep(self.params.with_k(k), self.sigma, self.tau)

    def to_module(self) -> LambdaModule:
        G = make_gamma(self.params.p, self.params.r, self.params.s)
        actions = {G.named["sigma"]: self.sigma}
        if self.params.r > 1:
            actions[G.named["tau"]] = self.tau
        return LambdaModule(self.ctx, G, zeros((self.rank, 0), self.ctx.modulus), actions)

    @classmethod
    def from_module(cls, M: LambdaModule) -> "LatticeRep":
        G = M.group
        if G.kind != "gamma" or M.domain is not None:
            raise ValueError("lattice must be a module over Γ")
        if not M.is_lattice:
            raise ValueError("module has nonzero relations; not a lattice")
        p, r, s = G.params
        tau = M.named("tau") if G.named["tau"] in M.actions else identity(M.rank, M.ctx.modulus)
        return cls(GammaParams(p, r, s, M.ctx.k), M.named("sigma"), tau)


def direct_sum(params: GammaParams, parts: Sequence[LatticeRep]) -> LatticeRep:
    mod = params.ctx.modulus
    n = sum(x.rank for x in parts)
    S, T = zeros((n, n), mod), zeros((n, n), mod)
    o = 0
    for x in parts:
        S[o : o + x.rank, o : o + x.rank] = x.sigma
        T[o : o + x.rank, o : o + x.rank] = x.tau
        o += x.rank
    return LatticeRep(params, S, T)


# --- vectors -------------------------------------------------------------------


@dataclass(frozen=True)
class PeClassVector:
    r: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if len(self.a) != self.r or len(self.b) != self.r:
            raise ValueError(f"vectors must have length r = {self.r}")
        if min(self.a + self.b, default=0) < 0:
            raise ValueError("multiplicities must be nonnegative")

    @classmethod
    def zero(cls, r: int) -> "PeClassVector":
        return cls(r, (0,) * r, (0,) * r)

    @classmethod
    def unit(cls, r: int, kind: int, i: int) -> "PeClassVector":
        """``L_1^i`` (``kind=1``) or ``L_2^i`` (``kind=2``)."""
        v = [0] * r
        v[i % r] = 1
        return cls(r, v, (0,) * r) if kind == 1 else cls(r, (0,) * r, v)

    def __add__(self, other: "PeClassVector") -> "PeClassVector":
        return PeClassVector(self.r, np.add(self.a, other.a), np.add(self.b, other.b))

    def scale(self, m: int) -> "PeClassVector":
        return PeClassVector(self.r, [m * x for x in self.a], [m * x for x in self.b])

    def coords(self) -> list[int]:
        return list(self.a) + list(self.b)

    def to_json(self) -> dict:
        return {"r": self.r, "a": list(self.a), "b": list(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "PeClassVector":
        return cls(obj["r"] if "r" in obj else len(obj["a"]), obj["a"], obj["b"])


@dataclass(frozen=True)
class ClassVector:
    r: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
            if len(getattr(self, name)) != self.r:
                raise ValueError(f"{name} must have length r = {self.r}")

    def rank(self, p: int) -> int:
        return sum(self.a) + (p - 1) * sum(self.b) + p * sum(self.c)

    def stripped(self) -> PeClassVector:
        return PeClassVector(self.r, self.a, self.b)

    def to_json(self) -> dict:
        return {"r": self.r, "a": list(self.a), "b": list(self.b), "c": list(self.c)}


def is_in_phi_image(v: PeClassVector) -> bool:
    return sum(v.a) == sum(v.b)


def omega_vec(v: PeClassVector) -> PeClassVector:
    """Ω on coordinates: ``L_1^i ↦ L_2^{i+1}``, ``L_2^i ↦ L_1^i``."""
    r = v.r
    a = [v.b[i] for i in range(r)]
    b = [v.a[(i - 1) % r] for i in range(r)]
    return PeClassVector(r, a, b)


def omega_vec_inv(v: PeClassVector) -> PeClassVector:
    r = v.r
    a = [v.b[(i + 1) % r] for i in range(r)]
    b = [v.a[i] for i in range(r)]
    return PeClassVector(r, a, b)


# --- constructors -------------------------------------------------------------


def _cyclotomic_reduce(c: np.ndarray, p: int) -> np.ndarray:
    """Coefficients in Z[x]/(x^p - 1) pushed to the power basis of Z[ζ]."""
    return c[: p - 1] - c[p - 1]


def make_L1(gp: GammaParams, i: int) -> LatticeRep:
    """``Z_p`` with trivial σ and τ acting by ``ρ^i``."""
    rho = teichmuller(gp.s, gp.ctx)
    return LatticeRep(gp, [[1]], [[pow(rho, i % gp.r, gp.ctx.modulus)]])


def make_L2(gp: GammaParams, i: int) -> LatticeRep:
    """``(1-ζ)^i Z_p[ζ]`` on the basis ``(1-ζ)^i ζ^j``, ``j < p-1``.

    τ sends ``(1-ζ)^i ζ^j`` to ``(1-ζ)^i u^i ζ^{sj}`` with ``u = (1-ζ^s)/(1-ζ)``.
    """
    p, s, i = gp.p, gp.s, i % gp.r
    n = p - 1
    sigma = np.zeros((n, n), dtype=object)
    for j in range(n - 1):
        sigma[j + 1, j] = 1
    sigma[:, n - 1] = -1
    u = np.zeros(p, dtype=object)
    u[:s] = 1
    ui = np.zeros(p, dtype=object)
    ui[0] = 1
    for _ in range(i):
        ui = np.array([sum(ui[t] * u[(m - t) % p] for t in range(p)) for m in range(p)], dtype=object)
    tau = np.zeros((n, n), dtype=object)
    for j in range(n):
        tau[:, j] = _cyclotomic_reduce(np.roll(ui, s * j % p), p)
    return LatticeRep(gp, sigma, tau)


def make_L3(gp: GammaParams, i: int) -> LatticeRep:
    """``Z_p[Γ] e_i`` on the basis ``σ^a e_i``."""
    p, s = gp.p, gp.s
    rho = pow(teichmuller(s, gp.ctx), i % gp.r, gp.ctx.modulus)
    sigma = np.zeros((p, p), dtype=object)
    tau = np.zeros((p, p), dtype=object)
    for a in range(p):
        sigma[(a + 1) % p, a] = 1
        tau[a * s % p, a] = rho
    return LatticeRep(gp, sigma, tau)


def regular_lattice(gp: GammaParams) -> LatticeRep:
    """``Z_p[Γ]`` on the basis ``σ^a τ^b``."""
    from .modules import group_ring

    return LatticeRep.from_module(group_ring(make_gamma(gp.p, gp.r, gp.s), gp.ctx))


def lattice_from_vector(gp: GammaParams, v: ClassVector | PeClassVector) -> LatticeRep:
    parts = []
    c = getattr(v, "c", (0,) * gp.r)
    for i in range(gp.r):
        parts += [make_L1(gp, i)] * v.a[i] + [make_L2(gp, i)] * v.b[i] + [make_L3(gp, i)] * c[i]
    if not parts:
        mod = gp.ctx.modulus
        return LatticeRep(gp, zeros((0, 0), mod), zeros((0, 0), mod))
    return direct_sum(gp, parts)


# --- cohomology and fingerprints ------------------------------------------------


@dataclass
class FpRep:
    """An F_p-space with a τ-action (matrix over F_p)."""

    tau: np.ndarray

    @property
    def dim(self) -> int:
        return self.tau.shape[0]


def quotient_action(t: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    """Matrix of ``t`` on ``F_p^n / span(w)`` (``t`` must preserve the span)."""
    n = t.shape[0]
    wb = column_basis_mod_p(w, p) if w.size else np.zeros((n, 0), dtype=np.int64)
    m = wb.shape[1]
    full = np.concatenate([wb, np.eye(n, dtype=np.int64)], axis=1)
    _, piv = rref_mod_p(full, p)
    q = full[:, piv]
    qinv = inverse_mod(q, p, 1)
    return (qinv @ _fp(t, p) @ q % p)[m:, m:]


def _kernel_quotient(L: LatticeRep, kernel_of: np.ndarray, image_of: np.ndarray) -> FpRep:
    """``ker(kernel_of) / im(image_of)``, assumed killed by p, with τ induced."""
    p, k = L.params.p, L.ctx.k
    mod = L.ctx.modulus
    B, C, _ = saturated_kernel(kernel_of, p, k)
    tau_k = mmul(mmul(C, L.tau, mod), B, mod)
    w = mmul(C, image_of, mod)
    return FpRep(quotient_action(tau_k, w, p))


def _norm(L: LatticeRep) -> np.ndarray:
    mod = L.ctx.modulus
    n = L.rank
    acc, x = zeros((n, n), mod), identity(n, mod)
    for _ in range(L.params.p):
        acc = (acc + x) % mod
        x = mmul(x, L.sigma, mod)
    return acc


def tate_cohomology_cp(L: LatticeRep) -> tuple[FpRep, FpRep]:
    """``(Ĥ^0, H^1)`` of ``<σ>`` on the lattice, each an F_p-space with τ-action."""
    if L.ctx.k < 2:
        raise PrecisionError("cohomology needs precision >= 2")
    mod = L.ctx.modulus
    one_minus = (identity(L.rank, mod) - L.sigma) % mod
    nu = _norm(L)
    return _kernel_quotient(L, one_minus, nu), _kernel_quotient(L, nu, one_minus)


def top_dims(L: LatticeRep) -> list[int]:
    """τ-eigenspace dimensions on ``L / (p, 1-σ) L``."""
    p = L.params.p
    mod = L.ctx.modulus
    w = (identity(L.rank, mod) - L.sigma) % mod
    top = quotient_action(L.tau, w, p)
    return fp_eigenspace_dims(top, L.params.eigenvalues(), p)


def fingerprint(L: LatticeRep) -> ClassVector:
    """Multiplicities of ``L_1^i, L_2^i, L_3^i`` in the Krull-Schmidt decomposition."""
    gp = L.params
    if L.rank == 0:
        return ClassVector(gp.r, (0,) * gp.r, (0,) * gp.r, (0,) * gp.r)
    h0, h1 = tate_cohomology_cp(L)
    ev = gp.eigenvalues()
    a = fp_eigenspace_dims(h0.tau, ev, gp.p)
    b = fp_eigenspace_dims(h1.tau, ev, gp.p)
    t = top_dims(L)
    c = [ti - ai - bi for ti, ai, bi in zip(t, a, b)]
    if min(c) < 0:
        raise InvalidLattice(f"negative free multiplicity {c}; precision too low or not a lattice")
    v = ClassVector(gp.r, a, b, c)
    if v.rank(gp.p) != L.rank:
        raise InvalidLattice(f"fingerprint rank {v.rank(gp.p)} != lattice rank {L.rank}")
    return v


# --- projective covers, Ω and Φ --------------------------------------------------


@dataclass
class Cover:
    """Minimal projective cover ``⊕ (L_3^i)^{t_i} → X`` given by ``psi``."""

    tops: list[int]
    psi: np.ndarray
    P: LatticeRep = field(repr=False)


def _eigen_projectors(T: np.ndarray, gp: GammaParams, ctx: RingCtx) -> list[np.ndarray]:
    """``E_i = r^{-1} Σ_j ρ^{-ij} T^j`` for ``i = 0 .. r-1``."""
    mod = ctx.modulus
    r = gp.r
    powers = [identity(T.shape[0], mod)]
    for _ in range(r - 1):
        powers.append(mmul(powers[-1], T, mod))
    rho_inv = pow(teichmuller(gp.s, ctx), -1, mod)
    r_inv = pow(r, -1, mod)
    out = []
    for i in range(r):
        acc = zeros(T.shape, mod)
        for j, x in enumerate(powers):
            acc = (acc + pow(rho_inv, i * j, mod) * x) % mod
        out.append(acc * r_inv % mod)
    return out


def projective_cover(gp: GammaParams, ctx: RingCtx, S: np.ndarray, T: np.ndarray, rel: np.ndarray) -> Cover:
    """Minimal cover of the module ``(ctx-ring)^n / rel`` with actions ``S, T``."""
    p = gp.p
    mod = ctx.modulus
    n = S.shape[0]
    w = np.concatenate([rel, (identity(n, mod) - S) % mod], axis=1)
    wbar = column_basis_mod_p(w, p) if w.size else np.zeros((n, 0), dtype=np.int64)
    gens = []
    tops = []
    hi = gp.with_k(ctx.k)
    for i, E in enumerate(_eigen_projectors(T, gp, ctx)):
        # pivots of [wbar | E] beyond wbar are the greedy independent choice
        m = wbar.shape[1]
        trial = np.concatenate([wbar, _fp(E, p)], axis=1)
        _, piv = rref_mod_p(trial, p)
        picked = [c - m for c in piv if c >= m]
        gens += [(i, E[:, c]) for c in picked]
        wbar = np.concatenate([wbar, _fp(E[:, picked], p)], axis=1)
        tops.append(len(picked))
    if wbar.shape[1] != n:
        raise ArithmeticError("cover generators do not span the top")
    cols, parts = [], []
    for i, x in gens:
        v = x
        for _ in range(p):
            cols.append(v)
            v = mmul(S, v, mod)
        parts.append(make_L3(hi, i))
    psi = np.stack(cols, axis=1) if cols else zeros((n, 0), mod)
    P = direct_sum(hi, parts) if parts else LatticeRep(hi, zeros((0, 0), mod), zeros((0, 0), mod))
    return Cover(tops, psi, P)


def omega_lattice(L: LatticeRep) -> LatticeRep:
    """Kernel of the minimal projective cover of ``L`` (no precision is lost)."""
    gp, ctx = L.params, L.ctx
    mod = ctx.modulus
    cov = projective_cover(gp, ctx, L.sigma, L.tau, zeros((L.rank, 0), mod))
    if cov.psi.shape[1] == 0:
        return LatticeRep(gp, zeros((0, 0), mod), zeros((0, 0), mod))
    B, C, _ = saturated_kernel(cov.psi, gp.p, ctx.k, exact=True)
    conj = lambda a: mmul(mmul(C, a, mod), B, mod)
    return LatticeRep(gp, conj(cov.P.sigma), conj(cov.P.tau))


def omega_class(L: LatticeRep) -> PeClassVector:
    return fingerprint(omega_lattice(L)).stripped()


def _finite_gamma_module(X: LambdaModule) -> tuple[LambdaModule, GammaParams, list[int]]:
    G = X.group
    if G.kind != "gamma" or X.domain is not None:
        raise ValueError("expected a module over Γ")
    X = prune(X)
    exps = torsion_exponents(X)
    if any(e >= X.ctx.k for e in exps):
        raise NotFinite("module has a free coordinate (relations not of full rank)")
    p, r, s = G.params
    return X, GammaParams(p, r, s, X.ctx.k), exps


@dataclass
class CoverKernel:
    """Kernel ``K`` of ``P → X`` for finite ``X`` in the basis ``U·diag(p^d)``."""

    lattice: LatticeRep
    exponents: list[int]


def _sub_basis_action(L_: np.ndarray, U: np.ndarray, exps: list[int], A: np.ndarray, p: int, hi: int, lo: int):
    """``diag(p^-d) L A U diag(p^d)`` computed mod ``p^hi``, returned mod ``p^lo``."""
    mod_hi = p**hi
    x = mmul(mmul(L_, A, mod_hi), U, mod_hi).astype(object)
    pw = np.array([p**d for d in exps], dtype=object)
    x = (x * pw[None, :]) % mod_hi
    if ((x % pw[:, None]) != 0).any():
        raise ArithmeticError("basis change does not preserve the sublattice")
    return as_mat(x // pw[:, None], p**lo)


def cover_kernel(X: LambdaModule) -> CoverKernel:
    """Kernel lattice of a minimal projective cover of a finite Γ-module.

    The module is re-read at precision ``k + e`` (e its exponent), which does
    not change it, so the kernel comes out valid mod ``p^k``.
    """
    X, gp, exps = _finite_gamma_module(X)
    p, k = gp.p, gp.k
    e = max(exps, default=0)
    hi = X.ctx.with_k(k + e)
    Xh = X.with_ctx(hi)
    mod = hi.modulus
    n = Xh.rank
    S = Xh.named("sigma")
    T = Xh.named("tau") if Xh.group.named["tau"] in Xh.actions else identity(n, mod)
    cov = projective_cover(gp, hi, S, T, Xh.relations)
    m = cov.psi.shape[1]
    if m == 0:
        z = zeros((0, 0), gp.ctx.modulus)
        return CoverKernel(LatticeRep(gp, z, z), [])
    full = np.concatenate([cov.psi, Xh.relations], axis=1)
    B, _, _ = saturated_kernel(full, p, hi.k, exact=True)
    KP = B[:m]
    sf = snf(KP, p, hi.k)
    d = sf.exponents
    if len(d) < m or max(d) > e:
        raise PrecisionError("cover kernel has unexpected index; raise k")
    acts = [_sub_basis_action(sf.L, sf.U, d, A, p, hi.k, k) for A in (cov.P.sigma, cov.P.tau)]
    return CoverKernel(LatticeRep(gp, *acts), list(d))


def phi(X: LambdaModule) -> PeClassVector:
    """Φ(X): the kernel of a projective cover, fingerprinted and stripped."""
    return fingerprint(cover_kernel(X).lattice).stripped()


def omega1_module(X: LambdaModule, m: int | None = None) -> LambdaModule:
    """ω¹(X) as a finite module: kernel of ``P/p^m P → X`` with ``p^m X = 0``.

    ``P/p^m P`` has projective dimension 1.  In the basis of the cover kernel
    ``K`` the submodule ``p^m P`` is spanned by ``p^{m - d_i}`` times the basis.
    """
    ck = cover_kernel(X)
    e = max(ck.exponents, default=0)
    m = e if m is None else m
    if m < e:
        raise ValueError(f"m = {m} does not kill the module (exponent {e})")
    K = ck.lattice
    mod = K.ctx.modulus
    n = K.rank
    if m >= K.ctx.k:
        raise PrecisionError("ω¹ needs m < k")
    rel = zeros((n, n), mod)
    for i, d in enumerate(ck.exponents):
        rel[i, i] = K.params.p ** (m - d)
    M = K.to_module()
    return prune(LambdaModule(M.ctx, M.group, rel, M.actions))


def omega1_finite(X: LambdaModule) -> PeClassVector:
    """Class of ω¹(X) through Φ, by the commutative square Φω¹ = ΩΦ."""
    return omega_vec(phi(X))
