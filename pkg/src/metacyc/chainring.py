"""Exact linear algebra over the chain ring Z/p^k.

Matrices are plain numpy integer arrays, column convention (``M[:, j]`` is the
image of basis vector ``j``).  Entries stay reduced into ``[0, p^k)``.  When
``p^k`` is small enough that every product sum fits in 64 bits we use int64,
otherwise object arrays of Python ints; no floating point is ever involved.

Precision bookkeeping: a :class:`ChainMatrix` carries ``valid_prec``, the
exponent ``v`` such that its entries are trusted modulo ``p^v``.  Kernels lose
one digit, images and products lose none.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Largest inner dimension for which int64 products are guaranteed not to overflow.


class PrecisionError(ArithmeticError):
    """Raised when the trusted p-adic precision is too small for an operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def valuation(x: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero."""
    x = int(x)
    if x == 0:
        if cap is None:
            raise ValueError("valuation of 0 is infinite")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


@dataclass(frozen=True)
class RingCtx:
    p: int
    k: int = 6

    def __post_init__(self):
        if self.p % 2 == 0 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.k < 3:
            raise ValueError(f"working precision k must be >= 3, got {self.k}")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def with_k(self, k: int) -> "RingCtx":
        return RingCtx(self.p, k)

    @property
    def dtype(self):
        return dtype_for(self.modulus)


def dtype_for(mod: int):
    # int64 whenever elementwise products of residues fit; mmul splits limbs
    if mod <= 2**31:
        return np.int64
    return object


def as_mat(rows, mod: int) -> np.ndarray:
    """Integer array reduced mod ``mod`` with the dtype suited to that modulus."""
    a = rows if isinstance(rows, np.ndarray) else np.array(rows, dtype=object)
    if dtype_for(mod) is object:
        return (a if a.dtype == object else a.astype(object)) % mod
    if a.dtype == object:
        return (a % mod).astype(np.int64)
    return a.astype(np.int64) % mod


def _fp(a, p: int) -> np.ndarray:
    a = np.asarray(a)
    return (a % p).astype(np.int64)


def identity(n: int, mod: int) -> np.ndarray:
    return as_mat(np.eye(n, dtype=np.int64), mod)


def zeros(shape, mod: int) -> np.ndarray:
    return np.zeros(shape, dtype=dtype_for(mod))


def mmul(a: np.ndarray, b: np.ndarray, mod: int) -> np.ndarray:
    """Matrix product reduced mod ``mod``.

    With int64 inputs the right factor is split into bit limbs whenever a
    direct product could overflow.
    """
    if a.dtype == object or b.dtype == object or dtype_for(mod) is object:
        return as_mat(a.astype(object) @ b.astype(object), mod)
    a, b = a % mod, b % mod
    inner = a.shape[-1]
    if mod * mod * max(inner, 1) < 2**63:
        return (a @ b) % mod
    width = 62 - mod.bit_length() - inner.bit_length()
    if width < 4:
        return as_mat(a.astype(object) @ b.astype(object), mod)
    out = np.zeros((a[..., :1] @ b[:1]).shape, dtype=np.int64)
    mask, shift = (1 << width) - 1, 0
    while b.any():
        part = (a @ (b & mask)) % mod
        out = (out + part * pow(2, shift, mod)) % mod
        b = b >> width
        shift += width
    return out


def mpow(a: np.ndarray, e: int, mod: int) -> np.ndarray:
    result = identity(a.shape[0], mod)
    base = a % mod
    while e:
        if e & 1:
            result = mmul(result, base, mod)
        base = mmul(base, base, mod)
        e >>= 1
    return result


def teichmuller(s: int, ctx: RingCtx) -> int:
    """Teichmüller lift of the unit ``s`` mod p to ``Z/p^k``.

    The lift is ``s^(p^(k-1)) mod p^k``: congruent to ``s`` mod p and of order
    dividing ``p - 1``.
    """
    if s % ctx.p == 0:
        raise ValueError(f"Teichmüller lift needs a unit mod {ctx.p}, got {s}")
    return pow(s, ctx.p ** (ctx.k - 1), ctx.modulus)


@dataclass
class ChainMatrix:
    ctx: RingCtx
    entries: np.ndarray
    valid_prec: int = -1

    def __post_init__(self):
        if self.valid_prec < 0:
            self.valid_prec = self.ctx.k
        if self.valid_prec > self.ctx.k:
            raise ValueError("valid_prec cannot exceed the working precision")
        self.entries = as_mat(self.entries, self.ctx.modulus)
        if self.entries.ndim != 2:
            self.entries = self.entries.reshape(self.entries.shape[0], -1)

    @classmethod
    def from_rows(cls, ctx: RingCtx, rows: Sequence[Sequence[int]], valid_prec: int = -1):
        return cls(ctx, as_mat([[int(x) for x in row] for row in rows], ctx.modulus), valid_prec)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, other: "ChainMatrix") -> "ChainMatrix":
        return ChainMatrix(
            self.ctx,
            mmul(self.entries, other.entries, self.ctx.modulus),
            min(self.valid_prec, other.valid_prec),
        )

    def reduce(self, prec: int | None = None) -> np.ndarray:
        """Entries reduced mod ``p^prec`` (default: the valid precision)."""
        prec = self.valid_prec if prec is None else prec
        return self.entries % (self.ctx.p**prec)


@dataclass
class SmithForm:
    """``A = U @ D @ V`` with ``D`` diagonal ``p^exponents`` and ``L @ A @ R = D``.

    Exponents equal to ``prec`` stand for a zero diagonal entry at that
    precision.  ``L``/``R`` are the inverses of ``U``/``V``.
    """

    p: int
    prec: int
    exponents: list[int]
    U: np.ndarray
    V: np.ndarray
    L: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for d in self.exponents if d < self.prec)

    def diagonal(self, shape) -> np.ndarray:
        mod = self.p**self.prec
        D = zeros(shape, mod)
        for i, d in enumerate(self.exponents):
            if d < self.prec:
                D[i, i] = self.p**d
        return D


def _first_min_valuation(sub: np.ndarray, p: int, prec: int):
    pk = 1
    for v in range(prec):
        pk *= p
        mask = (sub % pk) != 0
        if mask.any():
            idx = int(np.argmax(mask.ravel()))
            i, j = divmod(idx, sub.shape[1])
            return v, i, j
    return None


def snf(a: np.ndarray, p: int, prec: int) -> SmithForm:
    """Smith form of ``a`` over ``Z/p^prec``.

    Pivots by smallest valuation, ties broken by lowest row-major index.
    """
    mod = p**prec
    a = as_mat(a, mod).copy()
    n, c = a.shape
    L, Linv = identity(n, mod), identity(n, mod)
    R, Rinv = identity(c, mod), identity(c, mod)
    exps: list[int] = []
    for t in range(min(n, c)):
        found = _first_min_valuation(a[t:, t:], p, prec)
        if found is None:
            break
        v, i, j = found
        i += t
        j += t
        if i != t:
            a[[t, i]] = a[[i, t]]
            L[[t, i]] = L[[i, t]]
            Linv[:, [t, i]] = Linv[:, [i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            R[:, [t, j]] = R[:, [j, t]]
            Rinv[[t, j]] = Rinv[[j, t]]
        pv = p**v
        u = int(a[t, t]) // pv
        uinv = pow(u, -1, mod)
        a[t] = (a[t] * uinv) % mod
        L[t] = (L[t] * uinv) % mod
        Linv[:, t] = (Linv[:, t] * u) % mod
        q = a[t + 1 :, t] // pv
        if q.any():
            a[t + 1 :] = (a[t + 1 :] - np.outer(q, a[t])) % mod
            L[t + 1 :] = (L[t + 1 :] - np.outer(q, L[t])) % mod
            Linv[:, t] = (Linv[:, t] + mmul(Linv[:, t + 1 :], q, mod)) % mod
        qc = a[t, t + 1 :] // pv
        if qc.any():
            a[t, t + 1 :] = 0
            R[:, t + 1 :] = (R[:, t + 1 :] - np.outer(R[:, t], qc)) % mod
            Rinv[t] = (Rinv[t] + mmul(qc, Rinv[t + 1 :], mod)) % mod
        exps.append(v)
    exps += [prec] * (min(n, c) - len(exps))
    return SmithForm(p, prec, exps, U=Linv, V=Rinv, L=L, R=R)


def smith_normal_form(A: ChainMatrix) -> SmithForm:
    """Smith form of ``A`` at its valid precision."""
    return snf(A.reduce(), A.ctx.p, A.valid_prec)


def kernel_mod(A: ChainMatrix) -> ChainMatrix:
    """Generators of ``{x : A x = 0 mod p^v}`` tagged with precision ``v - 1``.

    When the cokernel torsion of the underlying p-adic matrix is killed by p,
    the generators reduce mod ``p^(v-1)`` to the true saturated kernel.
    """
    v = A.valid_prec
    if v < 2:
        raise PrecisionError("kernel needs valid precision >= 2")
    sf = smith_normal_form(A)
    p = A.ctx.p
    gens = []
    for t in range(A.cols):
        d = sf.exponents[t] if t < len(sf.exponents) else v
        if d == 0:
            continue
        col = sf.R[:, t]
        gens.append(col if d >= v else (col * p ** (v - d)) % p**v)
    mod = A.ctx.modulus
    ent = np.stack(gens, axis=1) if gens else zeros((A.cols, 0), mod)
    return ChainMatrix(A.ctx, ent, v - 1)


def saturated_kernel(a: np.ndarray, p: int, prec: int, exact: bool = False):
    """Basis and coordinate map for the saturated kernel of ``a``.

    Returns ``(B, C, prec_out)``: columns of ``B`` are a basis of the kernel
    and ``C @ y`` gives the coordinates of a kernel vector ``y`` in that basis.
    The cokernel torsion must be killed by p (exponents in {0, 1}); with
    ``exact=True`` the caller guarantees a torsion-free cokernel (surjections,
    idempotents) and no digit is lost.
    """
    sf = snf(a, p, prec)
    ncols = a.shape[1]
    exps = sf.exponents + [prec] * (ncols - len(sf.exponents))
    bad = [d for d in exps if 0 < d < prec and (exact or d > 1)]
    if bad:
        if exact:
            raise ValueError(f"cokernel is not torsion-free (exponents {bad})")
        if prec < 3:
            raise PrecisionError(f"precision {prec} too small to separate kernel exponents")
        raise ValueError(f"cokernel torsion has exponent {max(bad)} > 1")
    J = [t for t, d in enumerate(exps) if d >= prec]
    out = prec if exact else prec - 1
    if out < 1:
        raise PrecisionError("kernel computation exhausted the precision")
    return sf.R[:, J], sf.V[J, :], out


def inverse_mod(a: np.ndarray, p: int, prec: int) -> np.ndarray:
    sf = snf(a, p, prec)
    if a.shape[0] != a.shape[1] or any(d != 0 for d in sf.exponents):
        raise ValueError("matrix is not invertible over Z/p^k")
    return mmul(sf.R, sf.L, p**prec)


def random_invertible(n: int, ctx: RingCtx, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """A uniformly random invertible matrix and its inverse."""
    mod = ctx.modulus
    while True:
        q = as_mat(rng.integers(0, mod, size=(n, n)), mod)
        if rank_mod_p(q, ctx.p) == n:
            return q, inverse_mod(q, ctx.p, ctx.k)


# --- F_p linear algebra -----------------------------------------------------


def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    m = _fp(a, p).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        if col.any():
            m = (m - np.outer(col, m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod_p(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref_mod_p(a, p)[1])


def column_basis_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """A subset of the columns of ``a`` forming a basis of its F_p column span."""
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    _, piv = rref_mod_p(a, p)
    return _fp(a, p)[:, piv]


def fp_eigenspace_dims(mbar: np.ndarray, eigenvalues: Sequence[int], p: int) -> list[int]:
    """``dim ker(mbar - λ I)`` over F_p for each λ."""
    lams = [int(x) % p for x in eigenvalues]
    if len(set(lams)) != len(lams):
        raise ValueError(f"eigenvalue list has repeats: {list(eigenvalues)}")
    m = _fp(mbar, p)
    n = m.shape[0]
    eye = np.eye(n, dtype=np.int64)
    return [n - rank_mod_p((m - lam * eye) % p, p) for lam in lams]


def quotient_eigen_dims(t: np.ndarray, w: np.ndarray, eigenvalues: Sequence[int], p: int) -> list[int]:
    """Eigenspace dimensions of ``t`` on ``F_p^n / span(w)``.

    ``t`` must preserve ``span(w)`` and be semisimple (order prime to p), so
    the dimensions are differences of the ambient and subspace dimensions.
    """
    n = t.shape[0]
    tot = fp_eigenspace_dims(t, eigenvalues, p)
    wb = column_basis_mod_p(w, p) if w.size else np.zeros((n, 0), dtype=np.int64)
    dim_w = wb.shape[1]
    tt = _fp(t, p)
    sub = []
    for lam in eigenvalues:
        if dim_w == 0:
            sub.append(0)
            continue
        img = (tt @ wb - lam * wb) % p
        sub.append(dim_w - rank_mod_p(img, p))
    return [a - b for a, b in zip(tot, sub)]
