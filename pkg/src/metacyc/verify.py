"""Named verification checks, one per acceptance criterion.

Shared by ``metacyc verify`` and the acceptance test-suite.  Each check
returns a :class:`CheckResult`; nothing here raises on a mathematical
mismatch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import admissible as adm
from .chainring import fp_eigenspace_dims, identity, mmul, random_invertible, saturated_kernel
from .groups import (
    ImpossibleWitness,
    Subgroup,
    alternating_a4,
    divisors,
    enumerate_relevant_pairs,
    enumerate_subgroups,
    going_up_check,
    is_supersolvable,
    local_witness,
    make_g,
    make_gamma,
    quotient_is_cyclic,
    relevant_pair_count,
)
from .lattices import (
    ClassVector,
    GammaParams,
    LatticeRep,
    PeClassVector,
    fingerprint,
    is_in_phi_image,
    lattice_from_vector,
    make_L1,
    make_L2,
    make_L3,
    omega_class,
    phi,
    quotient_action,
    regular_lattice,
)
from .modules import (
    AIDSpec,
    LambdaModule,
    build_AID,
    build_fractional_lattice,
    cyclic_quotient_module,
    fp_twist,
    generating_phis,
    induced_minus_part,
    p_minus_part,
    submodule_columns,
    torsion_exponents,
)

PARAMETER_SETS = [(3, 2), (5, 2), (5, 4), (7, 3), (7, 6), (13, 12)]
SUITES = ("all", "classify", "monoid", "aid", "realize")


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    expected: object = None
    computed: object = None
    detail: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "expected": self.expected,
            "computed": self.computed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class Session:
    """Per-parameter cache of the expensive shared objects."""

    gp: GammaParams
    seed: int = 0
    trials: int = 100
    roundtrips: int = 200
    _memo: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.gp.p

    @property
    def r(self) -> int:
        return self.gp.r

    @cached_property
    def G(self):
        return make_g(self.p, self.r, self.gp.s)

    @cached_property
    def pairs(self):
        return enumerate_relevant_pairs(self.G)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.p, self.r, salt])

    def aid_minus(self, pr, phi_elem):
        key = ("A", id(pr), phi_elem)
        if key not in self._memo:
            spec = AIDSpec(self.G, pr.D, pr.I, phi_elem)
            self._memo[key] = p_minus_part(build_AID(spec, self.gp.ctx))
        return self._memo[key]

    def frac_minus(self, pr, phi_elem) -> LatticeRep:
        key = ("L", id(pr), phi_elem)
        if key not in self._memo:
            spec = AIDSpec(self.G, pr.D, pr.I, phi_elem)
            self._memo[key] = LatticeRep.from_module(build_fractional_lattice(spec, self.gp.ctx, minus=True))
        return self._memo[key]


def _unit(r: int, kind: int, i: int) -> ClassVector:
    z = [0] * r
    v = [list(z), list(z), list(z)]
    v[kind - 1][i % r] = 1
    return ClassVector(r, *v)


# --- criteria ------------------------------------------------------------------


def check_classification(S: Session) -> CheckResult:
    gp, r, p = S.gp, S.r, S.p
    problems = []
    prints = []
    for i in range(r):
        for kind, (mk, rank) in enumerate([(make_L1, 1), (make_L2, p - 1), (make_L3, p)], start=1):
            L = mk(gp, i)
            if not L.relations_hold():
                problems.append(f"{mk.__name__}({i}) violates the Γ-relations")
            if L.rank != rank:
                problems.append(f"{mk.__name__}({i}) has rank {L.rank}")
            fp = fingerprint(L)
            if fp != _unit(r, kind, i):
                problems.append(f"{mk.__name__}({i}) fingerprint {fp.to_json()}")
            prints.append(fp)
    if len(set(prints)) != 3 * r:
        problems.append("fingerprints are not pairwise distinct")
    reg = fingerprint(regular_lattice(gp))
    free = fingerprint(lattice_from_vector(gp, ClassVector(r, [0] * r, [0] * r, [1] * r)))
    if reg != free:
        problems.append(f"regular lattice {reg.to_json()} != sum of L_3 {free.to_json()}")
    return CheckResult(1, "classification", not problems, 3 * r, len(set(prints)), "; ".join(problems))


def check_exact_sequence(S: Session) -> CheckResult:
    gp, p, r = S.gp, S.p, S.r
    mod = gp.ctx.modulus
    bad = []
    for i in range(r):
        L3 = make_L3(gp, i)
        onto = np.ones((1, p), dtype=np.int64)  # σ^a e_i ↦ 1
        B, C, _ = saturated_kernel(onto, p, gp.k, exact=True)
        conj = lambda a: mmul(mmul(C, a, mod), B, mod)
        K = LatticeRep(gp, conj(L3.sigma), conj(L3.tau))
        got = fingerprint(K)
        if got != _unit(r, 2, i + 1):
            bad.append(f"i={i}: {got.to_json()}")
    return CheckResult(2, "exact_sequence", not bad, "L_2^{i+1}", None, "; ".join(bad))


def check_omega_identities(S: Session) -> CheckResult:
    gp, r = S.gp, S.r
    bad = []
    for i in range(r):
        got1 = omega_class(make_L1(gp, i))
        if got1 != PeClassVector.unit(r, 2, i + 1):
            bad.append(f"Ω(L_1^{i}) = {got1.to_json()}")
        got2 = omega_class(make_L2(gp, i))
        if got2 != PeClassVector.unit(r, 1, i):
            bad.append(f"Ω(L_2^{i}) = {got2.to_json()}")
    return CheckResult(3, "omega_identities", not bad, None, None, "; ".join(bad))


def check_phi_base_case(S: Session) -> CheckResult:
    gp, r = S.gp, S.r
    bad = []
    for i in range(r):
        got = phi(fp_twist(gp.p, r, i, gp.s, gp.ctx))
        want = PeClassVector.unit(r, 1, i) + PeClassVector.unit(r, 2, i + 1)
        if got != want:
            bad.append(f"Φ(F_p({i})) = {got.to_json()}")
    return CheckResult(4, "phi_base_case", not bad, None, None, "; ".join(bad))


def random_class_vector(r: int, rng: np.random.Generator, max_terms: int = 6) -> ClassVector:
    v = np.zeros(3 * r, dtype=int)
    for _ in range(int(rng.integers(1, max_terms + 1))):
        v[rng.integers(0, 3 * r)] += 1
    return ClassVector(r, v[:r], v[r : 2 * r], v[2 * r :])


def scrambled(gp: GammaParams, v: ClassVector, rng: np.random.Generator) -> LatticeRep:
    L = lattice_from_vector(gp, v)
    q, qinv = random_invertible(L.rank, gp.ctx, rng)
    return L.base_change(q, qinv)


def check_decomposition(S: Session) -> CheckResult:
    rng = S.rng(5)
    bad = []
    for t in range(S.trials):
        v = random_class_vector(S.r, rng)
        lo = fingerprint(scrambled(S.gp, v, rng))
        hi = fingerprint(scrambled(S.gp.with_k(S.gp.k + 1), v, rng))
        if lo != v or hi != v:
            bad.append(f"trial {t}: {v.to_json()} -> {lo.to_json()} / {hi.to_json()}")
    return CheckResult(5, "decomposition", not bad, S.trials, S.trials - len(bad), "; ".join(bad[:3]))


def random_finite_module(gp: GammaParams, rng: np.random.Generator) -> LambdaModule:
    """A lattice sum modulo ``p^m`` and a random cyclic submodule."""
    v = random_class_vector(gp.r, rng, max_terms=3)
    L = scrambled(gp, v, rng)
    M = L.to_module()
    mod = gp.ctx.modulus
    m = int(rng.integers(1, 3))
    y = rng.integers(0, mod, size=(L.rank, 1))
    rel = np.concatenate([(gp.p**m * identity(L.rank, mod)) % mod, submodule_columns(M, y)], axis=1)
    return LambdaModule(M.ctx, M.group, rel, M.actions)


def check_cp_structure(S: Session) -> CheckResult:
    rng = S.rng(6)
    bad = []
    n = max(10, S.trials // 5)
    for t in range(n):
        X = random_finite_module(S.gp, rng)
        v = phi(X)
        if not is_in_phi_image(v):
            bad.append(f"trial {t}: Φ = {v.to_json()}")
    r = S.r
    s0 = len(divisors(r))
    if r >= 2 and not s0 < 2 * r - 1:
        bad.append(f"σ0(r) = {s0} is not < 2r - 1 = {2 * r - 1}")
    return CheckResult(6, "cp_structure", not bad, "Σa = Σb", f"{n} modules", "; ".join(bad))


def _oracle_quotient(p: int, r: int, s: int, e: int, sign: int) -> list[int]:
    """τ-eigenspace dims of ``F_p[C_r]/(τ^{r/e} + sign)`` via dense F_p algebra."""
    shift = np.zeros((r, r), dtype=np.int64)
    for b in range(r):
        shift[(b + 1) % r, b] = 1
    gen = (np.linalg.matrix_power(shift, r // e) + sign * np.eye(r, dtype=np.int64)) % p
    tau_q = quotient_action(shift, gen, p)
    return fp_eigenspace_dims(tau_q, [pow(s, i, p) for i in range(r)], p)


def check_aid_modules(S: Session) -> CheckResult:
    p, r, s = S.p, S.r, S.gp.s
    bad = []
    for pr in S.pairs:
        X = S.aid_minus(pr, generating_phis(pr.D, pr.I)[0])
        exps = torsion_exponents(X)
        if any(e != 1 for e in exps):
            bad.append(f"{pr.case},{pr.d},{pr.e}: exponents {exps}")
            continue
        sig = X.named("sigma") % p
        if ((sig - np.eye(X.rank, dtype=np.int64)) % p).any():
            bad.append(f"{pr.case},{pr.d},{pr.e}: σ acts nontrivially")
        tau = X.named("tau") if X.group.named["tau"] in X.actions else np.eye(X.rank, dtype=np.int64)
        dims = fp_eigenspace_dims(tau % p, [pow(s, i, p) for i in range(r)], p)
        want = _oracle_quotient(p, r, s, pr.e, -1 if pr.case == "I" else 1)
        if dims != want or X.rank != sum(want):
            bad.append(f"{pr.case},{pr.d},{pr.e}: τ-eigen dims {dims} != {want}")
    return CheckResult(7, "aid_modules", not bad, "F_p[C_r]/(τ^{r/e} ∓ 1)", f"{len(S.pairs)} pairs", "; ".join(bad))


def check_phi_independence(S: Session) -> CheckResult:
    p, r, s = S.p, S.r, S.gp.s
    bad = []
    for pr in S.pairs:
        a_vals, l_vals = set(), set()
        for ph in generating_phis(pr.D, pr.I):
            X = S.aid_minus(pr, ph)
            tau = X.named("tau") if X.group.named["tau"] in X.actions else np.eye(X.rank, dtype=np.int64)
            dims = tuple(fp_eigenspace_dims(tau % p, [pow(s, i, p) for i in range(r)], p))
            a_vals.add((phi(X), dims))
            l_vals.add(fingerprint(S.frac_minus(pr, ph)))
        if len(a_vals) != 1 or len(l_vals) != 1:
            bad.append(f"{pr.case},{pr.d},{pr.e}: {len(a_vals)} A-classes, {len(l_vals)} ℒ-classes")
    return CheckResult(8, "phi_independence", not bad, 1, None, "; ".join(bad))


def pairs_up_to_conjugacy(G) -> list[tuple[Subgroup, Subgroup]]:
    subs = enumerate_subgroups(G)
    seen, reps = set(), []
    for D in subs:
        for I in subs:
            if not (I <= D and I.is_normal_in(D) and quotient_is_cyclic(D, I)):
                continue
            if (D, I) in seen:
                continue
            reps.append((D, I))
            seen.update((D.conjugate(g), I.conjugate(g)) for g in range(G.order))
    return reps


def check_vanishing(S: Session) -> CheckResult:
    G, p, r = S.G, S.p, S.r
    zero = PeClassVector.zero(r)
    bad, counted = [], 0
    j = G.named["j"]
    for D, I in pairs_up_to_conjugacy(G):
        p_free, j_in = I.order % p != 0, j in D
        if not (p_free or j_in):
            continue
        N = cyclic_quotient_module(AIDSpec(G, D, I, generating_phis(D, I)[0]), S.gp.ctx)
        signs = (-1, 1) if p_free else (-1,)
        for sign in signs:
            v = phi(induced_minus_part(N, sign))
            counted += 1
            if v != zero:
                bad.append(f"|D|={D.order}, |I|={I.order}, sign {sign}: {v.to_json()}")
    return CheckResult(9, "vanishing", not bad, "0", f"{counted} parts", "; ".join(bad[:3]))


def check_phi_of_aid(S: Session) -> CheckResult:
    r = S.r
    bad = []
    for pr in S.pairs:
        ph = generating_phis(pr.D, pr.I)[0]
        got = phi(S.aid_minus(pr, ph))
        want = adm.generator_vector(r, pr.case, pr.e)
        if got != want:
            bad.append(f"{pr.case},{pr.d},{pr.e}: Φ = {got.to_json()} != {want.to_json()}")
        via = omega_class(S.frac_minus(pr, ph))
        if via != got:
            bad.append(f"{pr.case},{pr.d},{pr.e}: Ω(ℒ⁻) = {via.to_json()} != Φ = {got.to_json()}")
    return CheckResult(10, "phi_of_aid", not bad, None, f"{len(S.pairs)} pairs", "; ".join(bad))


R6_ECHELON_ROWS = [[1, 1, 1, 1, 1, 1], [0, 1, 0, 1, 0, 1], [0, 0, 1, 0, 0, 1], [0, 0, 0, 0, 0, 1]]


def check_adm_basis(S: Session) -> CheckResult:
    p, r = S.p, S.r
    basis = adm.adm_basis(p, r)
    bad = []
    if len(basis) != len(divisors(r)):
        bad.append(f"basis size {len(basis)} != σ0(r) = {len(divisors(r))}")
    cols = [g.vector.coords() for g in basis]
    if np.linalg.matrix_rank(np.array(cols, dtype=float).T) != len(basis):
        bad.append("basis vectors are dependent")
    if adm.echelon_rows(6) != R6_ECHELON_ROWS:
        bad.append(f"r = 6 matrix {adm.echelon_rows(6)}")
    for e, row in zip(divisors(r), adm.echelon_rows(r)):
        a = adm.generator_vector(r, "I", e).a
        if row != [a[i % r] for i in range(1, r + 1)]:
            bad.append(f"v({e}) disagrees with L({e})")
    return CheckResult(11, "adm_basis", not bad, len(divisors(r)), len(basis), "; ".join(bad))


def check_roundtrip(S: Session) -> CheckResult:
    p, r = S.p, S.r
    rng = S.rng(12)
    basis = adm.adm_basis(p, r)
    bad = []
    for t in range(S.roundtrips):
        v = PeClassVector.zero(r)
        for g in basis:
            v = v + g.vector.scale(int(rng.integers(0, 4)))
        _, steps = adm.realize(v, p, S.gp.s)
        pre, _ = adm.predict(S.G, [st.pair for st in steps])
        if pre != v:
            bad.append(f"trial {t}: {v.to_json()} -> {pre.to_json()}")
    if r >= 2:
        w = adm.non_admissible_witness(p, r)
        try:
            adm.realize(w, p, S.gp.s)
            bad.append(f"{w.to_json()} was realized")
        except adm.NotAdmissible:
            pass
    return CheckResult(12, "roundtrip", not bad, S.roundtrips, S.roundtrips - len(bad), "; ".join(bad[:3]))


def check_group_predicates(S: Session | None = None) -> CheckResult:
    bad = []
    if not is_supersolvable(make_gamma(3, 2))[0]:
        bad.append("S3 not supersolvable")
    if is_supersolvable(alternating_a4())[0]:
        bad.append("A4 reported supersolvable")
    n = len(enumerate_subgroups(make_g(3, 2)))
    if n != 16:
        bad.append(f"S3 x C2 has {n} subgroups")
    G = make_g(5, 4)
    D = Subgroup.generated(G, [G.elem(1), G.elem(0, 1)])
    I = Subgroup.generated(G, [G.elem(1), G.elem(0, 2)])
    try:
        local_witness(D, I)
        bad.append("r = 4, e = 4, d = 2 instance got a witness")
    except ImpossibleWitness as exc:
        if not any("(a)" in x for x in exc.reasons) or not any("(c)" in x for x in exc.reasons):
            bad.append(f"reasons {exc.reasons}")
    if going_up_check(D, I, 2).status != "fail(c)":
        bad.append("going-up check at ell = 2 did not fail (c)")
    for q in (3, 5):
        if going_up_check(D, I, q).status != "fail(a)":
            bad.append(f"going-up check at ell = {q} did not fail (a)")
    return CheckResult(13, "group_predicates", not bad, None, None, "; ".join(bad))


def check_pair_count(S: Session) -> bool:
    return len(S.pairs) == relevant_pair_count(S.r)


CHECKS: list[tuple[int, Callable[[Session], CheckResult], tuple[str, ...]]] = [
    (1, check_classification, ("classify",)),
    (2, check_exact_sequence, ("classify",)),
    (3, check_omega_identities, ("classify",)),
    (4, check_phi_base_case, ("classify",)),
    (5, check_decomposition, ("classify",)),
    (6, check_cp_structure, ("monoid",)),
    (7, check_aid_modules, ("aid",)),
    (8, check_phi_independence, ("aid",)),
    (9, check_vanishing, ("aid",)),
    (10, check_phi_of_aid, ("aid",)),
    (11, check_adm_basis, ("monoid",)),
    (12, check_roundtrip, ("monoid", "realize")),
    (13, check_group_predicates, ("realize",)),
]


def run_check(fn, S: Session) -> CheckResult:
    t = time.perf_counter()
    try:
        res = fn(S)
    except Exception as exc:  # a crash is a failed check, reported by name
        crit = next(c for c, f, _ in CHECKS if f is fn)
        res = CheckResult(crit, fn.__name__.removeprefix("check_"), False, detail=f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t
    return res


def run_suite(gp: GammaParams, suite: str = "all", seed: int = 0, criteria: list[int] | None = None) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    S = Session(gp, seed)
    out = []
    for crit, fn, suites in CHECKS:
        if criteria is not None and crit not in criteria:
            continue
        if suite == "all" or suite in suites:
            out.append(run_check(fn, S))
    return sorted(out, key=lambda c: c.criterion)
