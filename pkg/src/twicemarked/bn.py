"""Vanishing sequences, adjusted Brill--Noether numbers and splitting types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from . import zperm
from .chipfire import enumerate_picard, is_equivalent, rank, torsion_order
from .graph import Divisor, MarkedGraph
from .transmission import TransmissionError, transmission_permutation
from .zperm import INFINITE, ZPerm, inv_k


class BNError(ValueError):
    pass


# --- vanishing sequences -----------------------------------------------------


@dataclass(frozen=True)
class VanishingData:
    r: int
    degree: int
    genus: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    @property
    def rho(self) -> int:
        return self.genus - inversion_lower_bound(self.r, self.genus - self.degree + self.r, self.a, self.b)


def inversion_lower_bound(r: int, excess: int, a: Iterable[int], b: Iterable[int]) -> int:
    """``(r+1) * excess + sum(a_i - i) + sum(b_i - i)`` with ``excess = g - d + r``."""
    return (r + 1) * excess + sum(x - i for i, x in enumerate(a)) + sum(x - i for i, x in enumerate(b))


def _vanishing(g, d: Divisor, u: int, r: int) -> tuple[int, ...]:
    # ranks of D - a u for a = 0..deg+1; the last is -1 by degree
    ranks = [rank(g, d - g.point(u, a)) for a in range(d.degree + 2)]
    return tuple(max(a for a, x in enumerate(ranks) if x >= r - i) for i in range(r + 1))


def vanishing_data(mg: MarkedGraph, d: Divisor) -> VanishingData:
    r = rank(mg.graph, d)
    if r < 0:
        raise BNError("divisor has rank -1; no vanishing sequence")
    return VanishingData(
        r, d.degree, mg.genus, _vanishing(mg.graph, d, mg.v, r), _vanishing(mg.graph, d, mg.w, r)
    )


# --- inversion sets for the lower bound -------------------------------------------


@dataclass
class InversionSets:
    """The sets bounding ``inv(tau)`` from below, read off tau alone.

    ``b`` lists ``{n >= 0 : tau(n) <= 0}`` in increasing order, ``a_sigma[i]``
    is ``-tau(b[i])``; ``S``, ``A[i]``, ``B[i]`` hold first coordinates of
    inversions ending at ``b[i]``.
    """

    b: list[int]
    a_sigma: list[int]
    S: list[int]
    A: list[list[int]]
    B: list[list[int]]

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        for i, bi in enumerate(self.b):
            out += [(n, bi) for n in self.S + self.A[i] + self.B[i]]
        return out


def inversion_sets(tau: ZPerm) -> InversionSets:
    lo, hi = tau.displacement_bounds()
    b = [n for n in range(0, max(0, -lo) + 1) if tau(n) <= 0]
    a_sigma = [-tau(n) for n in b]
    S = [n for n in range(min(0, -hi), 0) if tau(n) > 0]
    A = [[n for n in range(min(0, tau(bi) - hi), 0) if 0 >= tau(n) > tau(bi)] for bi in b]
    B = [[n for n in range(0, bi) if tau(n) > 0] for bi in b]
    return InversionSets(b, a_sigma, S, A, B)


@dataclass
class InvBoundReport:
    vanishing: VanishingData
    tau: ZPerm
    sets: InversionSets
    sigma: list[int]
    inv_0: Any
    inv_k: int | None
    inversions_at_b: int
    bound: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict[str, Any]:
        from .serialize import count_to_json, perm_to_json

        vd = self.vanishing
        return {
            "r": vd.r,
            "degree": vd.degree,
            "genus": vd.genus,
            "a": list(vd.a),
            "b": list(vd.b),
            "rho": vd.rho,
            "tau": perm_to_json(self.tau),
            "sigma": self.sigma,
            "S": len(self.sets.S),
            "A": [len(x) for x in self.sets.A],
            "B": [len(x) for x in self.sets.B],
            "bound": self.bound,
            "inv_0": count_to_json(self.inv_0),
            "inv_k": self.inv_k,
            "inversions_at_b": self.inversions_at_b,
            "ok": self.ok,
            "failures": self.failures,
        }


def check_inv_bound(mg: MarkedGraph, d: Divisor) -> InvBoundReport:
    rep = transmission_permutation(mg, d)
    if not rep.submodular:
        raise TransmissionError(f"divisor is not submodular (witness {rep.witness})")
    tau = rep.tau
    vd = vanishing_data(mg, d)
    sets = inversion_sets(tau)
    failures = []

    lo, _ = tau.displacement_bounds()
    inv = zperm.invert(tau)
    a_read = [n for n in range(0, max(0, -lo) + 1) if inv(-n) >= 0]
    if a_read != list(vd.a):
        failures.append(f"vanishing sequence at v {list(vd.a)} != tau reading {a_read}")
    if sets.b != list(vd.b):
        failures.append(f"vanishing sequence at w {list(vd.b)} != tau reading {sets.b}")

    sigma = [vd.a.index(x) if x in vd.a else -1 for x in sets.a_sigma]
    excess = mg.genus - d.degree + vd.r
    if len(sets.S) != excess:
        failures.append(f"|S| = {len(sets.S)} != g - d + r = {excess}")
    for i, bi in enumerate(sets.b):
        if sigma[i] < 0:
            failures.append(f"-tau(b_{i}) = {sets.a_sigma[i]} is not a vanishing order at v")
        elif len(sets.A[i]) != vd.a[sigma[i]] - sigma[i]:
            failures.append(f"|A_{i}| = {len(sets.A[i])} != {vd.a[sigma[i]] - sigma[i]}")
        if len(sets.B[i]) != bi - i:
            failures.append(f"|B_{i}| = {len(sets.B[i])} != {bi - i}")
    pairs = sets.pairs()
    if len(set(pairs)) != len(pairs):
        failures.append("inversion sets overlap")
    if any(not (u < v and tau(u) > tau(v)) for u, v in pairs):
        failures.append("a listed pair is not an inversion")

    inversions_at_b = sum(len(zperm.inversions_ending_at(tau, bi)) for bi in sets.b)
    bound = inversion_lower_bound(vd.r, excess, vd.a, vd.b)
    if inversions_at_b < bound:
        failures.append(f"inversions ending at b: {inversions_at_b} < bound {bound}")
    k = torsion_order(mg)
    return InvBoundReport(
        vanishing=vd,
        tau=tau,
        sets=sets,
        sigma=sigma,
        inv_0=inv_k(tau, 0),
        inv_k=inv_k(tau, k) if k >= 2 else None,
        inversions_at_b=inversions_at_b,
        bound=bound,
        failures=failures,
    )


# --- splitting types ------------------------------------------------------------


@dataclass(frozen=True)
class SplittingType:
    mu: tuple[int, ...]

    def __post_init__(self):
        if list(self.mu) != sorted(self.mu):
            raise BNError(f"splitting type {self.mu} is not nondecreasing")

    def x(self, m: int) -> int:
        return sum(max(0, u + m + 1) for u in self.mu)

    def degree(self, genus: int) -> int:
        return genus - 1 + sum(u + 1 for u in self.mu)

    @property
    def codim(self) -> int:
        return sum(
            max(0, self.mu[j] - self.mu[i] - 1)
            for i in range(len(self.mu))
            for j in range(i + 1, len(self.mu))
        )


@dataclass
class SplittingReport:
    classifiable: bool
    k: int
    x: dict[int, int]
    mu: SplittingType | None = None
    witness_m: int | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "classifiable": self.classifiable,
            "k": self.k,
            "x": {str(m): v for m, v in sorted(self.x.items())},
        }
        if self.mu is not None:
            out["mu"] = list(self.mu.mu)
            out["codim"] = self.mu.codim
        if self.witness_m is not None:
            out["witness_m"] = self.witness_m
        return out


def splitting_window(degree: int, genus: int, k: int) -> tuple[int, int]:
    """``(m_lo, m_hi)``: ``deg + m k < 0`` at m_lo and ``> 2g - 2`` at m_hi."""
    m_lo = (-degree - 1) // k
    m_hi = -((degree - 2 * genus + 1) // k)
    return m_lo, m_hi


def splitting_type(mg: MarkedGraph, d: Divisor) -> SplittingReport:
    """Splitting type of ``d`` with respect to ``F = k v``."""
    k = torsion_order(mg)
    if k < 2:
        raise BNError("splitting types need torsion order >= 2")
    g, genus, deg = mg.graph, mg.genus, d.degree
    m_lo, m_hi = splitting_window(deg, genus, k)
    x = {m: rank(g, d + g.point(mg.v, m * k)) + 1 for m in range(m_lo - 1, m_hi + 2)}
    for m in (m_lo - 1, m_lo):
        if x[m] != 0:
            raise AssertionError(f"x_{m} = {x[m]} should be forced to 0")
    for m in (m_hi, m_hi + 1):
        if x[m] != deg + m * k - genus + 1:
            raise AssertionError(f"x_{m} = {x[m]} is not degree-forced")
    steps = {m: x[m] - x[m - 1] for m in range(m_lo, m_hi + 2)}
    for m in range(m_lo + 1, m_hi + 2):
        if steps[m] < steps[m - 1]:
            return SplittingReport(False, k, x, witness_m=m)
    # #{i : mu_i >= -m} = steps[m], so -m occurs steps[m] - steps[m-1] times
    mu: list[int] = []
    for m in range(m_lo, m_hi + 2):
        mu += [-m] * (steps[m] - steps.get(m - 1, 0))
    mu.sort()
    st = SplittingType(tuple(mu))
    if len(mu) != k or any(st.x(m) != x[m] for m in x):
        raise AssertionError(f"reconstructed {mu} does not reproduce x = {x}")
    if st.degree(genus) != deg:
        raise AssertionError(f"d(mu) = {st.degree(genus)} != deg D = {deg}")
    return SplittingReport(True, k, x, mu=st)


def s_m_sets(tau: ZPerm, k: int) -> dict[int, list[tuple[int, int]]]:
    """Bucket the inversions ``(i, j)``, ``i < 0 <= j < k``, by the level of tau(i).

    A pair lands in bucket ``m = floor((tau(i) - 1) / k)`` when
    ``floor((tau(j) - 1) / k) < m``.
    """
    buckets: dict[int, list[tuple[int, int]]] = {}
    for j in range(k):
        for i in zperm.inversions_ending_at(tau, j):
            if i >= 0:
                continue
            m = (tau(i) - 1) // k
            if (tau(j) - 1) // k < m:
                buckets.setdefault(m, []).append((i, j))
    return buckets


@dataclass
class SplittingCertificate:
    k: int
    genus: int
    kv_equiv_kw: bool
    rank_kv: int
    classes: int = 0
    max_codim: int = 0
    entries: list[dict[str, Any]] = field(default_factory=list)
    violations: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.kv_equiv_kw and self.rank_kv >= 1 and not self.violations

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "genus": self.genus,
            "kv_equiv_kw": self.kv_equiv_kw,
            "rank_kv": self.rank_kv,
            "classes": self.classes,
            "max_codim": self.max_codim,
            "pass": self.passed,
            "violations": self.violations,
        }


def check_class_splitting(mg: MarkedGraph, d: Divisor) -> dict[str, Any]:
    """All splitting-type assertions for one divisor; returns a record."""
    k = torsion_order(mg)
    genus = mg.genus
    entry: dict[str, Any] = {"divisor": list(d), "degree": d.degree}
    problems: list[str] = []
    sp = splitting_type(mg, d)
    rep = transmission_permutation(mg, d)
    if not sp.classifiable:
        problems.append(f"not classifiable (m = {sp.witness_m})")
    if not rep.submodular:
        problems.append("not submodular")
    if problems:
        entry["problems"] = problems
        return entry
    tau, mu = rep.tau, sp.mu
    inv = inv_k(tau, k)
    entry.update(mu=list(mu.mu), codim=mu.codim, inv_k=inv, tau=list(tau.values))
    if mu.degree(genus) != d.degree:
        problems.append("d(mu) != deg D")
    if not mu.codim <= inv <= genus:
        problems.append(f"|mu| = {mu.codim}, inv_k = {inv}, g = {genus}")
    x = sp.x
    for m in range(min(x) + 1, max(x) + 1):
        if x[m] - x[m - 1] != sum(1 for n in range(k) if tau(n) <= m * k):
            problems.append(f"x_{m} - x_{m - 1} disagrees with tau")
    buckets = s_m_sets(tau, k)
    for m in range(min(x) + 1, max(x)):
        expected = (k - x[m + 1] + x[m]) * (x[m] - x[m - 1])
        if len(buckets.get(m, [])) != expected:
            problems.append(f"|S_{m}| = {len(buckets.get(m, []))} != {expected}")
    if any(m <= min(x) or m >= max(x) for m in buckets):
        problems.append("S_m nonempty outside the degree-forced window")
    total = sum(len(v) for v in buckets.values())
    if total != mu.codim:
        problems.append(f"sum |S_m| = {total} != |mu| = {mu.codim}")
    flat = [p for v in buckets.values() for p in v]
    if len(set(flat)) != len(flat) or any(not (u < v and tau(u) > tau(v)) for u, v in flat):
        problems.append("S_m are not disjoint sets of inversions")
    entry["sum_S_m"] = total
    if problems:
        entry["problems"] = problems
    return entry


def certify_splitting_types(
    mg: MarkedGraph, degrees: Iterable[int] | None = None, cap: int | None = None
) -> SplittingCertificate:
    k = torsion_order(mg)
    if k < 2:
        raise BNError("marked points are linearly equivalent")
    g, genus = mg.graph, mg.genus
    kv = g.point(mg.v, k)
    report = SplittingCertificate(
        k=k,
        genus=genus,
        kv_equiv_kw=is_equivalent(g, kv, g.point(mg.w, k)),
        rank_kv=rank(g, kv),
    )
    for deg in degrees if degrees is not None else [genus]:
        for d in enumerate_picard(g, deg, mg.w, cap=cap):
            entry = check_class_splitting(mg, d)
            report.classes += 1
            report.entries.append(entry)
            if "problems" in entry:
                report.violations.append(entry)
            else:
                report.max_codim = max(report.max_codim, entry["codim"])
    return report


# name used by the published interface
check_theorem_c = certify_splitting_types


def adjusted_rho_survey(
    mg: MarkedGraph, degrees: Iterable[int], cap: int | None = None
) -> dict[str, Any]:
    """Adjusted Brill--Noether numbers of every class of the given degrees."""
    rhos = []
    negative = []
    for deg in degrees:
        for d in enumerate_picard(mg.graph, deg, mg.w, cap=cap):
            if rank(mg.graph, d) < 0:
                continue
            vd = vanishing_data(mg, d)
            rhos.append(vd.rho)
            if vd.rho < 0:
                negative.append({"divisor": list(d), "rho": vd.rho, "a": list(vd.a), "b": list(vd.b)})
    return {"classes": len(rhos), "min_rho": min(rhos, default=None), "negative": negative}
