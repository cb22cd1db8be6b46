"""Exact truncated arithmetic in the coroot monomial ring.

A series lives in integer polynomials in ``t`` (degree at most ``D``)
tensored with monomials ``e^{−b}`` in the negative coroot lattice,
truncated at coroot height ``H``.  Exponent vectors ``mu`` (non-negative
integers, one per simple coroot) stand for ``e^{−sum mu_i a_i_vee}``.
Both truncations are ideals, so all identities that hold in the full
ring hold exactly after truncation; every computation here is integer
arithmetic, never floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .cartan import GCM, is_w_finite
from .errors import (
    LengthBoundTooSmall,
    NotAUnit,
    NotStabilized,
    NotWFinite,
    TruncationMismatch,
)
from .roots import RootEntry, RootTable, coroot_slice
from .weyl import WeylElement, WeylTable, build_tables, poincare

Poly = tuple[int, ...]


def _poly_norm(coeffs: Iterable[int], degree: int) -> Poly:
    c = list(coeffs)[: degree + 1]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_add(a: Poly, b: Poly, degree: int) -> Poly:
    n = max(len(a), len(b))
    return _poly_norm(
        ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)),
        degree,
    )


def _poly_mul(a: Poly, b: Poly, degree: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * min(len(a) + len(b) - 1, degree + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > degree:
            continue
        for j, bj in enumerate(b):
            if i + j > degree:
                break
            out[i + j] += ai * bj
    return _poly_norm(out, degree)


def _poly_neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def _poly_inv(a: Poly, degree: int) -> Poly:
    """Inverse of a unit polynomial as a power series mod t^(degree+1)."""
    if not a or a[0] not in (1, -1):
        raise NotAUnit("constant t-coefficient must be +1 or -1")
    inv0 = a[0]  # 1/(+-1)
    out = [inv0] + [0] * degree
    for k in range(1, degree + 1):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s += a[j] * out[k - j]
        out[k] = -inv0 * s
    return _poly_norm(out, degree)


class FormalSeries:
    """Immutable truncated series; supports ``+ - *`` and exact equality.

    ``coeffs`` maps exponent vectors to normalized coefficient
    polynomials; zero coefficients are never stored.
    """

    __slots__ = ("rank", "height", "degree", "coeffs")

    def __init__(self, rank: int, height: int, degree: int,
                 coeffs: dict[tuple[int, ...], Poly] | None = None):
        self.rank = rank
        self.height = height
        self.degree = degree
        self.coeffs: dict[tuple[int, ...], Poly] = {}
        if coeffs:
            for mu, poly in coeffs.items():
                if sum(mu) > height:
                    continue
                p = _poly_norm(poly, degree)
                if p:
                    self.coeffs[mu] = p

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rank: int, height: int, degree: int) -> "FormalSeries":
        return cls(rank, height, degree)

    @classmethod
    def one(cls, rank: int, height: int, degree: int) -> "FormalSeries":
        return cls(rank, height, degree, {(0,) * rank: (1,)})

    @classmethod
    def from_tpoly(cls, coeffs: Iterable[int], rank: int, height: int,
                   degree: int) -> "FormalSeries":
        """Series with a pure ``t``-polynomial as its only term."""
        return cls(rank, height, degree, {(0,) * rank: tuple(coeffs)})

    @classmethod
    def monomial(cls, mu: tuple[int, ...], poly: Iterable[int], height: int,
                 degree: int) -> "FormalSeries":
        return cls(len(mu), height, degree, {tuple(mu): tuple(poly)})

    # -- structure ----------------------------------------------------

    def _check_compat(self, other: "FormalSeries") -> None:
        if (self.rank, self.height, self.degree) != (other.rank, other.height, other.degree):
            raise TruncationMismatch(
                f"operands truncated at {(self.rank, self.height, self.degree)} "
                f"vs {(other.rank, other.height, other.degree)}"
            )

    def constant_term(self) -> Poly:
        """Coefficient polynomial of the zero exponent."""
        return self.coeffs.get((0,) * self.rank, ())

    def is_unit(self) -> bool:
        c = self.constant_term()
        return bool(c) and c[0] in (1, -1)

    def is_constant(self) -> bool:
        """True when no non-zero exponent carries a coefficient."""
        return all(sum(mu) == 0 for mu in self.coeffs)

    def terms(self):
        """Coefficients sorted by (coroot height, exponent)."""
        for mu in sorted(self.coeffs, key=lambda mu: (sum(mu), mu)):
            yield mu, self.coeffs[mu]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (
            (self.rank, self.height, self.degree)
            == (other.rank, other.height, other.degree)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.rank, self.height, self.degree,
                     tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        k = len(self.coeffs)
        return (f"FormalSeries(rank={self.rank}, height<={self.height}, "
                f"deg<={self.degree}, {k} terms)")

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._check_compat(other)
        out = dict(self.coeffs)
        for mu, poly in other.coeffs.items():
            cur = out.get(mu)
            s = _poly_add(cur, poly, self.degree) if cur else poly
            if s:
                out[mu] = s
            elif cur:
                del out[mu]
        return FormalSeries(self.rank, self.height, self.degree, out)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(
            self.rank, self.height, self.degree,
            {mu: _poly_neg(p) for mu, p in self.coeffs.items()},
        )

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        self._check_compat(other)
        h, d = self.height, self.degree
        out: dict[tuple[int, ...], Poly] = {}
        bheights = {mu: sum(mu) for mu in other.coeffs}
        for mu1, p1 in self.coeffs.items():
            h1 = sum(mu1)
            for mu2, p2 in other.coeffs.items():
                if h1 + bheights[mu2] > h:
                    continue
                prod = _poly_mul(p1, p2, d)
                if not prod:
                    continue
                key = tuple(a + b for a, b in zip(mu1, mu2))
                cur = out.get(key)
                s = _poly_add(cur, prod, d) if cur else prod
                if s:
                    out[key] = s
                elif cur:
                    del out[key]
        return FormalSeries(self.rank, h, d, out)

    def inverse(self) -> "FormalSeries":
        """Multiplicative inverse up to truncation; requires a unit."""
        if not self.is_unit():
            raise NotAUnit("constant term has no +-1 constant t-coefficient")
        d = self.degree
        u0 = _poly_inv(self.constant_term(), d)
        # solve by coroot height: u_mu = -u0 * sum over splits of s*u
        by_height: dict[int, list[tuple[tuple[int, ...], Poly]]] = {}
        for mu, p in self.coeffs.items():
            hh = sum(mu)
            if hh:
                by_height.setdefault(hh, []).append((mu, p))
        out: dict[tuple[int, ...], Poly] = {(0,) * self.rank: u0}
        u_by_height: dict[int, list[tuple[tuple[int, ...], Poly]]] = {
            0: [((0,) * self.rank, u0)]
        }
        for h in range(1, self.height + 1):
            acc: dict[tuple[int, ...], Poly] = {}
            for g, terms in by_height.items():
                if g > h:
                    continue
                lower = u_by_height.get(h - g)
                if not lower:
                    continue
                for mu1, p1 in terms:
                    for mu2, p2 in lower:
                        prod = _poly_mul(p1, p2, d)
                        if not prod:
                            continue
                        key = tuple(a + b for a, b in zip(mu1, mu2))
                        cur = acc.get(key)
                        s = _poly_add(cur, prod, d) if cur else prod
                        if s:
                            acc[key] = s
                        elif cur:
                            del acc[key]
            level = []
            for mu, p in acc.items():
                val = _poly_neg(_poly_mul(u0, p, d))
                if val:
                    out[mu] = val
                    level.append((mu, val))
            if level:
                u_by_height[h] = level
        return FormalSeries(self.rank, self.height, self.degree, out)

    # -- evaluation ----------------------------------------------------

    def evaluate(self, t: complex, q: Iterable[complex]) -> complex:
        """Substitute numbers for ``t`` and for each ``e^{−a_i_vee}``."""
        qs = tuple(q)
        if len(qs) != self.rank:
            raise TruncationMismatch(
                f"expected {self.rank} substitution values, got {len(qs)}"
            )
        total = 0j
        for mu, poly in self.coeffs.items():
            acc = 0j
            for c in reversed(poly):
                acc = acc * t + c
            mono = 1 + 0j
            for qi, e in zip(qs, mu):
                if e:
                    mono *= qi ** e
            total += acc * mono
        return total


def series_mul(s1: FormalSeries, s2: FormalSeries) -> FormalSeries:
    """Exact truncated product."""
    return s1 * s2


def series_inv(s: FormalSeries) -> FormalSeries:
    """Exact truncated inverse of a unit series."""
    return s.inverse()


# ---------------------------------------------------------------------
# products over roots


def _ratio_factor(entry: RootEntry, height: int, degree: int) -> FormalSeries:
    """One factor ``(1 − t e^{−b}) / (1 − e^{−b})`` expanded exactly.

    Equals ``1 + (1 − t) (e^{−b} + e^{−2b} + ...)`` up to truncation.
    """
    rank = len(entry.m)
    c = entry.coheight
    coeffs: dict[tuple[int, ...], Poly] = {(0,) * rank: (1,)}
    k = 1
    while k * c <= height:
        coeffs[tuple(k * v for v in entry.m)] = _poly_norm((1, -1), degree)
        k += 1
    return FormalSeries(rank, height, degree, coeffs)


def _twist_factor(entry: RootEntry, height: int, degree: int) -> FormalSeries:
    """One factor ``(t − e^{−b}) / (1 − t e^{−b})`` expanded exactly.

    Equals ``t + sum_{j>=1} e^{−jb} (t^{j+1} − t^{j−1})``; for a root
    beyond the height truncation this degenerates to plain ``t``.
    """
    rank = len(entry.m)
    c = entry.coheight
    coeffs: dict[tuple[int, ...], list[int]] = {(0,) * rank: [0, 1]}
    j = 1
    while j * c <= height:
        poly = [0] * (j + 2)
        poly[j - 1] -= 1
        if j + 1 <= degree:
            poly[j + 1] += 1
        coeffs[tuple(j * v for v in entry.m)] = poly
        j += 1
    return FormalSeries(rank, height, degree,
                        {mu: tuple(p) for mu, p in coeffs.items()})


def delta_ratio(
    gcm: GCM,
    height: int,
    degree: int,
    *,
    entries: tuple[RootEntry, ...] | None = None,
    cap: int = 200_000,
) -> FormalSeries:
    """Product of ``(1 − t e^{−b})/(1 − e^{−b})`` over positive real roots.

    Only roots of coroot height at most ``height`` contribute; they are
    enumerated through the dual system so the slice is provably complete.
    Passing ``entries`` restricts the product (used for parabolic
    subsystems).
    """
    if entries is None:
        entries = coroot_slice(gcm, height, cap=cap)
    acc = FormalSeries.one(gcm.size, height, degree)
    for e in entries:
        if e.coheight > height:
            continue
        acc = acc * _ratio_factor(e, height, degree)
    return acc


def twisted_action(base: FormalSeries, w: WeylElement, roots: RootTable) -> FormalSeries:
    """Multiply ``base`` by the inversion-set product attached to ``w``.

    Inversion roots beyond the coroot-height truncation contribute an
    exact factor ``t`` (their monomial parts are all truncated away), so
    arbitrarily long elements stay usable; that is what makes the group
    summation stabilize degree by degree.
    """
    acc = base
    tshift = 0
    for idx in w.inversions:
        entry = roots[idx]
        if entry.coheight > base.height:
            tshift += 1
        else:
            acc = acc * _twist_factor(entry, base.height, base.degree)
    if tshift:
        if tshift > base.degree:
            return FormalSeries.zero(base.rank, base.height, base.degree)
        shift = [0] * tshift + [1]
        acc = acc * FormalSeries.from_tpoly(shift, base.rank, base.height, base.degree)
    return acc


@dataclass(frozen=True)
class WeylSumResult:
    """Group-summed series with per-exponent stabilization bookkeeping.

    ``last_changed[mu]`` is the largest length shell that moved the
    coefficient of ``mu`` (its stabilization length).  A height is
    flagged stable when its coefficients sat unchanged through the final
    two shells.
    """

    series: FormalSeries
    last_changed: dict[tuple[int, ...], int]
    stable_heights: dict[int, bool]
    length_bound: int

    @property
    def all_stable(self) -> bool:
        return all(self.stable_heights.values())

    def first_unstable(self) -> tuple[int, ...] | None:
        worst = None
        for mu, k in self.last_changed.items():
            if k > self.length_bound - 2:
                if worst is None or (sum(mu), mu) < (sum(worst), worst):
                    worst = mu
        return worst


def _inversion_products(wtable: WeylTable, length_bound: int,
                        height: int, degree: int,
                        elements=None):
    """Series ``prod over inversions of (t − e^{−b})/(1 − t e^{−b})`` per element.

    Yields ``(element, series)`` in breadth-first order, reusing the
    parent's series along the right-extension chain (each element costs
    one factor multiplication).
    """
    roots = wtable.roots
    if roots is None:
        raise ValueError("Weyl table was enumerated without inversion tracking")
    rank = wtable.gcm.size
    wanted = None if elements is None else {w.word for w in elements}
    cache: dict[tuple[int, ...], FormalSeries] = {}
    one = FormalSeries.one(rank, height, degree)
    tpoly = FormalSeries.from_tpoly((0, 1), rank, height, degree)
    for k in range(length_bound + 1):
        for w in wtable.shell(k):
            if k == 0:
                series = one
            else:
                parent = cache[w.word[:-1]]
                entry = roots[w.added]
                if entry.coheight > height:
                    series = parent * tpoly
                else:
                    series = parent * _twist_factor(entry, height, degree)
            cache[w.word] = series
            if wanted is None or w.word in wanted:
                yield w, series
        # parents are only ever one shell back
        if k >= 1:
            for w in wtable.shell(k - 1):
                cache.pop(w.word, None)


def weyl_sum(
    wtable: WeylTable,
    base: FormalSeries,
    length_bound: int | None = None,
) -> WeylSumResult:
    """Sum the twisted action of every element of length at most the bound.

    Setting every monomial to zero collapses each term to ``t^length``,
    so the constant term of the result is the truncated Poincare series;
    all other coefficients stop moving once the shells outrun the degree
    truncation, and the result records where each one settled.
    """
    L = wtable.length_bound if length_bound is None else length_bound
    if L > wtable.length_bound:
        raise LengthBoundTooSmall(
            f"table enumerated to length {wtable.length_bound}, need {L}"
        )
    h, d = base.height, base.degree
    total = FormalSeries.zero(base.rank, h, d)
    last_changed: dict[tuple[int, ...], int] = {}
    shell_acc = FormalSeries.zero(base.rank, h, d)
    current = 0
    for w, series in _inversion_products(wtable, L, h, d):
        if w.length != current:
            if shell_acc.coeffs:
                delta = shell_acc * base
                for mu in delta.coeffs:
                    last_changed[mu] = current
                total = total + delta
            shell_acc = FormalSeries.zero(base.rank, h, d)
            current = w.length
        shell_acc = shell_acc + series
    if shell_acc.coeffs:
        delta = shell_acc * base
        for mu in delta.coeffs:
            last_changed[mu] = current
        total = total + delta
    stable: dict[int, bool] = {}
    for hh in range(h + 1):
        worst = max(
            (k for mu, k in last_changed.items() if sum(mu) == hh),
            default=0,
        )
        stable[hh] = worst <= L - 2
    return WeylSumResult(total, last_changed, stable, L)


@dataclass(frozen=True)
class CorrectionFactor:
    """The correction factor ``m`` and its inverse, with the sum they came from."""

    m: FormalSeries
    m_inv: FormalSeries
    sum_result: WeylSumResult
    poincare_coefficients: tuple[int, ...]

    def __iter__(self):
        return iter((self.m, self.m_inv))


def correction_factor(
    gcm: GCM,
    height: int,
    degree: int,
    length_bound: int,
    *,
    tables: tuple[RootTable, WeylTable] | None = None,
    cap: int = 200_000,
) -> CorrectionFactor:
    """Series ``m`` with ``m * (group sum) = W(t)``, plus its inverse.

    ``m`` is the truncated Poincare series times the inverse of the
    stabilized group sum; requires every coefficient of the sum to have
    stabilized within the length bound, and the group enumerated at
    least to the degree truncation.
    """
    need = max(length_bound, degree)
    if tables is None:
        roots, wtable = build_tables(gcm, need, cap=cap)
    else:
        roots, wtable = tables
        if wtable.length_bound < need and not wtable.closed:
            raise LengthBoundTooSmall(
                f"supplied table covers length {wtable.length_bound}, need {need}"
            )
    base = delta_ratio(gcm, height, degree, cap=cap)
    result = weyl_sum(wtable, base, min(length_bound, wtable.length_bound))
    if not result.all_stable:
        mu = result.first_unstable()
        raise NotStabilized(mu if mu is not None else (0,) * gcm.size, length_bound)
    pc = poincare(wtable)
    if not pc.exact and len(pc.coefficients) <= degree:
        raise LengthBoundTooSmall(
            f"need Poincare coefficients to degree {degree}, have "
            f"{len(pc.coefficients) - 1}"
        )
    wt = FormalSeries.from_tpoly(pc.truncated(degree), gcm.size, height, degree)
    m = wt * result.series.inverse()
    m_inv = result.series * wt.inverse()
    return CorrectionFactor(m, m_inv, result, pc.truncated(degree))


@dataclass(frozen=True)
class MacdonaldCheck:
    """Outcome of the finite-type product identity check."""

    passed: bool
    poincare_coefficients: tuple[int, ...]
    discrepancy: tuple[tuple[int, ...], Poly, Poly] | None
    subset: frozenset[int]


def macdonald_identity_check(
    gcm: GCM,
    subset,
    height: int,
    degree: int,
    *,
    cap: int = 200_000,
) -> MacdonaldCheck:
    """Verify the finite-type identity for a finite parabolic subgroup.

    The inversion-product sum over the subgroup times the ratio product
    over the subsystem's positive roots must equal the subgroup's
    Poincare polynomial exactly: every non-constant exponent cancels.
    Reports the first discrepancy when it does not.
    """
    fz = frozenset(subset)
    for i in fz:
        gcm.check_index(i)
    if not is_w_finite(gcm, fz):
        raise NotWFinite(f"subset {sorted(fz)} generates an infinite group")
    bound = 8
    while True:
        roots, wtable = build_tables(gcm, bound, gens=fz, cap=cap)
        if wtable.closed:
            break
        bound *= 2
        if bound > 4096:
            raise LengthBoundTooSmall("parabolic enumeration failed to close")
    rank = gcm.size
    total = FormalSeries.zero(rank, height, degree)
    for _, series in _inversion_products(wtable, wtable.length_bound, height, degree):
        total = total + series
    sub_entries = tuple(
        e for e in coroot_slice(gcm, height, cap=cap)
        if all(e.m[j] == 0 for j in range(rank) if j not in fz)
    )
    lhs = total * delta_ratio(gcm, height, degree, entries=sub_entries)
    counts = wtable.counts
    expected = FormalSeries.from_tpoly(counts, rank, height, degree)
    if lhs == expected:
        return MacdonaldCheck(True, counts, None, fz)
    diff = lhs - expected
    mu = min(diff.coeffs, key=lambda mu: (sum(mu), mu))
    got = lhs.coeffs.get(mu, ())
    want = expected.coeffs.get(mu, ())
    return MacdonaldCheck(False, counts, (mu, got, want), fz)
