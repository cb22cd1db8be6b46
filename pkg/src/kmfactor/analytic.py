"""Numeric evaluation of the correction-factor function on the Tits cone.

Points enter only through their pairings against the simple coroots:
``z[i]`` is the (complex) pairing of the point against the i-th simple
coroot, so a root with coroot coordinates ``m`` contributes the
exponential ``q_b = exp(2 pi i sum m_i z_i)``.  The imaginary parts of
``z`` locate the point inside the cone; classification reduces them into
the closed dominant chamber and reads the facet off the zero pattern.

Chart evaluation (``eval_c_x``) uses the coset-transported sum

    W_X(t) * sum over minimal coset representatives w of
    prod over roots b outside the subsystem of
    (1 - t q(w b_vee)) / (1 - q(w b_vee)),

which agrees with the chamber formula on the interior and stays finite
on the subset's walls; individual transported factors can still hit a
removable pole at non-generic real parts, which is handled by
extrapolating chamber-ward shifts (the function is holomorphic there).
"""

from __future__ import annotations

import cmath
import enum
import math
import random
from dataclasses import dataclass, field, replace

from .cartan import GCM, is_w_finite
from .errors import (
    DenominatorNearZero,
    DimensionMismatch,
    DomainError,
    InsufficientData,
    NotWFinite,
    OutsideOmega,
    TBeyondRadius,
)
from .roots import RootEntry, coroot_slice
from .weyl import (
    build_tables,
    estimate_radius,
    minimal_coset_reps,
    poincare,
)

TWO_PI = 2.0 * math.pi


class _PoleNearby(Exception):
    """Internal: a transported factor came too close to a removable pole."""


@dataclass(frozen=True)
class SpectralPoint:
    """A parameter pair: complex ``t`` plus coweight coordinates ``z``."""

    t: complex
    z: tuple[complex, ...]

    def q(self, entry: RootEntry) -> complex:
        return cmath.exp(2j * math.pi * entry.pairing(self.z))

    def q_magnitude(self, entry: RootEntry) -> float:
        return math.exp(-TWO_PI * sum(m * v.imag for m, v in zip(entry.m, self.z)))


class FacetStatus(enum.Enum):
    INTERIOR = "interior"
    NOT_INTERIOR_INFINITE_STABILIZER = "not-interior-infinite-stabilizer"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class FacetDescriptor:
    """Chamber reduction outcome for an imaginary-part vector.

    ``word`` maps the dominant representative back to the input:
    applying the word (rightmost letter acting first) to
    ``representative`` reproduces the input pairings.  ``subset`` is the
    set of indices where the representative vanishes (within tolerance).
    """

    word: tuple[int, ...]
    subset: frozenset[int]
    representative: tuple[float, ...]
    status: FacetStatus
    iterations: int


def reflect_pairings(gcm: GCM, i: int, p):
    """Simple reflection on pairing vectors: ``p[j] -= A[j][i] * p[i]``.

    Works on real or complex coordinates.
    """
    gcm.check_index(i)
    pi = p[i]
    return tuple(pj - gcm.matrix[j][i] * pi for j, pj in enumerate(p))


def apply_word(gcm: GCM, word, p):
    """Act by the group element spelled by ``word`` on pairing coordinates.

    The rightmost letter acts first, matching left-to-right composition
    of reflections.
    """
    for i in reversed(tuple(word)):
        p = reflect_pairings(gcm, i, p)
    return p


def classify(
    gcm: GCM,
    pairings,
    tol: float = 1e-9,
    max_iter: int = 10_000,
) -> FacetDescriptor:
    """Reduce pairings into the closed dominant chamber and read the facet.

    Repeatedly reflects at the smallest index with a pairing below
    ``-tol``.  On termination the zero set (within ``tol``) names the
    facet; the facet is interior to the Tits cone exactly when its
    stabilizer subgroup is finite.  Points outside the cone never become
    dominant and come back UNRESOLVED after ``max_iter`` reflections.
    """
    if len(pairings) != gcm.size:
        raise DimensionMismatch(
            f"expected {gcm.size} pairings, got {len(pairings)}"
        )
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    p = tuple(float(v) for v in pairings)
    picks: list[int] = []
    steps = 0
    while True:
        i = next((k for k, v in enumerate(p) if v < -tol), None)
        if i is None:
            break
        if steps >= max_iter:
            return FacetDescriptor(tuple(picks), frozenset(), p,
                                   FacetStatus.UNRESOLVED, steps)
        p = reflect_pairings(gcm, i, p)
        picks.append(i)
        steps += 1
    subset = frozenset(k for k, v in enumerate(p) if abs(v) <= tol)
    status = (
        FacetStatus.INTERIOR
        if is_w_finite(gcm, subset)
        else FacetStatus.NOT_INTERIOR_INFINITE_STABILIZER
    )
    return FacetDescriptor(tuple(picks), subset, p, status, steps)


def reduce_to_dominant(
    gcm: GCM,
    z,
    tol: float = 1e-9,
    max_iter: int = 10_000,
) -> tuple[tuple[complex, ...], FacetDescriptor]:
    """Classify the imaginary parts and transport the full complex point.

    Returns the transported point (its imaginary parts equal the
    descriptor's representative) together with the descriptor.
    """
    z = tuple(complex(v) for v in z)
    desc = classify(gcm, tuple(v.imag for v in z), tol=tol, max_iter=max_iter)
    zr = z
    for i in desc.word:  # reduction applies the picks chronologically
        zr = reflect_pairings(gcm, i, zr)
    return zr, desc


def _extrapolate_to_zero(xs, ys):
    """Neville polynomial extrapolation of ``ys`` at the points ``xs`` to 0."""
    vals = list(ys)
    n = len(vals)
    for level in range(1, n):
        for k in range(n - level):
            x0, x1 = xs[k], xs[k + level]
            vals[k] = (x1 * vals[k] - x0 * vals[k + 1]) / (x1 - x0)
    return vals[0]


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-evaluation convergence diagnostics.

    ``shell_values`` are cumulative values after each length shell.  The
    sum tail is the geometric envelope ``constant * ratio^(L+1) / (1 -
    ratio)`` built from the exceptional-set decomposition; the product
    tail extrapolates the observed per-height magnitudes beyond the
    truncation.  Both are explicitly computed estimates and may be loose.
    """

    shell_values: tuple[complex, ...]
    product_tail: float
    sum_tail: float
    tail_constant: float
    r1: float
    exceptional_count: int
    exceptional_max: float
    tail_estimate: float
    tail_target: float | None
    tail_ok: bool
    min_denominator: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class EvalOutcome:
    value: complex
    report: ConvergenceReport


@dataclass(frozen=True)
class InvarianceResult:
    """Deviations of evaluations at word-transformed points."""

    base_value: complex
    max_deviation: float
    entries: tuple[tuple[tuple[int, ...], complex | None, str | None], ...]


@dataclass(frozen=True)
class AtlasOutcome:
    """Chart dispatch result with cross-chart agreement evidence."""

    chart: frozenset[int]
    outcome: EvalOutcome
    descriptor: FacetDescriptor
    cross_values: dict[frozenset, complex] = field(default_factory=dict)
    max_cross_deviation: float = 0.0
    cross_ok: bool = True


class _Parabolic:
    """Cached per-subset data used by the chart evaluators."""

    def __init__(self, evaluator: "Evaluator", subset: frozenset[int]):
        ev = evaluator
        self.subset = subset
        self.poly = poincare(ev.weyl, subset).coefficients
        self.reps = minimal_coset_reps(ev.weyl, subset)
        self.rep_counts: dict[int, int] = {}
        for w in self.reps:
            self.rep_counts[w.length] = self.rep_counts.get(w.length, 0) + 1
        self.product_entries = tuple(
            e for e in ev.product_entries if not self._in_subsystem(e)
        )
        self.tail_entries = tuple(
            e for e in ev.tail_entries if not self._in_subsystem(e)
        )

    def _in_subsystem(self, e: RootEntry) -> bool:
        return all(v == 0 for j, v in enumerate(e.m) if j not in self.subset)

    def poly_value(self, t: complex) -> complex:
        acc = 0j
        for c in reversed(self.poly):
            acc = acc * t + c
        return acc


class Evaluator:
    """Bundles the tables needed to evaluate the function numerically.

    ``height`` truncates root products by coroot height, ``max_length``
    truncates group sums by word length.  Construction enumerates the
    roots (with a diagnostic margin of extra height shells), the group,
    and the radius estimate; all evaluation methods are pure afterwards.
    """

    def __init__(
        self,
        gcm: GCM,
        *,
        height: int = 40,
        max_length: int = 20,
        tol: float = 1e-9,
        radius_margin: float = 0.02,
        denominator_guard: float = 1e-12,
        pole_guard: float = 1e-6,
        tail_shells: int = 8,
        max_iter: int = 10_000,
        cap: int = 200_000,
    ):
        self.gcm = gcm
        self.height = height
        self.max_length = max_length
        self.tol = tol
        self.radius_margin = radius_margin
        self.denominator_guard = denominator_guard
        self.pole_guard = pole_guard
        self.max_iter = max_iter
        slice_ext = coroot_slice(gcm, height + tail_shells, cap=cap)
        self.product_entries = tuple(e for e in slice_ext if e.coheight <= height)
        self.tail_entries = tuple(e for e in slice_ext if e.coheight > height)
        self.roots, self.weyl = build_tables(gcm, max_length, cap=cap)
        self.poincare = poincare(self.weyl)
        if self.poincare.exact:
            self.radius = math.inf
        else:
            try:
                self.radius = estimate_radius(self.poincare)
            except InsufficientData:
                raise InsufficientData(
                    "max_length too small to estimate the radius for an "
                    "infinite group; use max_length >= 8"
                )
        self._pcache: dict[frozenset, _Parabolic] = {}

    # -- plumbing -------------------------------------------------------

    def shuffled(self, rng: random.Random) -> "Evaluator":
        """Clone with the product entries in a shuffled order.

        Absolute convergence makes the value order-independent up to
        float rounding; this exists so tests can check exactly that.
        """
        clone = object.__new__(Evaluator)
        clone.__dict__.update(self.__dict__)
        entries = list(self.product_entries)
        rng.shuffle(entries)
        clone.product_entries = tuple(entries)
        clone._pcache = {}
        return clone

    def _parabolic(self, subset: frozenset[int]) -> _Parabolic:
        if subset not in self._pcache:
            self._pcache[subset] = _Parabolic(self, subset)
        return self._pcache[subset]

    def _check_t(self, t: complex) -> None:
        if self.radius != math.inf and abs(t) >= self.radius - self.radius_margin:
            raise TBeyondRadius(
                f"|t| = {abs(t):.6g} not below estimated radius "
                f"{self.radius:.6g} minus margin {self.radius_margin}"
            )

    def _point(self, t, z) -> tuple[complex, tuple[complex, ...]]:
        z = tuple(complex(v) for v in z)
        if len(z) != self.gcm.size:
            raise DimensionMismatch(
                f"expected {self.gcm.size} coordinates, got {len(z)}"
            )
        return complex(t), z

    # -- stable elementary factors ---------------------------------------

    def _ratio(self, t: complex, u: complex, abort_below: float = 0.0):
        """``(1 - t q)/(1 - q)`` for ``q = exp(2 pi i u)``, overflow-safe."""
        if u.imag >= 0:
            q = cmath.exp(2j * math.pi * u)
            denom = 1 - q
            num = 1 - t * q
        else:
            iq = cmath.exp(-2j * math.pi * u)  # 1/q, magnitude < 1
            denom = iq - 1
            num = iq - t
        mag = abs(denom)
        if mag < abort_below:
            raise _PoleNearby()
        if mag < self.denominator_guard:
            raise DenominatorNearZero(
                f"|1 - q| = {mag:.3e} below guard {self.denominator_guard}"
            )
        return num / denom, mag

    def _twist(self, t: complex, u: complex):
        """``(t - q)/(1 - t q)`` for ``q = exp(2 pi i u)``, overflow-safe."""
        if u.imag >= 0:
            q = cmath.exp(2j * math.pi * u)
            denom = 1 - t * q
            value = (t - q) / denom
        else:
            iq = cmath.exp(-2j * math.pi * u)
            denom = iq - t
            value = (t * iq - 1) / denom
        mag = abs(denom)
        if mag < self.denominator_guard:
            raise DenominatorNearZero(
                f"|1 - t q| = {mag:.3e} below guard {self.denominator_guard}"
            )
        return value, mag

    # -- tail envelopes ----------------------------------------------------

    def _sum_tail(
        self,
        t: complex,
        length_counts: dict[int, int],
        qmags: list[float],
        qvals: list[complex],
        max_q_beyond: float,
        enumeration_complete: bool,
        L: int,
    ) -> tuple[float, float, float, int, float, list[str]]:
        """Geometric envelope for the terms beyond the length bound.

        Splits factors into an exceptional set (|q| too large to be
        contracted below the comparison ratio) and the rest; beyond the
        exceptional set every term is squeezed under ``ratio^length``
        with length counts extrapolated at the estimated growth rate.
        """
        flags: list[str] = []
        if enumeration_complete:
            return 0.0, 0.0, 0.0, 0, 1.0, flags
        r_est = self.radius
        r1 = min(0.999, (abs(t) + r_est) / 2.0)
        c_thr = (r1 - abs(t)) / (1.0 + r1 * abs(t))
        exceptional = [
            (m, v) for m, v in zip(qmags, qvals) if m >= c_thr
        ]
        a_max = 1.0
        for _, q in exceptional:
            a_max = max(a_max, abs((t - q) / (1 - t * q)))
        if max_q_beyond >= c_thr:
            flags.append("exceptional-set-may-extend-beyond-height-bound")
        growth = 1.0 / r_est
        ratio = growth * r1
        if ratio >= 1.0:
            flags.append("sum-envelope-ratio-not-contracting")
            return math.inf, r1, a_max, len(exceptional), math.inf, flags
        k_const = 0.0
        for length, count in length_counts.items():
            if count:
                k_const = max(k_const, count / growth ** length)
        s_count = len(exceptional)
        constant = k_const * (a_max ** s_count) / (r1 ** s_count) if s_count else k_const
        tail = constant * ratio ** (L + 1) / (1.0 - ratio)
        return tail, r1, a_max, s_count, constant, flags

    def _product_tail(self, t: complex, z_red, tail_entries) -> tuple[float, float]:
        """Extrapolated effect of roots beyond the height cut.

        Returns the relative tail estimate together with the largest
        observed magnitude beyond the cut (used to flag an exceptional
        set that might extend past the truncation).
        """
        shells: dict[int, float] = {}
        max_q = 0.0
        for e in tail_entries:
            m = math.exp(-TWO_PI * sum(mi * zi.imag for mi, zi in zip(e.m, z_red)))
            max_q = max(max_q, m)
            shells[e.coheight] = shells.get(e.coheight, 0.0) + m
        if not shells:
            return 0.0, 0.0
        heights = sorted(shells)
        total = sum(shells.values())
        last = shells[heights[-1]]
        prev = shells[heights[-2]] if len(heights) > 1 else last
        rho = min(0.95, last / prev) if prev > 0 else 0.0
        extrapolated = last * rho / (1.0 - rho) if rho > 0 else 0.0
        tail_q = total + extrapolated
        if max_q >= 1.0:
            return math.inf, max_q
        return math.expm1(tail_q * (1.0 + abs(t)) / (1.0 - max_q)), max_q

    def _assemble_report(self, t, zr, shell_values, value, scale,
                         length_counts, qmags, qvals, tail_entries,
                         complete, min_denom, tail_target, extra_flags=()):
        product_tail, max_q_beyond = self._product_tail(t, zr, tail_entries)
        if product_tail != math.inf:
            product_tail *= abs(value)
        sum_tail, r1, a_max, s_count, constant, flags = self._sum_tail(
            t, length_counts, qmags, qvals, max_q_beyond, complete,
            self.max_length
        )
        if sum_tail != math.inf:
            sum_tail *= scale
        tail_estimate = product_tail + sum_tail
        tail_ok = tail_target is None or tail_estimate <= tail_target
        flags = list(extra_flags) + flags
        if not tail_ok:
            flags.append("tail-target-not-met")
        return ConvergenceReport(
            shell_values=tuple(shell_values),
            product_tail=product_tail,
            sum_tail=sum_tail,
            tail_constant=constant,
            r1=r1,
            exceptional_count=s_count,
            exceptional_max=a_max,
            tail_estimate=tail_estimate,
            tail_target=tail_target,
            tail_ok=tail_ok,
            min_denominator=min_denom,
            flags=tuple(flags),
        )

    # -- evaluators ---------------------------------------------------------

    def eval_c(self, t, z, *, tail_target: float | None = None) -> EvalOutcome:
        """Value at a point whose imaginary part lies in a chamber translate.

        The point is first moved to its dominant representative (the
        function is invariant under that move); the imaginary parts must
        be strictly inside the chamber, walls belong to the chart
        evaluator.
        """
        t, z = self._point(t, z)
        self._check_t(t)
        zr, desc = reduce_to_dominant(self.gcm, z, tol=self.tol, max_iter=self.max_iter)
        if desc.status is not FacetStatus.INTERIOR or desc.subset:
            raise DomainError(
                "imaginary part is not in the interior of a chamber "
                f"(status {desc.status.value}, facet {sorted(desc.subset)})"
            )
        return self._eval_chamber(t, zr, tail_target)

    def _eval_chamber(self, t, zr, tail_target) -> EvalOutcome:
        """Inversion-product sum times the root-ratio product (chamber form)."""
        min_denom = math.inf
        prod = 1.0 + 0j
        qmags: list[float] = []
        qvals: list[complex] = []
        for e in self.product_entries:
            u = e.pairing(zr)
            val, mag = self._ratio(t, u)
            prod *= val
            min_denom = min(min_denom, mag)
            qmags.append(math.exp(-TWO_PI * u.imag))
            qvals.append(cmath.exp(2j * math.pi * u))
        shell_sums: dict[int, complex] = {}
        for w in self.weyl.elements():
            term = 1.0 + 0j
            for idx in w.inversions:
                entry = self.roots[idx]
                val, mag = self._twist(t, entry.pairing(zr))
                term *= val
                min_denom = min(min_denom, mag)
            shell_sums[w.length] = shell_sums.get(w.length, 0j) + term
        partial = 0j
        shell_values = []
        for k in sorted(shell_sums):
            partial += shell_sums[k]
            shell_values.append(partial * prod)
        value = partial * prod
        length_counts = {k: c for k, c in enumerate(self.weyl.counts)}
        report = self._assemble_report(
            t, zr, shell_values, value, abs(prod), length_counts,
            qmags, qvals, self.tail_entries, self.weyl.closed,
            min_denom, tail_target,
        )
        return EvalOutcome(value, report)

    def eval_c_x(self, t, z, subset, *, tail_target: float | None = None) -> EvalOutcome:
        """Continuation-chart value for a finite-stabilizer subset.

        Admissible points reduce to a dominant representative whose zero
        facet is contained in ``subset``; subsystem roots are excluded
        from the product, so the wall poles never enter (the subgroup
        sum is already folded into the Poincare polynomial prefactor).
        The empty subset is the plain chamber evaluator.
        """
        subset = frozenset(subset)
        for i in subset:
            self.gcm.check_index(i)
        if not is_w_finite(self.gcm, subset):
            raise NotWFinite(f"subset {sorted(subset)} generates an infinite group")
        t, z = self._point(t, z)
        self._check_t(t)
        zr, desc = reduce_to_dominant(self.gcm, z, tol=self.tol, max_iter=self.max_iter)
        if desc.status is FacetStatus.UNRESOLVED:
            raise DomainError("imaginary part did not reduce; outside the cone")
        if not desc.subset <= subset:
            raise DomainError(
                f"facet {sorted(desc.subset)} not inside chart subset "
                f"{sorted(subset)}; point outside the chart's star"
            )
        if not subset:
            return self._eval_chamber(t, zr, tail_target)
        return self._eval_star(t, zr, subset, tail_target)

    def _eval_star(self, t, zr, subset: frozenset[int], tail_target) -> EvalOutcome:
        """Chart evaluation with removable-pole fallback.

        Transported factors are generically safe on the chart; at
        non-generic real parts a factor can sit on a removable pole of
        the sum, in which case the value is recovered by polynomial
        extrapolation of chamber-ward shifts (holomorphy in the shift).
        """
        par = self._parabolic(subset)
        try:
            return self._star_direct(t, zr, par, tail_target, self.pole_guard)
        except _PoleNearby:
            pass
        epsilons = (4e-3, 2e-3, 1e-3, 5e-4)
        values = []
        outcome = None
        for eps in epsilons:
            zs = tuple(v + (1j * eps if j in subset else 0.0)
                       for j, v in enumerate(zr))
            outcome = self._star_direct(t, zs, par, tail_target, 0.0)
            values.append(outcome.value)
        value = _extrapolate_to_zero(epsilons, values)
        report = replace(
            outcome.report,
            flags=outcome.report.flags + ("wall-extrapolated",),
        )
        return EvalOutcome(value, report)

    def _star_direct(self, t, zr, par: _Parabolic, tail_target,
                     abort_below: float) -> EvalOutcome:
        prefactor = par.poly_value(t)
        min_denom = math.inf
        qmags: list[float] = []
        qvals: list[complex] = []
        base_scale = 1.0
        shell_sums: dict[int, complex] = {}
        for w in par.reps:
            term = 1.0 + 0j
            identity = w.length == 0
            for e in par.product_entries:
                if identity:
                    u = e.pairing(zr)
                else:
                    mw = w.coroot_action(e.m)
                    u = sum(mi * zi for mi, zi in zip(mw, zr) if mi)
                val, mag = self._ratio(t, u, abort_below)
                term *= val
                min_denom = min(min_denom, mag)
                if identity:
                    qmags.append(math.exp(-TWO_PI * u.imag))
                    qvals.append(cmath.exp(2j * math.pi * u))
            if identity:
                base_scale = abs(term)
            shell_sums[w.length] = shell_sums.get(w.length, 0j) + term
        partial = 0j
        shell_values = []
        for k in sorted(shell_sums):
            partial += shell_sums[k]
            shell_values.append(prefactor * partial)
        value = prefactor * partial
        complete = self.weyl.closed
        report = self._assemble_report(
            t, zr, shell_values, value, abs(prefactor) * base_scale,
            dict(par.rep_counts), qmags, qvals, par.tail_entries,
            complete, min_denom, tail_target,
        )
        return EvalOutcome(value, report)

    def eval_c_sumform(self, t, z, *, tail_target: float | None = None) -> EvalOutcome:
        """Group-sum form: one full root product per element, no reduction.

        Valid at any point whose imaginary part is a chamber translate;
        each term transports the coroots by the element's action matrix.
        Agrees with :meth:`eval_c` within the combined tail tolerances.
        """
        t, z = self._point(t, z)
        self._check_t(t)
        desc = classify(self.gcm, tuple(v.imag for v in z), tol=self.tol,
                        max_iter=self.max_iter)
        if desc.status is not FacetStatus.INTERIOR or desc.subset:
            raise DomainError(
                "imaginary part is not in the interior of a chamber "
                f"(status {desc.status.value}, facet {sorted(desc.subset)})"
            )
        min_denom = math.inf
        base_scale = 1.0
        shell_sums: dict[int, complex] = {}
        for w in self.weyl.elements():
            term = 1.0 + 0j
            for e in self.product_entries:
                mw = w.coroot_action(e.m)
                u = sum(mi * zi for mi, zi in zip(mw, z) if mi)
                val, mag = self._ratio(t, u)
                term *= val
                min_denom = min(min_denom, mag)
            if w.length == 0:
                base_scale = abs(term)
            shell_sums[w.length] = shell_sums.get(w.length, 0j) + term
        partial = 0j
        shell_values = []
        for k in sorted(shell_sums):
            partial += shell_sums[k]
            shell_values.append(partial)
        value = partial

        # diagnostics relative to the dominant representative
        zr, _ = reduce_to_dominant(self.gcm, z, tol=self.tol, max_iter=self.max_iter)
        qmags = [math.exp(-TWO_PI * e.pairing(zr).imag) for e in self.product_entries]
        qvals = [cmath.exp(2j * math.pi * e.pairing(zr)) for e in self.product_entries]
        length_counts = {k: c for k, c in enumerate(self.weyl.counts)}
        report = self._assemble_report(
            t, zr, shell_values, value, base_scale, length_counts,
            qmags, qvals, self.tail_entries, self.weyl.closed,
            min_denom, tail_target,
        )
        return EvalOutcome(value, report)

    def verify_invariance(self, t, z, subset, words, *,
                          tail_target: float | None = None) -> InvarianceResult:
        """Evaluate at the point and at its word-transforms, compare.

        Per-word domain failures are recorded, not raised; the maximum
        deviation ranges over the successful words.
        """
        subset = frozenset(subset)
        base = self.eval_c_x(t, z, subset, tail_target=tail_target)
        t_, z_ = self._point(t, z)
        entries = []
        max_dev = 0.0
        for word in words:
            word = tuple(word)
            zt = apply_word(self.gcm, word, z_)
            try:
                val = self.eval_c_x(t_, zt, subset, tail_target=tail_target).value
            except (DomainError, DenominatorNearZero) as exc:
                entries.append((word, None, f"{type(exc).__name__}: {exc}"))
                continue
            max_dev = max(max_dev, abs(val - base.value))
            entries.append((word, val, None))
        return InvarianceResult(base.value, max_dev, tuple(entries))

    def continuation_atlas(self, t, z, *, tail_target: float | None = None,
                           chart_tol: float = 1e-6) -> AtlasOutcome:
        """Pick the minimal chart containing the point and evaluate there.

        The chart of a point is the zero facet of its dominant
        representative; every finite-stabilizer superset also covers the
        point, and agreement across those charts is checked and reported.
        """
        t_, z_ = self._point(t, z)
        self._check_t(t_)
        zr, desc = reduce_to_dominant(self.gcm, z_, tol=self.tol,
                                      max_iter=self.max_iter)
        if desc.status is not FacetStatus.INTERIOR:
            raise OutsideOmega(
                f"classification status {desc.status.value}: point not in "
                "the interior of the cone"
            )
        chart = desc.subset
        if chart:
            outcome = self._eval_star(t_, zr, chart, tail_target)
        else:
            outcome = self._eval_chamber(t_, zr, tail_target)
        cross: dict[frozenset, complex] = {}
        max_dev = 0.0
        for extra in _proper_extensions(self.gcm.size, chart):
            sub = frozenset(chart | extra)
            if not is_w_finite(self.gcm, sub):
                continue
            val = self._eval_star(t_, zr, sub, tail_target).value
            cross[sub] = val
            max_dev = max(max_dev, abs(val - outcome.value))
        return AtlasOutcome(chart, outcome, desc, cross, max_dev,
                            max_dev <= chart_tol)


def _proper_extensions(size: int, subset: frozenset[int]):
    """All non-empty subsets of the complement, smallest first."""
    rest = sorted(set(range(size)) - subset)
    out = []
    for mask in range(1, 1 << len(rest)):
        out.append(frozenset(rest[k] for k in range(len(rest)) if mask >> k & 1))
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out
