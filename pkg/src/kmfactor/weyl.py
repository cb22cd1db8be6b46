"""Weyl group enumeration, Poincare series, and coset machinery.

Elements are identified by their integer action matrix on coroot
coordinate vectors, which is faithful because the simple coroots are
linearly independent.  Enumeration goes breadth-first by length through
right extensions ``w -> w s_i``; a length-increasing right extension
adds the single root ``w(a_i)`` to the inversion set, so inversion sets
grow incrementally and every element remembers which root its last
extension added (downstream series code exploits that chain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cartan import GCM, is_w_finite
from .errors import (
    CapacityExceeded,
    InsufficientData,
    LengthBoundTooSmall,
    RootTableTooShallow,
)
from .roots import RootTable, enumerate_roots

Matrix = tuple[tuple[int, ...], ...]


def _identity(l: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(l)) for i in range(l))


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    l = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(l)) for j in range(l))
        for i in range(l)
    )


def _mat_vec(a: Matrix, v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def coroot_reflection_matrix(gcm: GCM, i: int) -> Matrix:
    """Matrix of ``s_i`` acting on coroot coordinate vectors."""
    gcm.check_index(i)
    l = gcm.size
    return tuple(
        tuple(
            (1 if r == c else 0) - (gcm.matrix[c][i] if r == i else 0)
            for c in range(l)
        )
        for r in range(l)
    )


def root_reflection_matrix(gcm: GCM, i: int) -> Matrix:
    """Matrix of ``s_i`` acting on root coordinate vectors."""
    gcm.check_index(i)
    l = gcm.size
    return tuple(
        tuple(
            (1 if r == c else 0) - (gcm.matrix[i][c] if r == i else 0)
            for c in range(l)
        )
        for r in range(l)
    )


@dataclass(frozen=True)
class WeylElement:
    """A group element with its reduced word and inversion data.

    ``word`` multiplies left to right (``word[0]`` is the outermost
    reflection acting on points).  ``matrix`` acts on coroot coordinate
    vectors; ``root_matrix`` on root coordinate vectors.  ``inversions``
    holds sorted indices into the owning root table; its size equals
    ``length``.  ``added`` is the inversion index contributed by the last
    right extension (None for the identity or when inversion tracking is
    off).
    """

    word: tuple[int, ...]
    length: int
    matrix: Matrix
    root_matrix: Matrix
    inversions: tuple[int, ...]
    added: int | None = None

    def coroot_action(self, m: tuple[int, ...]) -> tuple[int, ...]:
        return _mat_vec(self.matrix, m)


class WeylTable:
    """Elements of length at most a bound, grouped into length shells."""

    def __init__(
        self,
        gcm: GCM,
        roots: RootTable | None,
        length_bound: int,
        shells: tuple[tuple[WeylElement, ...], ...],
        by_matrix: dict,
        closed: bool,
        gens: tuple[int, ...],
    ):
        self.gcm = gcm
        self.roots = roots
        self.length_bound = length_bound
        self.shells = shells
        self.by_matrix = by_matrix
        self.closed = closed
        self.gens = gens

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.shells)

    def elements(self):
        for shell in self.shells:
            yield from shell

    def shell(self, k: int) -> tuple[WeylElement, ...]:
        """Elements of length exactly k (empty beyond closure)."""
        return self.shells[k] if k < len(self.shells) else ()

    def element(self, matrix: Matrix) -> WeylElement | None:
        return self.by_matrix.get(matrix)

    def __len__(self) -> int:
        return sum(len(s) for s in self.shells)


def enumerate_weyl(
    gcm: GCM,
    length_bound: int,
    roots: RootTable | None = None,
    *,
    gens=None,
    cap: int = 200_000,
) -> WeylTable:
    """Breadth-first enumeration by length with dedup on action matrices.

    When ``roots`` is given, inversion sets are tracked as indices into
    it; a root escaping the table raises RootTableTooShallow.  With
    ``roots=None`` only words, lengths and matrices are built (enough for
    counting).  ``gens`` restricts to a parabolic subgroup.
    """
    if length_bound < 0:
        raise ValueError("length bound must be >= 0")
    l = gcm.size
    gens = tuple(range(l)) if gens is None else tuple(sorted(set(gens)))
    for i in gens:
        gcm.check_index(i)
    if roots is not None and roots.gcm.matrix != gcm.matrix:
        raise ValueError("root table belongs to a different matrix")

    smat = {i: coroot_reflection_matrix(gcm, i) for i in gens}
    rmat = {i: root_reflection_matrix(gcm, i) for i in gens}
    identity = WeylElement((), 0, _identity(l), _identity(l), ())
    by_matrix: dict[Matrix, WeylElement] = {identity.matrix: identity}
    shells: list[tuple[WeylElement, ...]] = [(identity,)]
    closed = False
    for k in range(length_bound):
        nxt: list[WeylElement] = []
        for w in shells[k]:
            for i in gens:
                mat = _mat_mul(w.matrix, smat[i])
                if mat in by_matrix:
                    continue
                if len(by_matrix) >= cap:
                    raise CapacityExceeded(
                        f"Weyl table would exceed cap of {cap} elements"
                    )
                root_mat = _mat_mul(w.root_matrix, rmat[i])
                added: int | None = None
                inversions: tuple[int, ...] = ()
                if roots is not None:
                    # length-increasing extension adds the root w(a_i)
                    wa = tuple(row[i] for row in w.root_matrix)
                    entry = roots.find(wa)
                    if entry is None:
                        raise RootTableTooShallow(
                            f"inversion root of height {sum(wa)} exceeds table "
                            f"bound {roots.height_bound}"
                        )
                    added = entry.index
                    inversions = tuple(sorted(w.inversions + (added,)))
                el = WeylElement(w.word + (i,), k + 1, mat, root_mat, inversions, added)
                by_matrix[mat] = el
                nxt.append(el)
        if not nxt:
            closed = True
            break
        shells.append(tuple(nxt))
    return WeylTable(gcm, roots, length_bound, tuple(shells), by_matrix, closed, gens)


def build_tables(
    gcm: GCM,
    length_bound: int,
    *,
    gens=None,
    start_height: int | None = None,
    cap: int = 200_000,
) -> tuple[RootTable, WeylTable]:
    """Root table plus Weyl table, deepening the roots until they fit.

    Inversion-root heights grow with word length at a rate that depends
    on the matrix (exponentially for indefinite type), so the required
    root height bound is found by geometric retry rather than guessed.
    """
    height = start_height if start_height is not None else max(4, 2 * length_bound)
    for _ in range(200):
        roots = enumerate_roots(gcm, height, cap=cap)
        try:
            weyl = enumerate_weyl(gcm, length_bound, roots, gens=gens, cap=cap)
        except RootTableTooShallow:
            height *= 8
            continue
        return roots, weyl
    raise RootTableTooShallow(
        f"no root table up to height {height} covered length {length_bound}"
    )


@dataclass(frozen=True)
class PoincareSeries:
    """Length generating coefficients ``c_k = #{w : length k}``.

    ``exact`` means the group was fully enumerated, so the coefficient
    list is the complete polynomial.
    """

    coefficients: tuple[int, ...]
    exact: bool

    def truncated(self, degree: int) -> tuple[int, ...]:
        c = self.coefficients[: degree + 1]
        return c + (0,) * (degree + 1 - len(c))

    def evaluate(self, t: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc


def poincare(table: WeylTable, subset=None, *, cap: int = 200_000) -> PoincareSeries:
    """Poincare coefficients of the table's group or of a parabolic.

    For a subset whose group is finite the full polynomial is returned
    (exact); if enumeration does not close within the table's length
    bound for such a subset, LengthBoundTooSmall is raised.
    """
    if subset is None:
        return PoincareSeries(table.counts, table.closed)
    fz = frozenset(subset)
    for i in fz:
        table.gcm.check_index(i)
    sub = enumerate_weyl(table.gcm, table.length_bound, None, gens=fz, cap=cap)
    if not sub.closed and is_w_finite(table.gcm, fz):
        raise LengthBoundTooSmall(
            f"finite parabolic {sorted(fz)} did not close within length "
            f"{table.length_bound}"
        )
    return PoincareSeries(sub.counts, sub.closed)


def minimal_coset_reps(table: WeylTable, subset) -> tuple[WeylElement, ...]:
    """Enumerated elements that are shortest in their coset of ``W_subset``.

    The filter is the defining one: every right multiplication by a
    generator from the subset increases length.  An absent product
    matrix means its length exceeds the bound, which also counts as
    increasing.
    """
    fz = frozenset(subset)
    for i in fz:
        table.gcm.check_index(i)
    mats = {i: coroot_reflection_matrix(table.gcm, i) for i in fz}
    out = []
    for w in table.elements():
        ok = True
        for i in fz:
            other = table.element(_mat_mul(w.matrix, mats[i]))
            if other is not None and other.length < w.length:
                ok = False
                break
        if ok:
            out.append(w)
    return tuple(sorted(out, key=lambda w: (w.length, w.word)))


def estimate_radius(series: PoincareSeries) -> float:
    """Radius-of-convergence estimate for the length generating series.

    Reciprocal of the geometric mean of ``c_k ** (1/k)`` over the top
    half of the available coefficients; finite groups (polynomial
    series) report ``inf``.  Needs at least 8 coefficients.
    """
    c = series.coefficients
    if series.exact:
        return math.inf
    if len(c) < 8:
        raise InsufficientData("need at least 8 coefficients")
    top = len(c) - 1
    window = range(max(1, (top + 1) // 2), top + 1)
    vals = []
    for k in window:
        if c[k] == 0:
            return math.inf  # eventually-zero coefficients: polynomial
        vals.append(math.log(c[k]) / k)
    return math.exp(-sum(vals) / len(vals))
