"""Generalized Cartan matrices, duality, and parabolic finiteness.

Entry convention, fixed package-wide: ``matrix[i][j]`` is the pairing of
the j-th simple root against the i-th simple coroot.  With this
convention the reflection ``s_i`` acts on root coordinate vectors ``n``
by ``n[i] -= sum_j matrix[i][j] * n[j]`` and on coroot coordinate
vectors ``m`` by ``m[i] -= sum_j matrix[j][i] * m[j]``; pairings of a
point against the simple coroots transform by
``p[j] -= matrix[j][i] * p[i]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .errors import AxiomViolation, IndexOutOfRange, InvalidMatrix, NonSquare


@dataclass(frozen=True)
class GCM:
    """A validated generalized Cartan matrix.

    Instances are immutable and hashable; construct them through
    :func:`validate_gcm` or :func:`load_gcm` so the axioms are checked.
    """

    matrix: tuple[tuple[int, ...], ...]
    label: str | None = None

    @property
    def size(self) -> int:
        return len(self.matrix)

    def entry(self, i: int, j: int) -> int:
        """Pairing of simple root j against simple coroot i (0-based)."""
        return self.matrix[i][j]

    def check_index(self, i: int) -> None:
        if not isinstance(i, int) or not 0 <= i < self.size:
            raise IndexOutOfRange(f"index {i} outside 0..{self.size - 1}")

    def __str__(self) -> str:
        name = self.label or "GCM"
        rows = "; ".join(" ".join(str(x) for x in row) for row in self.matrix)
        return f"{name}[{rows}]"


@dataclass(frozen=True)
class ParabolicSubset:
    """An index subset of the simple roots with its cached finiteness flag."""

    gcm: GCM
    indices: frozenset[int]
    finite: bool


def validate_gcm(raw: Sequence[Sequence[int]], label: str | None = None) -> GCM:
    """Validate an integer matrix against the three Cartan-matrix axioms.

    Axioms: diagonal entries equal 2 (R1); off-diagonal entries are
    non-positive (R2); the zero pattern is symmetric (R3).  Axiom errors
    report 1-based entry positions.
    """
    try:
        rows = [list(r) for r in raw]
    except TypeError as exc:
        raise InvalidMatrix("matrix must be a sequence of rows") from exc
    n = len(rows)
    if n == 0:
        raise InvalidMatrix("matrix must have size >= 1")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise NonSquare(f"row {r + 1} has length {len(row)}, expected {n}")
        for c, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidMatrix(f"entry ({r + 1}, {c + 1}) is not an integer")
    for i in range(n):
        if rows[i][i] != 2:
            raise AxiomViolation("R1", i + 1, i + 1, f"diagonal entry is {rows[i][i]}, expected 2")
        for j in range(n):
            if i != j and rows[i][j] > 0:
                raise AxiomViolation("R2", i + 1, j + 1, f"off-diagonal entry {rows[i][j]} is positive")
    for i in range(n):
        for j in range(n):
            if i != j and rows[i][j] == 0 and rows[j][i] != 0:
                raise AxiomViolation(
                    "R3", i + 1, j + 1,
                    f"entry is 0 but entry ({j + 1}, {i + 1}) is {rows[j][i]}",
                )
    return GCM(tuple(tuple(row) for row in rows), label)


def dual(gcm: GCM) -> GCM:
    """The dual matrix (transpose); simple roots and coroots swap roles."""
    n = gcm.size
    t = tuple(tuple(gcm.matrix[j][i] for j in range(n)) for i in range(n))
    return GCM(t, gcm.label)


def load_gcm(source: str | Path | dict) -> GCM:
    """Load a matrix from a JSON object ``{"label": ..., "matrix": [[...]]}``.

    ``source`` may be a path to a JSON file or an already-parsed dict;
    ``label`` is optional.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = source
    if not isinstance(data, dict) or "matrix" not in data:
        raise InvalidMatrix('expected a JSON object with a "matrix" key')
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise InvalidMatrix('"label" must be a string when present')
    return validate_gcm(data["matrix"], label)


def to_json_dict(gcm: GCM) -> dict:
    """Inverse of :func:`load_gcm` for round-tripping through files."""
    out: dict = {"matrix": [list(row) for row in gcm.matrix]}
    if gcm.label is not None:
        out["label"] = gcm.label
    return out


def _int_det(rows: list[list[int]]) -> int:
    """Exact determinant of a small integer matrix (fraction-free Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


@lru_cache(maxsize=None)
def _all_principal_minors_positive(gcm: GCM, indices: frozenset[int]) -> bool:
    idx = sorted(indices)
    for size in range(1, len(idx) + 1):
        for sub in combinations(idx, size):
            block = [[gcm.matrix[i][j] for j in sub] for i in sub]
            if _int_det(block) <= 0:
                return False
    return True


def is_w_finite(gcm: GCM, indices: Iterable[int]) -> bool:
    """Whether the parabolic subgroup generated by ``indices`` is finite.

    Decided by the finite-type criterion: every principal minor of the
    corresponding submatrix is strictly positive.  The empty subset is
    finite (trivial group).
    """
    fz = frozenset(indices)
    for i in fz:
        gcm.check_index(i)
    if not fz:
        return True
    return _all_principal_minors_positive(gcm, fz)


def parabolic(gcm: GCM, indices: Iterable[int]) -> ParabolicSubset:
    """Bundle a subset with its (cached) finiteness flag."""
    fz = frozenset(indices)
    return ParabolicSubset(gcm, fz, is_w_finite(gcm, fz))
