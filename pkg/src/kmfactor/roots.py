"""Enumeration of positive real roots with transported coroots.

Roots are stored as coordinate vectors over the simple roots, coroots as
coordinate vectors over the simple coroots.  Reflections act on both at
once, so the root/coroot bijection is carried along for free; the
pairing identity ``<b, b_vee> = 2`` holds for every table entry and is
cheap to re-check (``m . (A n) == 2``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .cartan import GCM, dual, is_w_finite
from .errors import CapacityExceeded, DimensionMismatch, NotWFinite


@dataclass(frozen=True)
class RootEntry:
    """One positive real root together with its coroot.

    ``n``: coefficients over the simple roots; ``m``: coefficients of the
    coroot over the simple coroots; ``height = sum(n)``;
    ``coheight = sum(m)``; ``index``: stable position in the owning table.
    """

    n: tuple[int, ...]
    m: tuple[int, ...]
    height: int
    coheight: int
    index: int

    def support(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.n) if v)

    def pairing(self, z):
        """Value of the coroot on a point given by coordinates ``z``.

        ``z[i]`` is the pairing of the point against the i-th simple
        coroot; entries may be real or complex.
        """
        if len(z) != len(self.m):
            raise DimensionMismatch(
                f"expected {len(self.m)} coordinates, got {len(z)}"
            )
        return sum(mi * zi for mi, zi in zip(self.m, z) if mi)


def reflect_root(gcm: GCM, i: int, n: tuple[int, ...]) -> tuple[int, ...]:
    """Simple reflection ``s_i`` on root coordinate vectors."""
    a = gcm.matrix
    s = sum(a[i][j] * n[j] for j in range(len(n)) if n[j])
    out = list(n)
    out[i] -= s
    return tuple(out)


def reflect_coroot(gcm: GCM, i: int, m: tuple[int, ...]) -> tuple[int, ...]:
    """Simple reflection ``s_i`` on coroot coordinate vectors."""
    a = gcm.matrix
    s = sum(a[j][i] * m[j] for j in range(len(m)) if m[j])
    out = list(m)
    out[i] -= s
    return tuple(out)


class RootTable:
    """All positive real roots up to a height bound, in a fixed order.

    Entries are sorted by (height, root coordinates); the table is
    immutable after construction and safe to share.
    """

    def __init__(self, gcm: GCM, height_bound: int, entries: tuple[RootEntry, ...]):
        self.gcm = gcm
        self.height_bound = height_bound
        self.entries = entries
        self._by_n = {e.n: e for e in entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> RootEntry:
        return self.entries[i]

    def find(self, n: tuple[int, ...]) -> RootEntry | None:
        """Entry with the given root coordinates, or None."""
        return self._by_n.get(tuple(n))

    def simple(self, i: int) -> RootEntry:
        self.gcm.check_index(i)
        e = self.find(tuple(1 if j == i else 0 for j in range(self.gcm.size)))
        assert e is not None, "height bound >= 1 guarantees simple roots"
        return e

    def counts_by_height(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e in self.entries:
            out[e.height] = out.get(e.height, 0) + 1
        return out


def enumerate_roots(
    gcm: GCM,
    height_bound: int,
    *,
    cap: int = 200_000,
    queue_discipline: str = "fifo",
) -> RootTable:
    """Breadth-first closure of the simple roots under simple reflections.

    Keeps every positive real root of height at most ``height_bound``.
    The resulting set is independent of the traversal order;
    ``queue_discipline`` ("fifo" or "lifo") exists so tests can check
    exactly that.  Raises CapacityExceeded when more than ``cap`` roots
    would be stored.
    """
    if height_bound < 1:
        raise ValueError("height bound must be >= 1")
    if queue_discipline not in ("fifo", "lifo"):
        raise ValueError("queue_discipline must be 'fifo' or 'lifo'")
    l = gcm.size
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    work: deque = deque()
    for i in range(l):
        # the coroot of a simple root is the matching simple coroot
        n = tuple(1 if j == i else 0 for j in range(l))
        seen[n] = n
        work.append((n, n))
    while work:
        n, m = work.popleft() if queue_discipline == "fifo" else work.pop()
        for i in range(l):
            n2 = reflect_root(gcm, i, n)
            if any(v < 0 for v in n2):
                continue  # only -a_i arises here; stay in the positive cone
            if sum(n2) > height_bound or n2 in seen:
                continue
            m2 = reflect_coroot(gcm, i, m)
            if len(seen) >= cap:
                raise CapacityExceeded(
                    f"root table would exceed cap of {cap} entries"
                )
            seen[n2] = m2
            work.append((n2, m2))
    ordered = sorted(seen.items(), key=lambda nm: (sum(nm[0]), nm[0]))
    entries = tuple(
        RootEntry(n, m, sum(n), sum(m), k) for k, (n, m) in enumerate(ordered)
    )
    return RootTable(gcm, height_bound, entries)


def coroot_slice(gcm: GCM, coheight_bound: int, *, cap: int = 200_000) -> tuple[RootEntry, ...]:
    """All positive real roots whose coroot height is at most the bound.

    Completeness in coroot height cannot be read off a table truncated by
    root height, so this enumerates the dual system (where coroot height
    is root height) and swaps coordinates back.  Entries are sorted by
    (coheight, coroot coordinates) and re-indexed.
    """
    dtable = enumerate_roots(dual(gcm), coheight_bound, cap=cap)
    swapped = sorted(((e.m, e.n) for e in dtable), key=lambda nm: (sum(nm[1]), nm[1]))
    return tuple(
        RootEntry(n, m, sum(n), sum(m), k) for k, (n, m) in enumerate(swapped)
    )


def pairing(entry: RootEntry, z) -> complex:
    """Module-level alias for :meth:`RootEntry.pairing`."""
    return entry.pairing(z)


@dataclass(frozen=True)
class CompletionCount:
    """Result of a parabolic completion count with its saturation evidence."""

    count: int
    saturated: bool
    height_bound: int


def count_parabolic_completions(
    gcm: GCM,
    subset,
    p: tuple[int, ...],
    height_bound: int,
    *,
    cap: int = 200_000,
) -> CompletionCount:
    """Count roots extending fixed off-subset coordinates ``p``.

    ``p`` is indexed by the sorted complement of ``subset``; the count is
    the number of non-negative coordinate choices on ``subset`` making
    the combined vector a positive real root.  The table is enumerated to
    twice ``height_bound``; ``saturated`` reports that doubling the bound
    did not change the count, the working evidence of finiteness.
    """
    fz = frozenset(subset)
    for i in fz:
        gcm.check_index(i)
    if not is_w_finite(gcm, fz):
        raise NotWFinite(f"subset {sorted(fz)} generates an infinite group")
    complement = [j for j in range(gcm.size) if j not in fz]
    if len(p) != len(complement):
        raise DimensionMismatch(
            f"expected {len(complement)} off-subset coordinates, got {len(p)}"
        )
    if any(v < 0 for v in p):
        raise ValueError("off-subset coordinates must be non-negative")
    table = enumerate_roots(gcm, 2 * height_bound, cap=cap)
    fixed = dict(zip(complement, p))
    low = 0
    high = 0
    for e in table:
        if all(e.n[j] == v for j, v in fixed.items()):
            high += 1
            if e.height <= height_bound:
                low += 1
    return CompletionCount(low, low == high, height_bound)
