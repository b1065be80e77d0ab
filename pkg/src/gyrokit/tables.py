"""Finite gyrogroups given by Cayley tables.

Everything here is exact integer work: axiom validation, the derived
permutation table, substructure enumeration, coset partitions, products
and the exhaustive small-order search.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass

import numpy as np

from .core import GyrogroupModel
from .errors import (
    AxiomViolationError,
    ResourceLimitError,
    TableFormatError,
    UsageError,
)
from .report import CheckResult, VerificationReport


class CayleyTable:
    """An order-n operation table with element labels.

    Construction checks well-formedness only (shape, index range, label
    uniqueness); the axioms are a separate, exhaustive concern of
    :func:`validate_table`.
    """

    def __init__(self, table, labels=None, name: str | None = None):
        arr = np.asarray(table)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise TableFormatError(f"table must be square and nonempty, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise TableFormatError("table entries must be integers")
        n = arr.shape[0]
        bad = (arr < 0) | (arr >= n)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise TableFormatError(
                f"cell ({i},{j}) value {arr[i, j]} out of range [0,{n})"
            )
        self.order = n
        self.table = arr.astype(np.int64)
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = [str(x) for x in labels]
        if len(labels) != n:
            raise TableFormatError(f"{len(labels)} labels for order {n}")
        if len(set(labels)) != n:
            dup = sorted({x for x in labels if labels.count(x) > 1})[0]
            raise TableFormatError(f"duplicate label {dup!r}")
        self.labels = tuple(labels)
        self.name = name or f"table{n}"

    # -- identity / inverses (discovered, not assumed) --

    def identity_candidates(self):
        n = self.order
        rng = np.arange(n)
        rows = (self.table == rng[None, :]).all(axis=1)
        cols = (self.table == rng[:, None]).all(axis=0)
        return np.flatnonzero(rows & cols)

    @property
    def identity_index(self) -> int:
        cand = self.identity_candidates()
        if len(cand) != 1:
            raise AxiomViolationError(
                f"table has {len(cand)} two-sided identities, expected exactly 1"
            )
        return int(cand[0])

    def inverses(self) -> np.ndarray:
        e = self.identity_index
        n = self.order
        inv = np.full(n, -1)
        for x in range(n):
            ys = np.flatnonzero((self.table[x] == e) & (self.table[:, x] == e))
            if len(ys) != 1:
                raise AxiomViolationError(
                    f"element {self.labels[x]!r} has {len(ys)} two-sided inverses"
                )
            inv[x] = ys[0]
        return inv

    def rows_bijective(self) -> bool:
        srt = np.sort(self.table, axis=1)
        return bool((srt == np.arange(self.order)[None, :]).all())

    def is_associative(self) -> bool:
        T = self.table
        lhs = T[T]  # (x,y),z -> T[T[x,y],z]
        rhs = T[:, T]  # x,(y,z) -> T[x, T[y,z]]
        return bool((lhs == rhs).all())

    # -- serialization --

    def to_dict(self):
        return {
            "order": self.order,
            "elements": list(self.labels),
            "oplus": self.table.tolist(),
        }

    def canonical_dict(self):
        """Same table with the identity re-indexed to position 0."""
        e = self.identity_index
        if e == 0:
            return self.to_dict()
        perm = [e] + [i for i in range(self.order) if i != e]
        return self.relabel(perm).to_dict()

    def relabel(self, perm) -> "CayleyTable":
        """Return the table under new indexing: new index i holds old perm[i]."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.order)
        new = inv[self.table[np.ix_(perm, perm)]]
        return CayleyTable(new, [self.labels[p] for p in perm], name=self.name)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


def load_table(path) -> CayleyTable:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"{path}: not valid JSON ({exc})") from exc
    return table_from_dict(raw, name=_stem(path))


def _stem(path):
    s = str(path)
    s = s.rsplit("/", 1)[-1]
    return s[:-5] if s.endswith(".json") else s


def table_from_dict(raw, name=None) -> CayleyTable:
    if not isinstance(raw, dict):
        raise TableFormatError("table file must hold a JSON object")
    for key in ("order", "elements", "oplus"):
        if key not in raw:
            raise TableFormatError(f"missing field {key!r}")
    order = raw["order"]
    if not isinstance(order, int) or order < 1:
        raise TableFormatError(f"field 'order' must be a positive integer, got {order!r}")
    elements = raw["elements"]
    if not isinstance(elements, list) or len(elements) != order:
        raise TableFormatError("field 'elements' must list exactly 'order' labels")
    rows = raw["oplus"]
    if not isinstance(rows, list) or len(rows) != order:
        raise TableFormatError("field 'oplus' must hold 'order' rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != order:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise TableFormatError(f"row {i} has {got} entries, expected {order}")
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool):
                raise TableFormatError(f"cell ({i},{j}) is not an integer: {v!r}")
            if not 0 <= v < order:
                raise TableFormatError(f"cell ({i},{j}) value {v} out of range [0,{order})")
    return CayleyTable(np.array(rows), elements, name=name)


# ---------------------------------------------------------------------------
# derived permutations


def _row_inverse(table):
    """RI with RI[a, table[a, z]] = z; rows must be permutations."""
    n = table.shape[0]
    ri = np.empty_like(table)
    rows = np.repeat(np.arange(n), n)
    ri[rows, table.ravel()] = np.tile(np.arange(n), n)
    return ri


def gyr_tensor(table: np.ndarray) -> np.ndarray:
    """B[x, y, z] = index of the gyration of (x, y) applied to z."""
    n = table.shape[0]
    ri = _row_inverse(table)
    t_yz = table
    t_x_yz = table[np.arange(n)[:, None, None], t_yz[None, :, :]]
    return ri[table[:, :, None], t_x_yz]


@dataclass
class GyrationTable:
    """All derived gyration permutations of a finite table."""

    order: int
    tensor: np.ndarray  # (n, n, n)

    def perm(self, a: int, b: int) -> np.ndarray:
        return self.tensor[a, b]

    def all_identity(self) -> bool:
        return bool((self.tensor == np.arange(self.order)[None, None, :]).all())


def gyr_table(t: CayleyTable) -> GyrationTable:
    if not t.rows_bijective():
        srt = np.sort(t.table, axis=1)
        row = int(np.flatnonzero((srt != np.arange(t.order)[None, :]).any(axis=1))[0])
        raise AxiomViolationError(
            f"left translation by {t.labels[row]!r} is not a bijection"
        )
    return GyrationTable(t.order, gyr_tensor(t.table))


# ---------------------------------------------------------------------------
# validation


def _blocked(name, by):
    return CheckResult(name, False, 1.0, "exhaustive", witness={"blocked_by": by})


def validate_table(t: CayleyTable) -> VerificationReport:
    """Exhaustively check the axioms of a finite table; exact, tolerance-free."""
    report = VerificationReport(suite="table-validate", model=t.name, tolerances={})
    start = time.perf_counter()
    n = t.order
    T = t.table

    cand = t.identity_candidates()
    g1 = CheckResult("G1_unique_identity", len(cand) == 1, float(len(cand) != 1), "exhaustive")
    if not g1.passed:
        g1.witness = {"identity_candidates": [t.labels[i] for i in cand]}
    report.checks.append(g1)
    e = int(cand[0]) if len(cand) == 1 else None
    if e is not None:
        report.notes["identity"] = t.labels[e]

    if e is None:
        report.checks.append(_blocked("G2_unique_inverses", "G1_unique_identity"))
    else:
        bad = None
        for x in range(n):
            ys = np.flatnonzero((T[x] == e) & (T[:, x] == e))
            if len(ys) != 1:
                bad = (x, [t.labels[y] for y in ys])
                break
        g2 = CheckResult("G2_unique_inverses", bad is None, float(bad is not None), "exhaustive")
        if bad is not None:
            g2.witness = {"element": t.labels[bad[0]], "two_sided_inverses": bad[1]}
        report.checks.append(g2)

    bij = t.rows_bijective()
    c3 = CheckResult("left_translations_bijective", bij, float(not bij), "exhaustive")
    if not bij:
        srt = np.sort(T, axis=1)
        row = int(np.flatnonzero((srt != np.arange(n)[None, :]).any(axis=1))[0])
        vals, counts = np.unique(T[row], return_counts=True)
        c3.witness = {
            "row": t.labels[row],
            "repeated_value": t.labels[int(vals[counts > 1][0])],
        }
    report.checks.append(c3)

    if not bij:
        for name in ("G3_gyroassociativity", "G3_automorphism", "G4_loop"):
            report.checks.append(_blocked(name, "left_translations_bijective"))
        report.wall_time_s = time.perf_counter() - start
        return report

    B = gyr_tensor(T)
    report.notes["all_gyrations_identity"] = bool(
        (B == np.arange(n)[None, None, :]).all()
    )

    lhs = T[np.arange(n)[:, None, None], T[None, :, :]]
    rhs = T[T[:, :, None], B]
    ok = lhs == rhs
    g3 = CheckResult("G3_gyroassociativity", bool(ok.all()), float(not ok.all()), "exhaustive")
    if not g3.passed:
        x, y, z = map(int, np.argwhere(~ok)[0])
        g3.witness = {"triple": [t.labels[x], t.labels[y], t.labels[z]]}
    report.checks.append(g3)

    bad = None
    for x in range(n):  # chunked over the first pivot to bound memory at n^3
        gy_ab = B[x][:, T]  # (y, a, b) -> gyr[x,y](a + b)
        sum_gy = T[B[x][:, :, None], B[x][:, None, :]]
        okx = gy_ab == sum_gy
        if not okx.all():
            y, a, b = map(int, np.argwhere(~okx)[0])
            bad = (x, y, a, b)
            break
    aut = CheckResult("G3_automorphism", bad is None, float(bad is not None), "exhaustive")
    if bad is not None:
        x, y, a, b = bad
        aut.witness = {
            "pair": [t.labels[x], t.labels[y]],
            "arguments": [t.labels[a], t.labels[b]],
        }
    report.checks.append(aut)

    ok = B[T, np.arange(n)[None, :], :] == B
    g4 = CheckResult("G4_loop", bool(ok.all()), float(not ok.all()), "exhaustive")
    if not g4.passed:
        x, y, z = map(int, np.argwhere(~ok)[0])
        g4.witness = {"pair": [t.labels[x], t.labels[y]], "argument": t.labels[z]}
    report.checks.append(g4)

    report.wall_time_s = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# the finite model plugged into the generic suites


class TableModel(GyrogroupModel):
    """Adapter exposing a Cayley table to the sampling-free exact suites."""

    is_exact = True

    def __init__(self, t: CayleyTable):
        self.source = t
        self.order = t.order
        self.labels = t.labels
        self.name = t.name
        self._T = t.table
        self._e = t.identity_index
        self._inv = t.inverses()
        self._B = gyr_tensor(t.table) if t.rows_bijective() else None
        self.has_closed_gyr = self._B is not None

    def oplus(self, x, y):
        return self._T[x, y]

    def neg(self, x):
        return self._inv[x]

    def zero_like(self, x):
        return np.full_like(np.asarray(x), self._e)

    def gyr(self, x, y, z):
        if self._B is None:
            raise AxiomViolationError("gyrations undefined: left translations not bijective")
        return self._B[x, y, z]

    def distance(self, a, b):
        return (np.asarray(a) != np.asarray(b)).astype(float)

    def magnitude(self, a):
        return np.ones(np.asarray(a).shape, dtype=float)


def table_model(t: CayleyTable) -> TableModel:
    return TableModel(t)


# ---------------------------------------------------------------------------
# substructures


@dataclass(frozen=True)
class SubgyrogroupSet:
    elements: tuple
    is_subgyrogroup: bool = True
    is_L_subgyrogroup: bool = False

    def __len__(self):
        return len(self.elements)


def _closed_under(t: CayleyTable, B, H: np.ndarray) -> bool:
    inH = np.zeros(t.order, dtype=bool)
    inH[H] = True
    if not inH[t.table[np.ix_(H, H)]].all():
        return False
    if not inH[t.inverses()[H]].all():
        return False
    # gyration restriction must fix H setwise for pivots inside H
    return bool(inH[B[np.ix_(H, H, H)]].all())


def _is_L(t: CayleyTable, B, H: np.ndarray) -> bool:
    inH = np.zeros(t.order, dtype=bool)
    inH[H] = True
    return bool(inH[B[:, H][:, :, H]].all())


def _closure(t: CayleyTable, B, seed) -> frozenset:
    T = t.table
    inv = t.inverses()
    cur = set(seed) | {t.identity_index}
    while True:
        arr = np.fromiter(cur, dtype=np.int64)
        new = set(T[np.ix_(arr, arr)].ravel())
        new |= set(inv[arr])
        new |= set(B[np.ix_(arr, arr, arr)].ravel())
        if new <= cur:
            return frozenset(cur)
        cur |= new


def enumerate_subgyrogroups(t: CayleyTable) -> list:
    """All subsets that carry the induced structure, flagged for the
    strong (all-pivot) invariance property.

    Powerset scan for small orders; closure growth for larger ones.
    """
    if not t.rows_bijective():
        raise AxiomViolationError("table rows must be bijective")
    B = gyr_tensor(t.table)
    e = t.identity_index
    n = t.order
    found = set()
    if n <= 12:
        others = [i for i in range(n) if i != e]
        for mask in range(2 ** len(others)):
            members = [e] + [o for k, o in enumerate(others) if mask >> k & 1]
            H = np.array(sorted(members))
            if _closed_under(t, B, H):
                found.add(tuple(H.tolist()))
    else:
        frontier = {_closure(t, B, [])}
        seen = set(frontier)
        while frontier:
            nxt = set()
            for H in frontier:
                for g in range(n):
                    if g in H:
                        continue
                    grown = _closure(t, B, H | {g})
                    if grown not in seen:
                        seen.add(grown)
                        nxt.add(grown)
            frontier = nxt
        found = {tuple(sorted(H)) for H in seen}

    out = []
    for elems in sorted(found, key=lambda h: (len(h), h)):
        H = np.array(elems)
        out.append(
            SubgyrogroupSet(elems, True, _is_L(t, B, H))
        )
    return out


def is_L_subgyrogroup(t: CayleyTable, H) -> bool:
    """Whether every gyration of the ambient table, with second pivot in
    H, maps H onto itself. Requires H to be a subgyrogroup."""
    elems = H.elements if isinstance(H, SubgyrogroupSet) else tuple(sorted(H))
    arr = np.array(elems, dtype=np.int64)
    B = gyr_tensor(t.table)
    if not _closed_under(t, B, arr):
        raise AxiomViolationError(f"{list(elems)} is not a subgyrogroup")
    return _is_L(t, B, arr)


def coset_partition(t: CayleyTable, H):
    """Left cosets a + H as a partition, plus the projection index map.

    Only available when H has the strong invariance property; otherwise
    the blocks may overlap and the call refuses.
    """
    elems = H.elements if isinstance(H, SubgyrogroupSet) else tuple(sorted(H))
    if not is_L_subgyrogroup(t, elems):
        raise AxiomViolationError(
            f"{list(elems)} lacks the all-pivot invariance property; "
            "cosets are not guaranteed to partition the carrier"
        )
    arr = np.array(elems, dtype=np.int64)
    n = t.order
    blocks = []
    index_of = {}
    pi = np.full(n, -1)
    for a in range(n):
        coset = tuple(sorted(set(t.table[a, arr].tolist())))
        if coset not in index_of:
            index_of[coset] = len(blocks)
            blocks.append(coset)
        pi[a] = index_of[coset]
    sizes = {len(b) for b in blocks}
    covered = sorted(x for b in blocks for x in b)
    if sizes != {len(arr)} or covered != list(range(n)):
        raise AxiomViolationError("cosets failed to partition the carrier")
    return blocks, pi


# ---------------------------------------------------------------------------
# products


def product_table(a: CayleyTable, b: CayleyTable) -> CayleyTable:
    na, nb = a.order, b.order
    ia, ja = np.divmod(np.arange(na * nb), nb)
    ta = a.table[np.ix_(ia, ia)]
    tb = b.table[np.ix_(ja, ja)]
    table = ta * nb + tb
    labels = [f"({a.labels[i]},{b.labels[j]})" for i, j in zip(ia, ja)]
    return CayleyTable(table, labels, name=f"product({a.name},{b.name})")


def product_model(x, y):
    """Coordinatewise product; both operands tables or both continuous."""
    from .models import ProductModel  # local import avoids a cycle at import time

    if isinstance(x, CayleyTable) and isinstance(y, CayleyTable):
        return product_table(x, y)
    if isinstance(x, TableModel) and isinstance(y, TableModel):
        return TableModel(product_table(x.source, y.source))
    if isinstance(x, GyrogroupModel) and isinstance(y, GyrogroupModel):
        if x.is_exact or y.is_exact:
            raise UsageError("product operands must both be tables or both continuous")
        return ProductModel(x, y)
    raise UsageError("product operands must both be tables or both continuous models")


# ---------------------------------------------------------------------------
# built-in tables


def cyclic_table(n: int) -> CayleyTable:
    idx = np.arange(n)
    return CayleyTable((idx[:, None] + idx[None, :]) % n, name=f"z{n}")


def klein_table() -> CayleyTable:
    idx = np.arange(4)
    return CayleyTable(idx[:, None] ^ idx[None, :], name="klein")


def s3_table() -> CayleyTable:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.empty((6, 6), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(3))]
    labels = ["".join(str(v) for v in p) for p in perms]
    return CayleyTable(table, labels, name="s3")


def builtin_table(name: str) -> CayleyTable:
    name = name.lower()
    if name == "klein":
        return klein_table()
    if name == "s3":
        return s3_table()
    if name.startswith("z") and name[1:].isdigit() and int(name[1:]) >= 1:
        return cyclic_table(int(name[1:]))
    raise UsageError(f"unknown built-in table {name!r}")


BUILTIN_TABLE_NAMES = ("z1", "z2", "z3", "z4", "z5", "z6", "klein", "s3")


# ---------------------------------------------------------------------------
# exhaustive search


def _axioms_hold(T: np.ndarray) -> bool:
    """Fast exact validity test for a reduced Latin square with identity 0."""
    n = T.shape[0]
    e = 0
    inv_ok = True
    for x in range(n):
        ys = np.flatnonzero(T[x] == e)
        if len(ys) != 1 or T[ys[0], x] != e:
            inv_ok = False
            break
    if not inv_ok:
        return False
    B = gyr_tensor(T)
    if (B[:, :, T] != T[B[:, :, :, None], B[:, :, None, :]]).any():
        return False
    if (B[T, np.arange(n)[None, :], :] != B).any():
        return False
    return True


def _canonical_bytes(T: np.ndarray):
    """Minimal relabeling (identity fixed at 0) of the table, as bytes."""
    n = T.shape[0]
    best = None
    best_perm = None
    for rest in itertools.permutations(range(1, n)):
        perm = np.array((0,) + rest)
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        relab = perm[T[np.ix_(inv, inv)]]
        blob = relab.astype(np.uint8).tobytes()
        if best is None or blob < best:
            best = blob
            best_perm = relab
    return best, best_perm


def search_gyrogroups(order: int, canonical_identity: bool = True, max_results=None):
    """Every valid operation table of the given order, identity at 0.

    Backtracks over reduced Latin squares, validates each exactly, and
    (by default) deduplicates up to identity-fixing relabeling,
    returning canonical representatives sorted by their serialized
    form. With ``canonical_identity=False`` every valid reduced square
    is returned without deduplication. Deterministic.
    """
    if order < 1:
        raise UsageError("order must be >= 1")
    if order > 6:
        raise ResourceLimitError("exhaustive search is supported for order <= 6")
    n = order
    results = []
    seen = set()

    T = np.zeros((n, n), dtype=np.int64)
    T[0] = np.arange(n)
    T[:, 0] = np.arange(n)
    col_used = [set([j]) if j else set(range(n)) for j in range(n)]
    cells = [(r, c) for r in range(1, n) for c in range(1, n)]

    def backtrack(k):
        if max_results is not None and len(results) >= max_results:
            return
        if k == len(cells):
            if not _axioms_hold(T):
                return
            if not canonical_identity:
                results.append(CayleyTable(T.copy(), name=f"search{n}_{len(results)}"))
                return
            blob, relab = _canonical_bytes(T)
            if blob not in seen:
                seen.add(blob)
                results.append(CayleyTable(relab, name=f"search{n}_{len(results)}"))
            return
        r, c = cells[k]
        row_used = set(T[r, :c])
        for v in range(n):
            if v in row_used or v in col_used[c]:
                continue
            T[r, c] = v
            col_used[c].add(v)
            backtrack(k + 1)
            col_used[c].remove(v)
            if max_results is not None and len(results) >= max_results:
                return
        T[r, c] = 0

    backtrack(0)
    results.sort(key=lambda t: t.table.astype(np.uint8).tobytes())
    for i, t in enumerate(results):
        t.name = f"search{n}_{i}"
    return results
