"""Labeled structures over finite bases and the representation verifiers.

A labeled structure assigns every algebra element a binary relation on a
finite base.  Three kinds exist:

* AtomLabeling: a partial symmetric edge coloring of the base by atoms
  (diagonal implicitly colored by the identity); element images extend
  additively.
* Power: the m-th coordinatewise power of an inner structure.  A pair of
  m-tuples is in the image of x iff every coordinate pair is in the inner
  image of x.  Power images are deliberately NOT additive: the image of
  a0+a1 also contains pairs whose coordinates mix a0 and a1 edges.
* Xi: two mirrored copies D, D' of an inner structure for L(p,0), with
  every cross pair (x,y') assigned one of n bridge classes.  The image of
  b is (b restricted to 1'+A) on both copies, plus the cross pairs of the
  classes i with ti <= b, in both orientations.

verify_weak checks that the element-to-relation map respects 0, meet,
identity, converse and relative multiplication and is injective (the
weak signature: unions and complements unconstrained, so the image of
the top element need not cover the base square).  verify_full adds the
two remaining clauses: image(1) is the full square and images respect
complement.  Both verdicts come with a first-failure certificate naming
the clause, the element pair and a witness point pair.

All verifiers literally compare expected and computed relations for
every element pair; they only share subcomputations (atom-level matrix
products, incremental unions, block decompositions) that are exact
identities of boolean matrix algebra.  For symmetric commutative
algebras the ordered pair (y,x) check is the transpose of the (x,y)
check once converse respect is established, so the pair loops run over
unordered pairs; the verdict is unchanged.

Matrices are row-major int bitsets; the boolean matrix product is the
composition primitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .algebra import Element, FiniteRelationAlgebra, iter_bits
from .errors import ResourceBudgetError
from .gf import field_make
from .lpn import build_lpn

DEFAULT_VERIFY_MAX_BASE = 4096
DEFAULT_IMAGE_MAX_BASE = 8192


# -- bit-matrix helpers ------------------------------------------------------


def diag_bits(d: int) -> int:
    out = 0
    for u in range(d):
        out |= 1 << (u * d + u)
    return out


def full_bits(rows: int, cols: int) -> int:
    return (1 << (rows * cols)) - 1


def bits_to_rows(bits: int, d: int, cols: int | None = None) -> list[int]:
    cols = d if cols is None else cols
    mask = (1 << cols) - 1
    return [(bits >> (u * cols)) & mask for u in range(d)]


def rows_to_bits(rows: list[int], cols: int) -> int:
    out = 0
    for row in reversed(rows):
        out = (out << cols) | row
    return out


def transpose_rows(rows: list[int], width: int) -> list[int]:
    out = [0] * width
    for i, row in enumerate(rows):
        bit = 1 << i
        while row:
            low = row & -row
            out[low.bit_length() - 1] |= bit
            row ^= low
    return out


def product_rows(xrows: list[int], yrows: list[int]) -> list[int]:
    """Boolean matrix product: (x o y)[u] = union of y-rows hit by x[u]."""
    out = []
    for row in xrows:
        acc = 0
        while row:
            low = row & -row
            acc |= yrows[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return out


@dataclass(frozen=True)
class ImageRelation:
    """A binary relation on 0..d-1, stored as a row-major d*d bitset."""

    d: int
    bits: int

    def has(self, u: int, v: int) -> bool:
        return bool(self.bits >> (u * self.d + v) & 1)

    def rows(self) -> list[int]:
        return bits_to_rows(self.bits, self.d)

    def transpose(self) -> "ImageRelation":
        return ImageRelation(
            self.d, rows_to_bits(transpose_rows(self.rows(), self.d), self.d)
        )

    def pairs(self) -> list[tuple[int, int]]:
        return [divmod(i, self.d) for i in iter_bits(self.bits)]

    def degree_range(self) -> tuple[int, int]:
        counts = [row.bit_count() for row in self.rows()]
        return min(counts), max(counts)


# -- structure kinds ---------------------------------------------------------


class AtomLabeling:
    """Partial symmetric atom labeling of a complete graph on the base.

    ``labels`` maps ordered off-diagonal pairs to atom indices; reversed
    pairs carry the converse atom and missing reversed pairs are filled
    in.  The diagonal is implicitly labeled by the identity.
    """

    kind = "atom-labeling"

    def __init__(
        self,
        algebra: FiniteRelationAlgebra,
        base_size: int,
        labels: dict[tuple[int, int], int],
    ):
        if base_size < 1:
            raise ValueError("base must be nonempty")
        self.algebra = algebra
        self.base_size = base_size
        full: dict[tuple[int, int], int] = {}
        for (u, v), a in labels.items():
            if not (0 <= u < base_size and 0 <= v < base_size):
                raise ValueError(f"edge ({u},{v}) outside base 0..{base_size - 1}")
            if u == v:
                raise ValueError("diagonal pairs are implicitly identity-labeled")
            if not 0 <= a < algebra.atom_count:
                raise ValueError(f"label {a} is not an atom index")
            if (1 << a) & algebra.identity_mask:
                raise ValueError("off-diagonal identity label")
            ca = algebra.converse[a]
            if full.setdefault((u, v), a) != a:
                raise ValueError(f"conflicting labels for edge ({u},{v})")
            if full.setdefault((v, u), ca) != ca:
                raise ValueError(f"edge ({u},{v}) conflicts with its converse")
        self.labels = full
        self._atom_bits: list[int] | None = None

    def atom_image_bits(self) -> list[int]:
        if self._atom_bits is None:
            d = self.base_size
            bits = [0] * self.algebra.atom_count
            for (u, v), a in self.labels.items():
                bits[a] |= 1 << (u * d + v)
            dg = diag_bits(d)
            for i in self.algebra.identity_atoms:
                bits[i] |= dg
            self._atom_bits = bits
        return self._atom_bits


@dataclass(frozen=True)
class Power:
    """Coordinatewise m-th power of an inner structure (m >= 2 here;
    build_power collapses m = 1 to the inner structure itself)."""

    inner: "LabeledStructure"
    m: int

    @property
    def kind(self) -> str:
        return "power"

    @property
    def algebra(self) -> FiniteRelationAlgebra:
        return self.inner.algebra

    @property
    def base_size(self) -> int:
        return self.inner.base_size**self.m


@dataclass(frozen=True)
class Xi:
    """Doubled structure with randomly classed cross edges.

    ``inner`` is a structure for L(p,0) on base D; the Xi base is D
    followed by its mirror copy D' (indices offset by inner.base_size).
    ``partition`` assigns each (x,y') in D x D' a class 1..n; ``algebra``
    is L(p,n).
    """

    inner: "LabeledStructure"
    n: int
    partition: "ClassAssignment"
    algebra: FiniteRelationAlgebra = field(compare=False)

    @property
    def kind(self) -> str:
        return "xi"

    @property
    def base_size(self) -> int:
        return 2 * self.inner.base_size


LabeledStructure = Union[AtomLabeling, Power, Xi]


class ClassAssignment:
    """Interface for Xi cross-edge classings (see xi module for impls)."""

    n: int
    d: int

    def class_of(self, x: int, y: int) -> int:
        raise NotImplementedError

    def row_bits(self, i: int, x: int) -> int:
        raise NotImplementedError

    def col_bits(self, i: int, y: int) -> int:
        raise NotImplementedError


# -- images ------------------------------------------------------------------


def image(
    structure: LabeledStructure,
    x: Element | int,
    *,
    max_base: int = DEFAULT_IMAGE_MAX_BASE,
) -> ImageRelation:
    """The relation assigned to element x by the structure."""
    mask = x.bits if isinstance(x, Element) else x
    if isinstance(x, Element) and x.algebra is not structure.algebra:
        raise ValueError("element belongs to a different algebra")
    d = structure.base_size
    if d > max_base:
        raise ResourceBudgetError(
            f"base {d} exceeds image budget {max_base}; raise max_base to override"
        )
    return ImageRelation(d, _image_bits(structure, mask))


def _image_bits(structure: LabeledStructure, mask: int) -> int:
    if isinstance(structure, AtomLabeling):
        atom_bits = structure.atom_image_bits()
        out = 0
        for a in iter_bits(mask):
            out |= atom_bits[a]
        return out
    if isinstance(structure, Power):
        rows = _power_rows(structure, mask)
        return rows_to_bits(rows, structure.base_size)
    if isinstance(structure, Xi):
        return _xi_bits(structure, mask)
    raise TypeError(f"not a labeled structure: {structure!r}")


def _image_rows(structure: LabeledStructure, mask: int) -> list[int]:
    if isinstance(structure, Power):
        return _power_rows(structure, mask)
    return bits_to_rows(_image_bits(structure, mask), structure.base_size)


def _lift_once(hi_rows: list[int], lo_rows: list[int], lo_width: int) -> list[int]:
    """Rows of the coordinate-pair lift: pair (uh,ul) relates to (vh,vl)
    iff uh~vh in hi and ul~vl in lo.  Point index is uh*d_lo + ul (first
    coordinate most significant)."""
    out = []
    for hi in hi_rows:
        spread = []
        row = hi
        while row:
            low = row & -row
            spread.append((low.bit_length() - 1) * lo_width)
            row ^= low
        for lo in lo_rows:
            acc = 0
            for shift in spread:
                acc |= lo << shift
            out.append(acc)
    return out


def _power_rows(structure: Power, mask: int) -> list[int]:
    base_rows = _image_rows(structure.inner, mask)
    d = structure.inner.base_size
    rows = base_rows
    width = d
    for _ in range(structure.m - 1):
        rows = _lift_once(rows, base_rows, d)
        width *= d
    return rows


def _xi_blocks(structure: Xi, mask: int) -> tuple[int, int]:
    """(inner-block bits, cross-block bits) for the element mask."""
    p, _ = structure.inner.algebra.lpn_params
    inner_mask = mask & ((1 << (p + 2)) - 1)
    s_mask = mask >> (p + 2)
    m_bits = _image_bits(structure.inner, inner_mask)
    d = structure.inner.base_size
    c_rows = [0] * d
    part = structure.partition
    for i in iter_bits(s_mask):
        for x in range(d):
            c_rows[x] |= part.row_bits(i + 1, x)
    return m_bits, rows_to_bits(c_rows, d)


def _xi_bits(structure: Xi, mask: int) -> int:
    d = structure.inner.base_size
    m_bits, c_bits = _xi_blocks(structure, mask)
    m_rows = bits_to_rows(m_bits, d)
    c_rows = bits_to_rows(c_bits, d)
    ct_rows = transpose_rows(c_rows, d)
    big = []
    for u in range(d):
        big.append(m_rows[u] | (c_rows[u] << d))
    for u in range(d):
        big.append(ct_rows[u] | (m_rows[u] << d))
    return rows_to_bits(big, 2 * d)


# -- verification ------------------------------------------------------------


@dataclass
class VerifyFailure:
    clause: str
    elements: tuple[int, ...]
    point: tuple[int, int] | None
    detail: str

    def describe(self, algebra: FiniteRelationAlgebra) -> str:
        elems = ", ".join(algebra.format_mask(m) for m in self.elements)
        at = f" at point pair {self.point}" if self.point else ""
        return f"{self.clause} failed for ({elems}){at}: {self.detail}"


@dataclass
class VerifyReport:
    ok: bool
    mode: str
    failure: VerifyFailure | None
    pairs_checked: int

    def summary(self, algebra: FiniteRelationAlgebra | None = None) -> str:
        if self.ok:
            return f"PASS ({self.mode}, {self.pairs_checked} element pairs)"
        if algebra is not None:
            return f"FAIL ({self.mode}): {self.failure.describe(algebra)}"
        return f"FAIL ({self.mode}): {self.failure.clause}"


def _first_diff_point(expected: int, actual: int, cols: int) -> tuple[int, int]:
    diff = expected ^ actual
    low = diff & -diff
    return divmod(low.bit_length() - 1, cols)


def verify_weak(
    structure: LabeledStructure, *, max_base: int = DEFAULT_VERIFY_MAX_BASE
) -> VerifyReport:
    return _verify(structure, full=False, max_base=max_base)


def verify_full(
    structure: LabeledStructure, *, max_base: int = DEFAULT_VERIFY_MAX_BASE
) -> VerifyReport:
    return _verify(structure, full=True, max_base=max_base)


def _verify(structure: LabeledStructure, *, full: bool, max_base: int) -> VerifyReport:
    if structure.base_size > max_base:
        raise ResourceBudgetError(
            f"base {structure.base_size} exceeds verification budget {max_base}"
        )
    if isinstance(structure, Xi):
        return _verify_xi(structure, full=full)
    if isinstance(structure, AtomLabeling):
        return _verify_additive(structure, full=full)
    return _verify_dense(structure, full=full)


def _verify_additive(structure: AtomLabeling, *, full: bool) -> VerifyReport:
    alg = structure.algebra
    d = structure.base_size
    k = alg.atom_count
    n_elems = 1 << k
    mode = "full" if full else "weak"
    atom_bits = structure.atom_image_bits()

    def fail(clause, elements, point, detail, pairs=0):
        return VerifyReport(
            False, mode, VerifyFailure(clause, elements, point, detail), pairs
        )

    dg = diag_bits(d)
    ident_img = 0
    for i in alg.identity_atoms:
        ident_img |= atom_bits[i]
    if ident_img != dg:
        return fail(
            "identity",
            (alg.identity_mask,),
            _first_diff_point(dg, ident_img, d),
            "image of 1' is not exactly the diagonal",
        )

    # converse on atoms decides it for all elements (transpose is additive)
    atom_rows = [bits_to_rows(b, d) for b in atom_bits]
    symmetric_ok = alg.is_symmetric
    for a in range(k):
        t = rows_to_bits(transpose_rows(atom_rows[a], d), d)
        if t != atom_bits[alg.converse[a]]:
            symmetric_ok = False
            return fail(
                "converse",
                (1 << a,),
                _first_diff_point(t, atom_bits[alg.converse[a]], d),
                "transpose of atom image is not the converse atom's image",
            )

    img = [0] * n_elems
    for x in range(1, n_elems):
        low = x & (x - 1)
        img[x] = img[low] | atom_bits[(x ^ low).bit_length() - 1]

    prod_atom = [
        [rows_to_bits(product_rows(atom_rows[a], atom_rows[b]), d) for b in range(k)]
        for a in range(k)
    ]
    comp = alg.comp

    # unordered-pair reduction: sound once images are symmetric and the
    # composition table commutes (then the (y,x) check is the transpose
    # of the (x,y) check)
    half = symmetric_ok and alg.is_commutative
    pairs = 0
    rrow = [0] * n_elems
    crow = [0] * n_elems
    for x in range(n_elems):
        qx = [0] * k
        cx = [0] * k
        for a in iter_bits(x):
            pa = prod_atom[a]
            ca = comp[a]
            for b in range(k):
                qx[b] |= pa[b]
                cx[b] |= ca[b]
        imgx = img[x]
        y_start = x if half else 0
        if y_start == 0:
            pairs += 1  # (x, 0): both sides are empty by construction
        for y in range(1, n_elems):
            low = y & (y - 1)
            b = (y ^ low).bit_length() - 1
            prod = rrow[low] | qx[b]
            rrow[y] = prod
            cz = crow[low] | cx[b]
            crow[y] = cz
            if y >= y_start:
                pairs += 1
                expected = img[cz]
                if expected != prod:
                    return fail(
                        "compose",
                        (x, y),
                        _first_diff_point(expected, prod, d),
                        f"image of x;y differs from the matrix product "
                        f"(x;y = {alg.format_mask(cz)})",
                        pairs,
                    )
                mz = img[x & y]
                if imgx & img[y] != mz:
                    return fail(
                        "meet",
                        (x, y),
                        _first_diff_point(mz, imgx & img[y], d),
                        "image of x.y differs from intersection of images",
                        pairs,
                    )

    seen: dict[int, int] = {}
    for x in range(n_elems):
        other = seen.setdefault(img[x], x)
        if other != x:
            return fail(
                "injective", (other, x), None, "two elements share an image", pairs
            )

    if full:
        full_m = full_bits(d, d)
        if img[alg.top_mask] != full_m:
            return fail(
                "top",
                (alg.top_mask,),
                _first_diff_point(full_m, img[alg.top_mask], d),
                "image of 1 does not cover the base square",
                pairs,
            )
        for x in range(n_elems):
            expected = full_m ^ img[x]
            actual = img[x ^ alg.top_mask]
            if expected != actual:
                return fail(
                    "complement",
                    (x,),
                    _first_diff_point(expected, actual, d),
                    "image of complement(x) is not the complement of image(x)",
                    pairs,
                )

    return VerifyReport(True, mode, None, pairs)


def _verify_dense(structure: LabeledStructure, *, full: bool) -> VerifyReport:
    """Whole-matrix verifier for non-additive kinds (Power)."""
    alg = structure.algebra
    d = structure.base_size
    n_elems = 1 << alg.atom_count
    mode = "full" if full else "weak"
    # the all-pairs contract touches every element image; refuse workloads
    # whose image cache cannot fit in memory
    if n_elems * d * d // 8 > 1 << 29:
        raise ResourceBudgetError(
            f"verifying {n_elems} images of {d}x{d} bits needs too much memory"
        )

    rows_of: dict[int, list[int]] = {}

    def rows(mask: int) -> list[int]:
        got = rows_of.get(mask)
        if got is None:
            got = _image_rows(structure, mask)
            rows_of[mask] = got
        return got

    def fail(clause, elements, point, detail, pairs=0):
        return VerifyReport(
            False, mode, VerifyFailure(clause, elements, point, detail), pairs
        )

    def diff_point(exp_rows, act_rows):
        for u, (er, ar) in enumerate(zip(exp_rows, act_rows)):
            if er != ar:
                diff = er ^ ar
                return (u, (diff & -diff).bit_length() - 1)
        return None

    if any(rows(0)):
        return fail("zero", (0,), None, "image of 0 is nonempty")
    ident_rows = rows(alg.identity_mask)
    if ident_rows != [1 << u for u in range(d)]:
        exp = [1 << u for u in range(d)]
        return fail(
            "identity",
            (alg.identity_mask,),
            diff_point(exp, ident_rows),
            "image of 1' is not exactly the diagonal",
        )

    symmetric_ok = alg.is_symmetric
    for x in range(n_elems):
        t = transpose_rows(rows(x), d)
        cx = alg.converse_mask(x)
        if t != rows(cx):
            symmetric_ok = False
            return fail(
                "converse",
                (x,),
                diff_point(t, rows(cx)),
                "transpose of image(x) is not image of converse(x)",
            )

    pairs = 0
    half = symmetric_ok and alg.is_commutative
    for x in range(n_elems):
        rx = rows(x)
        y_start = x if half else 0
        for y in range(y_start, n_elems):
            pairs += 1
            ry = rows(y)
            prod = product_rows(rx, ry)
            cz = alg.compose_masks(x, y)
            expected = rows(cz)
            if expected != prod:
                return fail(
                    "compose",
                    (x, y),
                    diff_point(expected, prod),
                    f"image of x;y differs from the matrix product "
                    f"(x;y = {alg.format_mask(cz)})",
                    pairs,
                )
            mrows = rows(x & y)
            actual = [a & b for a, b in zip(rx, ry)]
            if mrows != actual:
                return fail(
                    "meet",
                    (x, y),
                    diff_point(mrows, actual),
                    "image of x.y differs from intersection of images",
                    pairs,
                )

    seen: dict[tuple[int, ...], int] = {}
    for x in range(n_elems):
        key = tuple(rows(x))
        other = seen.setdefault(key, x)
        if other != x:
            return fail(
                "injective", (other, x), None, "two elements share an image", pairs
            )

    if full:
        full_row = (1 << d) - 1
        top = rows(alg.top_mask)
        if top != [full_row] * d:
            return fail(
                "top",
                (alg.top_mask,),
                diff_point([full_row] * d, top),
                "image of 1 does not cover the base square",
                pairs,
            )
        for x in range(n_elems):
            expected = [full_row ^ r for r in rows(x)]
            actual = rows(x ^ alg.top_mask)
            if expected != actual:
                return fail(
                    "complement",
                    (x,),
                    diff_point(expected, actual),
                    "image of complement(x) is not the complement of image(x)",
                    pairs,
                )

    return VerifyReport(True, mode, None, pairs)


def _verify_xi(structure: Xi, *, full: bool) -> VerifyReport:
    """Blockwise all-pairs verifier for Xi structures.

    Images have the block form [[M, C], [C^T, M]] with M the inner image
    of x restricted to 1'+A and C the union of the cross classes below x.
    Boolean block multiplication turns each pair check into four block
    equalities; the two lower blocks are transposes of conditions already
    covered (given symmetric M, checked first), so each unordered pair
    (x,y) is decided by the D-block, the D'-block and both orientations
    of the cross block.
    """
    alg = structure.algebra
    if not (alg.is_symmetric and alg.is_commutative):
        raise ValueError("xi verification requires a symmetric commutative algebra")
    inner_alg = structure.inner.algebra
    p, _ = inner_alg.lpn_params
    d = structure.inner.base_size
    mode = "full" if full else "weak"
    inner_top = inner_alg.top_mask
    inner_width = p + 2
    s_width = structure.n
    part = structure.partition

    m_bits: dict[int, int] = {}
    m_rows: dict[int, list[int]] = {}

    def mbits(e: int) -> int:
        got = m_bits.get(e)
        if got is None:
            got = _image_bits(structure.inner, e)
            m_bits[e] = got
            m_rows[e] = bits_to_rows(got, d)
        return got

    def mrows(e: int) -> list[int]:
        mbits(e)
        return m_rows[e]

    class_rows = [
        [part.row_bits(i + 1, x) for x in range(d)] for i in range(s_width)
    ]
    c_rows_cache: dict[int, list[int]] = {0: [0] * d}
    c_bits_cache: dict[int, int] = {0: 0}
    ct_rows_cache: dict[int, list[int]] = {0: [0] * d}

    def crows(s: int) -> list[int]:
        got = c_rows_cache.get(s)
        if got is None:
            low = s & (s - 1)
            i = (s ^ low).bit_length() - 1
            got = [a | b for a, b in zip(crows(low), class_rows[i])]
            c_rows_cache[s] = got
        return got

    def cbits(s: int) -> int:
        got = c_bits_cache.get(s)
        if got is None:
            got = rows_to_bits(crows(s), d)
            c_bits_cache[s] = got
        return got

    def ctrows(s: int) -> list[int]:
        got = ct_rows_cache.get(s)
        if got is None:
            got = transpose_rows(crows(s), d)
            ct_rows_cache[s] = got
        return got

    def fail(clause, elements, point, detail, pairs=0):
        return VerifyReport(
            False, mode, VerifyFailure(clause, elements, point, detail), pairs
        )

    def split(mask: int) -> tuple[int, int]:
        return mask & inner_top, mask >> inner_width

    # block-local points mapped into the doubled base
    def pt_dd(exp, act):
        return _first_diff_point(exp, act, d)

    def pt_ddp(exp, act):
        u, v = _first_diff_point(exp, act, d)
        return (u, d + v)

    def pt_dpdp(exp, act):
        u, v = _first_diff_point(exp, act, d)
        return (d + u, d + v)

    if mbits(0) != 0:
        return fail("zero", (0,), None, "image of 0 is nonempty")
    dgm = diag_bits(d)
    if mbits(inner_alg.identity_mask) != dgm:
        return fail(
            "identity",
            (alg.identity_mask,),
            pt_dd(dgm, mbits(inner_alg.identity_mask)),
            "inner image of 1' is not exactly the diagonal",
        )

    for e in range(inner_top + 1):
        t = rows_to_bits(transpose_rows(mrows(e), d), d)
        if t != mbits(e):
            return fail(
                "converse",
                (e,),
                pt_dd(t, mbits(e)),
                "inner image is not symmetric",
            )

    mm: dict[tuple[int, int], int] = {}
    cct: dict[tuple[int, int], int] = {}
    ctc: dict[tuple[int, int], int] = {}
    mc: dict[tuple[int, int], int] = {}
    cm: dict[tuple[int, int], int] = {}

    def prod_mm(e1, e2):
        got = mm.get((e1, e2))
        if got is None:
            got = rows_to_bits(product_rows(mrows(e1), mrows(e2)), d)
            mm[(e1, e2)] = got
        return got

    def prod_cct(s1, s2):
        got = cct.get((s1, s2))
        if got is None:
            got = rows_to_bits(product_rows(crows(s1), ctrows(s2)), d)
            cct[(s1, s2)] = got
        return got

    def prod_ctc(s1, s2):
        got = ctc.get((s1, s2))
        if got is None:
            got = rows_to_bits(product_rows(ctrows(s1), crows(s2)), d)
            ctc[(s1, s2)] = got
        return got

    def prod_mc(e, s):
        got = mc.get((e, s))
        if got is None:
            got = rows_to_bits(product_rows(mrows(e), crows(s)), d)
            mc[(e, s)] = got
        return got

    def prod_cm(s, e):
        got = cm.get((s, e))
        if got is None:
            got = rows_to_bits(product_rows(crows(s), mrows(e)), d)
            cm[(s, e)] = got
        return got

    n_elems = 1 << alg.atom_count
    pairs = 0
    for x in range(n_elems):
        e1, s1 = split(x)
        mb1, cb1 = mbits(e1), cbits(s1)
        for y in range(x, n_elems):
            pairs += 1
            e2, s2 = split(y)
            z = alg.compose_masks(x, y)
            ez, sz = split(z)

            exp_m = mbits(ez)
            act_d = prod_mm(e1, e2) | prod_cct(s1, s2)
            if exp_m != act_d:
                return fail(
                    "compose",
                    (x, y),
                    pt_dd(exp_m, act_d),
                    f"first-copy block of x;y (= {alg.format_mask(z)}) "
                    "differs from the matrix product",
                    pairs,
                )
            act_dp = prod_mm(e1, e2) | prod_ctc(s1, s2)
            if exp_m != act_dp:
                return fail(
                    "compose",
                    (x, y),
                    pt_dpdp(exp_m, act_dp),
                    f"mirror-copy block of x;y (= {alg.format_mask(z)}) "
                    "differs from the matrix product",
                    pairs,
                )
            exp_c = cbits(sz)
            act_c = prod_mc(e1, s2) | prod_cm(s1, e2)
            if exp_c != act_c:
                return fail(
                    "compose",
                    (x, y),
                    pt_ddp(exp_c, act_c),
                    f"cross block of x;y (= {alg.format_mask(z)}) "
                    "differs from the matrix product",
                    pairs,
                )
            act_c_rev = prod_mc(e2, s1) | prod_cm(s2, e1)
            if exp_c != act_c_rev:
                return fail(
                    "compose",
                    (y, x),
                    pt_ddp(exp_c, act_c_rev),
                    f"cross block of y;x (= {alg.format_mask(z)}) "
                    "differs from the matrix product",
                    pairs,
                )

            em, sm = split(x & y)
            if mbits(em) != mb1 & mbits(e2):
                return fail(
                    "meet",
                    (x, y),
                    pt_dd(mbits(em), mb1 & mbits(e2)),
                    "inner block of x.y differs from intersection",
                    pairs,
                )
            if cbits(sm) != cb1 & cbits(s2):
                return fail(
                    "meet",
                    (x, y),
                    pt_ddp(cbits(sm), cb1 & cbits(s2)),
                    "cross block of x.y differs from intersection",
                    pairs,
                )

    seen: dict[tuple[int, int], int] = {}
    for x in range(n_elems):
        e, s = split(x)
        key = (mbits(e), cbits(s))
        other = seen.setdefault(key, x)
        if other != x:
            return fail(
                "injective", (other, x), None, "two elements share an image", pairs
            )

    if full:
        full_m = full_bits(d, d)
        s_full = (1 << s_width) - 1
        if mbits(inner_top) != full_m or cbits(s_full) != full_m:
            exp, act = (
                (full_m, mbits(inner_top))
                if mbits(inner_top) != full_m
                else (full_m, cbits(s_full))
            )
            return fail(
                "top",
                (alg.top_mask,),
                pt_dd(exp, act),
                "image of 1 does not cover the base square",
                pairs,
            )
        for x in range(n_elems):
            e, s = split(x)
            if mbits(inner_top ^ e) != full_m ^ mbits(e):
                return fail(
                    "complement",
                    (x,),
                    pt_dd(mbits(inner_top ^ e), full_m ^ mbits(e)),
                    "inner block of complement(x) is not the complement",
                    pairs,
                )
            if cbits(s_full ^ s) != full_m ^ cbits(s):
                return fail(
                    "complement",
                    (x,),
                    pt_ddp(cbits(s_full ^ s), full_m ^ cbits(s)),
                    "cross block of complement(x) is not the complement",
                    pairs,
                )

    return VerifyReport(True, mode, None, pairs)


# -- the independent atom-level network oracle -------------------------------


def network_check(structure: AtomLabeling) -> VerifyReport:
    """Atom-level check equivalent to verify_weak for atom labelings.

    Conditions: (t1) every two-edge path closes into a labeled triangle
    whose third label sits below the composition of the other two; (t2)
    paths returning to their start need the identity below the
    composition; (s1) every labeled pair (u,v) with label below a;b has a
    witness w with (u,w) labeled a and (w,v) labeled b; (s2) every point
    has, for every atom a with 1' <= a;a~, an outgoing a-edge.  Together
    with the constructor's converse consistency these are exactly the
    weak-representation clauses, restricted to atoms and extended by
    additivity.
    """
    alg = structure.algebra
    if len(alg.identity_atoms) != 1:
        raise ValueError("network check expects an integral algebra")
    d = structure.base_size
    k = alg.atom_count
    conv = alg.converse
    ident = next(iter(alg.identity_atoms))
    nb = [[0] * k for _ in range(d)]
    for (u, v), a in structure.labels.items():
        nb[u][a] |= 1 << v
    for u in range(d):
        nb[u][ident] |= 1 << u  # diagonal is implicitly identity-labeled

    def fail(clause, elements, point, detail):
        return VerifyReport(
            False, "weak", VerifyFailure(clause, elements, point, detail), 0
        )

    for (u, v), a in structure.labels.items():
        for w in range(d):
            if w == u or w == v:
                continue
            buw = None
            for b in range(k):
                if nb[u][b] >> w & 1:
                    buw = b
                    break
            if buw is None:
                continue
            bwv = None
            for b in range(k):
                if nb[w][b] >> v & 1:
                    bwv = b
                    break
            if bwv is None:
                continue
            if not alg.comp[buw][bwv] >> a & 1:
                return fail(
                    "network-triangle",
                    (1 << buw, 1 << bwv, 1 << a),
                    (u, v),
                    f"label not below composition via point {w}",
                )

    # paths u -> w -> u: composition must contain the identity (auto in a
    # relation algebra, but checked so the oracle stands alone)
    for u in range(d):
        for a in range(k):
            row = nb[u][a]
            while row:
                low = row & -row
                w = low.bit_length() - 1
                row ^= low
                b = None
                for bb in range(k):
                    if nb[w][bb] >> u & 1:
                        b = bb
                        break
                if b is not None and not alg.comp[a][b] & alg.identity_mask:
                    return fail(
                        "network-triangle",
                        (1 << a, 1 << b),
                        (u, u),
                        "identity not below closing composition",
                    )

    for (u, v), g in structure.labels.items():
        for a in range(k):
            row_a = nb[u][a]
            for b in range(k):
                if not alg.comp[a][b] >> g & 1:
                    continue
                if not row_a & nb[v][conv[b]]:
                    return fail(
                        "network-saturation",
                        (1 << a, 1 << b, 1 << g),
                        (u, v),
                        "no witness point for a;b above the label",
                    )

    for u in range(d):
        for a in range(k):
            if alg.comp[a][conv[a]] & alg.identity_mask and not nb[u][a]:
                return fail(
                    "network-saturation",
                    (1 << a,),
                    (u, u),
                    "point has no outgoing edge with this label",
                )

    return VerifyReport(True, "weak", None, 0)


# -- constructions -----------------------------------------------------------


def build_affine(q: int) -> AtomLabeling:
    """Affine-plane labeling of L(q,0) on the q^2 points of GF(q)^2.

    Point (x1,x2) has index x1*q + x2.  A pair of distinct points gets
    the slope atom a_s of the line through them (s = dy/dx as a field
    index), or a_q for vertical lines (dx = 0).  Every point then has
    exactly q-1 partners per slope atom.
    """
    if q < 3:
        raise ValueError("affine construction needs q >= 3")
    fld = field_make(q)
    alg = build_lpn(q, 0)
    labels: dict[tuple[int, int], int] = {}
    for x1 in range(q):
        for x2 in range(q):
            u = x1 * q + x2
            for y1 in range(q):
                for y2 in range(q):
                    v = y1 * q + y2
                    if u == v:
                        continue
                    dx = fld.sub(y1, x1)
                    dy = fld.sub(y2, x2)
                    if dx == 0:
                        slope = q  # vertical
                    else:
                        slope = fld.mul(dy, fld.inv(dx))
                    labels[(u, v)] = 1 + slope
    return AtomLabeling(alg, q * q, labels)


def build_doubled(q: int) -> AtomLabeling:
    """Two affine copies with all cross pairs labeled t1: a representation
    of L(q,1) on 2q^2 points.  Mirror points are offset by q^2."""
    affine = build_affine(q)
    d = affine.base_size
    alg = build_lpn(q, 1)
    t1 = alg.atom_count - 1
    labels: dict[tuple[int, int], int] = {}
    for (u, v), a in affine.labels.items():
        labels[(u, v)] = a
        labels[(d + u, d + v)] = a
    for u in range(d):
        for v in range(d):
            labels[(u, d + v)] = t1
    return AtomLabeling(alg, 2 * d, labels)


def build_power(structure: LabeledStructure, m: int) -> LabeledStructure:
    """Coordinatewise power; m = 1 returns the structure unchanged."""
    if m < 1:
        raise ValueError("power exponent must be at least 1")
    if m == 1:
        return structure
    return Power(structure, m)


# -- degree audit ------------------------------------------------------------


@dataclass
class DegreeAuditReport:
    degrees: dict[int, tuple[int, int]]  # atom index -> (min, max) row degree
    claim_full: bool
    lpn_ok: bool | None
    detail: str

    @property
    def ok(self) -> bool:
        return self.lpn_ok is not False


def degree_audit(
    structure: LabeledStructure,
    *,
    claim_full: bool = False,
    max_base: int = DEFAULT_IMAGE_MAX_BASE,
) -> DegreeAuditReport:
    """Per-atom neighbour counts, plus the full-representation criterion.

    In any full representation of L(p,n) every point has exactly p-1
    neighbours per slope atom, and p-1 >= 2n-1 must hold; a structure
    claiming to represent L(p,n) with 2n > p therefore always fails.
    """
    alg = structure.algebra
    degrees: dict[int, tuple[int, int]] = {}
    for a in range(alg.atom_count):
        if (1 << a) & alg.identity_mask:
            continue
        degrees[a] = image(structure, 1 << a, max_base=max_base).degree_range()

    lpn_ok: bool | None = None
    detail = "no full-representation claim checked"
    if claim_full:
        if alg.lpn_params is None:
            raise ValueError("degree audit claim requires an L(p,n) algebra")
        p, n = alg.lpn_params
        lpn_ok = True
        detail = f"all slope degrees equal p-1 = {p - 1} and p-1 >= 2n-1 = {2 * n - 1}"
        for i in range(1, p + 2):
            lo, hi = degrees[i]
            if lo != p - 1 or hi != p - 1:
                lpn_ok = False
                detail = (
                    f"slope atom {alg.atom_names[i]} has degree range "
                    f"{lo}..{hi}, expected exactly {p - 1}"
                )
                break
        if lpn_ok and p - 1 < 2 * n - 1:
            lpn_ok = False
            detail = f"p-1 = {p - 1} < 2n-1 = {2 * n - 1}: no representation exists"
    return DegreeAuditReport(degrees, claim_full, lpn_ok, detail)
