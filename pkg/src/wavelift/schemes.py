"""
The four 2-D computation schemes as barrier-separated sequences of 4x4
polyphase matrices.

Rows and columns of every matrix are ordered ``(LL, HL, LH, HH)``; a matrix
maps the column vector of a quad's components to the new components, so a
step list ``[M1, M2, ...]`` computes ``... @ M2 @ M1``.

Every :class:`Step` is followed by a full barrier.  A step may be composite
(several parts applied back to back without a barrier); then only the first
part may read neighbouring quads, the later parts are constant-only and
work on the values the same worker has just produced.
"""

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import permutations

from wavelift.poly2 import LaurentPoly2, ONE, ZERO

__all__ = [
    "COMPONENTS",
    "SCHEME_NAMES",
    "PolyMatrix4",
    "Step",
    "Scheme",
    "OpCount",
    "Verdict",
    "SchemeError",
    "horizontal_predict",
    "vertical_predict",
    "horizontal_update",
    "vertical_update",
    "spatial_predict",
    "spatial_update",
    "scaling",
    "build_separable_lifting",
    "build_separable_convolution",
    "build_nonseparable_lifting",
    "build_adapted_nonseparable",
    "build",
    "build_all",
    "verify_equivalence",
    "count_ops",
    "invert",
    "dump",
]

COMPONENTS = ("LL", "HL", "LH", "HH")
SCHEME_NAMES = ("sep-lifting", "sep-conv", "ns-lifting", "ns-adapted")
LL, HL, LH, HH = range(4)


class SchemeError(ValueError):
    pass


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class PolyMatrix4:
    """Immutable 4x4 matrix of :class:`LaurentPoly2`."""

    __slots__ = ("_e", "_hash")

    def __init__(self, rows):
        e = []
        for row in rows:
            row = list(row)
            if len(row) != 4:
                raise ValueError("PolyMatrix4 rows need 4 entries")
            e.append(tuple(x if isinstance(x, LaurentPoly2) else LaurentPoly2.constant(x) for x in row))
        if len(e) != 4:
            raise ValueError("PolyMatrix4 needs 4 rows")
        self._e = tuple(e)
        self._hash = None

    @classmethod
    def identity(cls):
        return cls([[ONE if i == j else ZERO for j in range(4)] for i in range(4)])

    @classmethod
    def from_entries(cls, entries):
        """Identity with the given ``{(row, col): poly}`` entries replaced."""
        rows = [[ONE if i == j else ZERO for j in range(4)] for i in range(4)]
        for (i, j), p in entries.items():
            rows[i][j] = p
        return cls(rows)

    @classmethod
    def diagonal(cls, values):
        return cls.from_entries({(i, i): LaurentPoly2.constant(v) for i, v in enumerate(values)})

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    @property
    def rows(self):
        return self._e

    def entries(self):
        for i in range(4):
            for j in range(4):
                yield i, j, self._e[i][j]

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix4):
            return NotImplemented
        out = []
        for i in range(4):
            row = []
            for j in range(4):
                acc = ZERO
                for k in range(4):
                    a = self._e[i][k]
                    if not a:
                        continue
                    b = other._e[k][j]
                    if not b:
                        continue
                    acc = acc + (b if a == ONE else (a if b == ONE else a * b))
                row.append(acc)
            out.append(row)
        return PolyMatrix4(out)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix4):
            return NotImplemented
        return self._e == other._e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._e)
        return self._hash

    def map(self, fn):
        return PolyMatrix4([[fn(p) for p in row] for row in self._e])

    def is_constant_only(self):
        return all(p.is_constant() for row in self._e for p in row)

    def is_identity(self):
        return self == _IDENTITY

    def is_diagonal(self):
        return all(not p for i, j, p in self.entries() if i != j)

    def is_unit_triangular(self):
        """Unit diagonal and all off-diagonal entries on one side."""
        if any(self._e[i][i] != ONE for i in range(4)):
            return False
        lower = all(not self._e[i][j] for i in range(4) for j in range(i + 1, 4))
        upper = all(not self._e[i][j] for i in range(4) for j in range(i))
        return lower or upper

    def determinant(self):
        return _det([list(r) for r in self._e])

    def inverse(self):
        """Exact inverse over the Laurent ring.

        Exists iff the determinant is a single nonzero monomial.
        """
        det = self.determinant()
        if not det.is_monomial():
            raise SchemeError("matrix is not invertible over Laurent polynomials (det = {})".format(det))
        ((a, b), c), = det.terms.items()
        det_inv = LaurentPoly2.monomial(-a, -b, 1 / c)
        rows = []
        for i in range(4):
            row = []
            for j in range(4):
                # adj[i][j] = cofactor of entry (j, i)
                minor = [[self._e[r][s] for s in range(4) if s != i] for r in range(4) if r != j]
                cof = _det(minor)
                if (i + j) % 2:
                    cof = -cof
                row.append(cof * det_inv)
            rows.append(row)
        return PolyMatrix4(rows)

    def render(self):
        return "[" + ", ".join("[" + ", ".join(str(p) for p in row) + "]" for row in self._e) + "]"

    def __repr__(self):
        return "PolyMatrix4({})".format(self.render())


def _det(m):
    n = len(m)
    total = ZERO
    for perm in permutations(range(n)):
        term = ONE
        for i, j in enumerate(perm):
            e = m[i][j]
            if not e:
                term = ZERO
                break
            term = term * e
        if term:
            total = total + (term if _perm_sign(perm) > 0 else -term)
    return total


_IDENTITY = PolyMatrix4.identity()


# -- elementary matrices ------------------------------------------------------


def horizontal_predict(p):
    return PolyMatrix4.from_entries({(HL, LL): p, (HH, LH): p})


def vertical_predict(p):
    """Takes the horizontal polynomial and applies its transpose down the columns."""
    pt = p.transpose()
    return PolyMatrix4.from_entries({(LH, LL): pt, (HH, HL): pt})


def horizontal_update(u):
    return PolyMatrix4.from_entries({(LL, HL): u, (LH, HH): u})


def vertical_update(u):
    ut = u.transpose()
    return PolyMatrix4.from_entries({(LL, LH): ut, (HL, HH): ut})


def spatial_predict(p):
    pt = p.transpose()
    return PolyMatrix4.from_entries(
        {(HL, LL): p, (LH, LL): pt, (HH, LL): p * pt, (HH, HL): pt, (HH, LH): p}
    )


def spatial_update(u):
    ut = u.transpose()
    return PolyMatrix4.from_entries(
        {(LL, HL): u, (LL, LH): ut, (LL, HH): u * ut, (HL, HH): ut, (LH, HH): u}
    )


def scaling(low, high):
    return PolyMatrix4.diagonal([low * low, high * low, low * high, high * high])


def horizontal_scaling(low, high):
    return PolyMatrix4.diagonal([low, high, low, high])


def vertical_scaling(low, high):
    return PolyMatrix4.diagonal([low, low, high, high])


# -- data types ---------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    parts: tuple
    barrier_before: bool = True

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise SchemeError("a step needs at least one part")
        for k, part in enumerate(self.parts[1:], 2):
            if not part.is_constant_only():
                raise SchemeError(
                    "part {} of a composite step reads neighbouring quads; "
                    "only the first part may".format(k)
                )

    @property
    def is_composite(self):
        return len(self.parts) > 1

    def matrix(self):
        out = self.parts[0]
        for part in self.parts[1:]:
            out = part @ out
        return out


@dataclass(frozen=True, eq=True)
class Scheme:
    name: str
    steps: tuple
    wavelet: object = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @cached_property
    def total(self):
        """Product of all steps in application order."""
        out = _IDENTITY
        for step in self.steps:
            out = step.matrix() @ out
        return out

    def matrices(self):
        for step in self.steps:
            yield from step.parts


@dataclass(frozen=True)
class OpCount:
    steps: int
    macs_per_quad: int
    copies_per_quad: int


@dataclass(frozen=True)
class Verdict:
    equal: bool
    entry: tuple = None
    left: LaurentPoly2 = None
    right: LaurentPoly2 = None

    def __bool__(self):
        return self.equal

    def __str__(self):
        if self.equal:
            return "exact-equal"
        i, j = self.entry
        return "mismatch at ({}, {}): {} != {}".format(COMPONENTS[i], COMPONENTS[j], self.left, self.right)


# -- builders -----------------------------------------------------------------


def _scale_step(w):
    if w.is_scaled:
        return [Step([scaling(w.scale_low, w.scale_high)])]
    return []


def build_separable_lifting(w):
    steps = []
    for pair in w.pairs:
        steps.append(Step([horizontal_predict(pair.predict)]))
        steps.append(Step([vertical_predict(pair.predict)]))
        steps.append(Step([horizontal_update(pair.update)]))
        steps.append(Step([vertical_update(pair.update)]))
    return Scheme("sep-lifting", steps + _scale_step(w), w)


def build_nonseparable_lifting(w):
    steps = []
    for pair in w.pairs:
        steps.append(Step([spatial_predict(pair.predict)]))
        steps.append(Step([spatial_update(pair.update)]))
    return Scheme("ns-lifting", steps + _scale_step(w), w)


def _adapted_step(poly, spatial, horizontal, vertical):
    p0, p1 = poly.split_constant()
    parts = []
    if p1:
        parts.append(spatial(p1))
    if p0:
        parts.append(horizontal(p0))
        parts.append(vertical(p0))
    return Step(parts)


def build_adapted_nonseparable(w):
    steps = []
    for pair in w.pairs:
        steps.append(_adapted_step(pair.predict, spatial_predict, horizontal_predict, vertical_predict))
        steps.append(_adapted_step(pair.update, spatial_update, horizontal_update, vertical_update))
    return Scheme("ns-adapted", steps + _scale_step(w), w)


def build_separable_convolution(w):
    nh = nv = _IDENTITY
    for pair in w.pairs:
        nh = horizontal_update(pair.update) @ horizontal_predict(pair.predict) @ nh
        nv = vertical_update(pair.update) @ vertical_predict(pair.predict) @ nv
    if w.is_scaled:
        nh = horizontal_scaling(w.scale_low, w.scale_high) @ nh
        nv = vertical_scaling(w.scale_low, w.scale_high) @ nv
    return Scheme("sep-conv", [Step([nh]), Step([nv])], w)


_BUILDERS = {
    "sep-lifting": build_separable_lifting,
    "sep-conv": build_separable_convolution,
    "ns-lifting": build_nonseparable_lifting,
    "ns-adapted": build_adapted_nonseparable,
}


def build(name, w):
    try:
        return _BUILDERS[name](w)
    except KeyError:
        raise SchemeError("unknown scheme {!r}; choose from {}".format(name, ", ".join(SCHEME_NAMES))) from None


def build_all(w):
    return {name: build(name, w) for name in SCHEME_NAMES}


# -- analysis -----------------------------------------------------------------


def verify_equivalence(a, b):
    ta, tb = a.total, b.total
    for i, j, p in ta.entries():
        q = tb[i, j]
        if p != q:
            return Verdict(False, (i, j), p, q)
    return Verdict(True)


def _matrix_ops(m):
    macs = copies = 0
    for i, j, p in m.entries():
        n = p.term_count()
        if i == j and p.coefficient(0, 0) == 1:
            copies += 1
            n -= 1
        macs += n
    return macs, copies


def count_ops(s):
    macs = copies = 0
    for m in s.matrices():
        dm, dc = _matrix_ops(m)
        macs += dm
        copies += dc
    return OpCount(len(s.steps), macs, copies)


def _invert_step(step):
    first, consts = step.parts[0], step.parts[1:]
    try:
        if not consts:
            return Step([first.inverse()])
        # step = K @ A with K constant; inverse = K^-1 @ (K @ A^-1 @ K^-1), so the
        # neighbour-reading part still comes first.
        k = _IDENTITY
        for c in consts:
            k = c @ k
        head = k @ first.inverse() @ k.inverse()
        return Step([head] + [c.inverse() for c in reversed(consts)])
    except SchemeError as exc:
        raise SchemeError("step is not invertible: {}".format(exc)) from None


_INV_SUFFIX = "^-1"


def invert(s):
    name = s.name[: -len(_INV_SUFFIX)] if s.name.endswith(_INV_SUFFIX) else s.name + _INV_SUFFIX
    return Scheme(name, [_invert_step(st) for st in reversed(s.steps)], s.wavelet)


def dump(s):
    """One line per step; composite parts are separated by ``;``."""
    lines = []
    for n, step in enumerate(s.steps, 1):
        parts = " ; ".join(m.render() for m in step.parts)
        lines.append("| step {}: {}".format(n, parts))
    return "\n".join(lines)
