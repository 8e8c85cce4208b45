"""
Bivariate Laurent polynomials with exact rational coefficients.

A polynomial is a finite map ``{(a, b): Fraction}`` standing for
``sum(c * zm**a * zn**b)``.  The exponent ``a`` runs along the horizontal
axis (``zm``) and ``b`` along the vertical axis (``zn``).  When a polynomial
acts on a field of quads, the monomial ``zm**a * zn**b`` reads the quad
``a`` columns to the right and ``b`` rows down.

Textual form, used by the wavelet config files and the CLI::

    >>> p = LaurentPoly2.parse("-1/2 -1/2*zm")
    >>> str(p * p.transpose())
    '1/4 +1/4*zm +1/4*zn +1/4*zm*zn'
"""

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "LaurentPoly2",
    "PolyParseError",
    "ZERO",
    "ONE",
    "ZM",
    "ZN",
    "as_fraction",
]


class PolyParseError(ValueError):
    """Malformed polynomial text; ``column`` is 1-based within the text."""

    def __init__(self, message, column):
        super().__init__("column {}: {}".format(column, message))
        self.column = column
        self.reason = message


def as_fraction(value):
    """Coerce ints, Fractions and decimal strings to :class:`Fraction`.

    Floats are rejected; they would smuggle rounding into the exact layer.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError("expected an exact rational, got {!r}".format(value))


class LaurentPoly2:
    """Immutable sparse bivariate Laurent polynomial over the rationals."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (a, b), c in dict(terms).items():
                c = as_fraction(c)
                if c:
                    clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, terms):
        # Caller guarantees int exponents and nonzero Fraction coefficients.
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a, b, c=1):
        return cls({(a, b): c})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self):
        """A copy of the term map."""
        return dict(self._terms)

    def items(self):
        """Terms sorted by ascending ``(b, a)``, the engine's evaluation order."""
        return sorted(self._terms.items(), key=lambda t: (t[0][1], t[0][0]))

    def coefficient(self, a=0, b=0):
        return self._terms.get((a, b), Fraction(0))

    def term_count(self):
        return len(self._terms)

    __len__ = term_count

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self):
        return all(k == (0, 0) for k in self._terms)

    def is_horizontal(self):
        return all(b == 0 for (_, b) in self._terms)

    def is_vertical(self):
        return all(a == 0 for (a, _) in self._terms)

    def is_monomial(self):
        return len(self._terms) == 1

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            if k not in out:
                out[k] = c
                continue
            s = out[k] + c
            if s:
                out[k] = s
            else:
                del out[k]
        return LaurentPoly2._trusted(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2._trusted({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return ZERO
        # integer convolution over a common denominator, one normalisation per term
        d1, n1 = _scaled(self._terms)
        d2, n2 = _scaled(other._terms)
        out = {}
        for (a1, b1), c1 in n1:
            for (a2, b2), c2 in n2:
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        den = d1 * d2
        return LaurentPoly2._trusted({k: Fraction(c, den) for k, c in out.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- structural operations -------------------------------------------

    def transpose(self):
        """Swap the horizontal and vertical variables."""
        return LaurentPoly2._trusted({(b, a): c for (a, b), c in self._terms.items()})

    def split_constant(self):
        """Return ``(p0, p1)``: the ``zm**0 * zn**0`` term, and everything else."""
        c = self._terms.get((0, 0))
        p0 = LaurentPoly2._trusted({(0, 0): c} if c else {})
        p1 = LaurentPoly2._trusted({k: v for k, v in self._terms.items() if k != (0, 0)})
        return p0, p1

    def even_odd_split(self):
        """Polyphase split of a horizontal polynomial.

        Returns ``(even, odd)`` with ``g(z) == even(z**2) + z * odd(z**2)``;
        the odd part collects the odd exponents shifted down by one.
        """
        if not self.is_horizontal():
            raise ValueError("even/odd split needs a polynomial in zm only, got {}".format(self))
        even, odd = {}, {}
        for (a, _), c in self._terms.items():
            if a % 2 == 0:
                even[(a // 2, 0)] = c
            else:
                odd[((a - 1) // 2, 0)] = c
        return LaurentPoly2._trusted(even), LaurentPoly2._trusted(odd)

    def upsample(self, factor=2, shift=0):
        """Substitute ``zm -> zm**factor`` and multiply by ``zm**shift``."""
        if not self.is_horizontal():
            raise ValueError("upsample needs a polynomial in zm only")
        return LaurentPoly2._trusted(
            {(a * factor + shift, 0): c for (a, _), c in self._terms.items()}
        )

    def support(self):
        """Bounding box ``(amin, amax, bmin, bmax)``; zeros for the zero polynomial."""
        if not self._terms:
            return (0, 0, 0, 0)
        a_s = [a for a, _ in self._terms]
        b_s = [b for _, b in self._terms]
        return (min(a_s), max(a_s), min(b_s), max(b_s))

    def evaluate(self, zm, zn=1):
        return sum(c * zm ** a * zn ** b for (a, b), c in self._terms.items())

    # -- text -------------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, ((a, b), c) in enumerate(self.items()):
            mono = "*".join(_render_var(v, e) for v, e in (("zm", a), ("zn", b)) if e)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = "{}*{}".format(abs(c), mono)
            sign = "-" if c < 0 else ("" if i == 0 else "+")
            parts.append(sign + body)
        return " ".join(parts)

    def __repr__(self):
        return "LaurentPoly2({!r})".format(str(self))

    @classmethod
    def parse(cls, text):
        """Parse the textual form produced by ``str()``.

        Whitespace is ignored.  Terms are ``coef``, ``coef*mono`` or ``mono``
        where ``mono`` is a ``*``-product of ``zm`` / ``zn`` with optional
        ``^int`` exponents, e.g. ``-3/8*zm^-1*zn^2``.
        """
        return _Parser(text).parse()


def _scaled(terms):
    den = math.lcm(*(c.denominator for c in terms.values()))
    return den, [(k, c.numerator * (den // c.denominator)) for k, c in terms.items()]


def _render_var(name, e):
    return name if e == 1 else "{}^{}".format(name, e)


def _coerce(value):
    if isinstance(value, LaurentPoly2):
        return value
    try:
        return LaurentPoly2.constant(as_fraction(value))
    except (TypeError, ValueError):
        return NotImplemented


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+/\d+|\d+(?:\.\d+)?)|(?P<var>z[mn])|(?P<op>[-+*^]))"
)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        stripped_end = len(text.rstrip())
        while pos < stripped_end:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise PolyParseError("unexpected character {!r}".format(text[col - 1]), col)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text) + 1)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise PolyParseError("empty polynomial", 1)
        out = {}
        first = True
        while self.peek()[0] is not None:
            sign = 1
            kind, val, col = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
            elif not first:
                raise PolyParseError("expected '+' or '-' between terms", col)
            (a, b), c = self.term()
            k = (a, b)
            out[k] = out.get(k, Fraction(0)) + sign * c
            first = False
        return LaurentPoly2(out)

    def term(self):
        coef = Fraction(1)
        a = b = 0
        kind, val, col = self.peek()
        if kind == "num":
            self.take()
            coef = Fraction(val)
            if self.peek()[:2] != ("op", "*"):
                return (0, 0), coef
            self.take()
            kind, val, col = self.peek()
        while True:
            if kind != "var":
                raise PolyParseError("expected a number, 'zm' or 'zn'", col)
            self.take()
            e = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                e = self.exponent()
            if val == "zm":
                a += e
            else:
                b += e
            if self.peek()[:2] != ("op", "*"):
                return (a, b), coef
            self.take()
            kind, val, col = self.peek()

    def exponent(self):
        sign = 1
        kind, val, col = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
            kind, val, col = self.peek()
        if kind != "num" or not val.isdigit():
            raise PolyParseError("exponent must be an integer", col)
        self.take()
        return sign * int(val)


ZERO = LaurentPoly2()
ONE = LaurentPoly2.constant(1)
ZM = LaurentPoly2.monomial(1, 0)
ZN = LaurentPoly2.monomial(0, 1)
