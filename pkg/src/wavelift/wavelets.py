"""
Wavelets described by their lifting factorisation.

Each wavelet is an ordered list of (predict, update) pairs of horizontal
polynomials, optionally followed by a diagonal scaling of the low-pass and
high-pass channels.  The predict polynomial acts on the even samples and is
added to the odd ones; the update polynomial acts on the (new) odd samples
and is added to the even ones.

Custom wavelets are read from a small line-oriented text format::

    # LeGall 5/3
    name = legall
    predict[1] = -1/2 -1/2*zm
    update[1]  = 1/4 +1/4*zm^-1
    scale_low  = 1

Pair indices start at 1 and must be contiguous.  ``scale_high`` defaults to
the reciprocal of ``scale_low``.
"""

from dataclasses import dataclass
from fractions import Fraction
import re

from wavelift.poly2 import LaurentPoly2, PolyParseError, as_fraction

__all__ = [
    "LiftingPair",
    "WaveletSpec",
    "WaveletConfigError",
    "UnknownWaveletError",
    "builtin",
    "available",
    "load_custom",
    "dump_custom",
    "resolve",
]


class WaveletConfigError(ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = "line {}".format(line)
            if column is not None:
                where += ", column {}".format(column)
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnknownWaveletError(KeyError):
    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class LiftingPair:
    predict: LaurentPoly2
    update: LaurentPoly2

    def __post_init__(self):
        for role in ("predict", "update"):
            p = getattr(self, role)
            if not isinstance(p, LaurentPoly2):
                raise TypeError("{} must be a LaurentPoly2".format(role))
            if p.is_zero():
                raise ValueError("{} polynomial must be nonzero".format(role))
            if not p.is_horizontal():
                raise ValueError("{} polynomial must be in zm only, got {}".format(role, p))


@dataclass(frozen=True)
class WaveletSpec:
    name: str
    pairs: tuple
    scale_low: Fraction = Fraction(1)
    scale_high: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "scale_low", as_fraction(self.scale_low))
        object.__setattr__(self, "scale_high", as_fraction(self.scale_high))
        if not self.pairs:
            raise ValueError("a wavelet needs at least one lifting pair")
        if not self.scale_low or not self.scale_high:
            raise ValueError("scaling factors must be nonzero")
        if self.scale_low * self.scale_high != 1:
            raise ValueError(
                "scale_low and scale_high must be reciprocals, got {} and {}".format(
                    self.scale_low, self.scale_high
                )
            )

    @property
    def K(self):
        return len(self.pairs)

    @property
    def is_scaled(self):
        return self.scale_low != 1 or self.scale_high != 1

    def same_filters(self, other):
        """Equality ignoring the name."""
        return (
            self.pairs == other.pairs
            and self.scale_low == other.scale_low
            and self.scale_high == other.scale_high
        )


def _pair(p, u):
    return LiftingPair(LaurentPoly2.parse(p), LaurentPoly2.parse(u))


def _sym(c):
    """Two equal taps: predict ``c(1 + zm)``, update ``c(1 + zm^-1)``."""
    c = as_fraction(c)
    return LaurentPoly2({(0, 0): c, (1, 0): c}), LaurentPoly2({(0, 0): c, (-1, 0): c})


def _cdf53():
    return WaveletSpec("cdf53", [_pair("-1/2 -1/2*zm", "1/4 +1/4*zm^-1")])


# Daubechies-Sweldens factorisation of the CDF 9/7 pair, 16 significant digits.
_CDF97_ALPHA = "-1.586134342059924"
_CDF97_BETA = "-0.05298011857296141"
_CDF97_GAMMA = "0.8829110755309333"
_CDF97_DELTA = "0.4435068520439712"
_CDF97_K = "1.230174104914001"


def _cdf97():
    p1, _ = _sym(_CDF97_ALPHA)
    _, u1 = _sym(_CDF97_BETA)
    p2, _ = _sym(_CDF97_GAMMA)
    _, u2 = _sym(_CDF97_DELTA)
    k = Fraction(_CDF97_K)
    # unit DC gain on the low-pass channel, matching cdf53
    return WaveletSpec("cdf97", [LiftingPair(p1, u1), LiftingPair(p2, u2)], 1 / k, k)


_REGISTRY = {
    "cdf53": _cdf53,
    "cdf97": _cdf97,
}


def available():
    return sorted(_REGISTRY)


def builtin(name):
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownWaveletError(
            "unknown wavelet {!r}; available: {}".format(name, ", ".join(available()))
        ) from None
    return factory()


_LINE = re.compile(r"^\s*(?P<key>[A-Za-z_]\w*)\s*(?:\[\s*(?P<idx>\d+)\s*\])?\s*=\s*(?P<value>.*?)\s*$")


def load_custom(text, name="custom"):
    """Parse a wavelet config; raises :class:`WaveletConfigError` with line/column."""
    predicts, updates = {}, {}
    scale_low = scale_high = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise WaveletConfigError("expected 'key = value'", lineno, col)
        key, idx, value = m.group("key"), m.group("idx"), m.group("value")
        vcol = m.start("value") + 1
        if key in ("predict", "update"):
            if idx is None:
                raise WaveletConfigError("{} needs an index, e.g. {}[1]".format(key, key), lineno, m.end("key") + 1)
            try:
                poly = LaurentPoly2.parse(value)
            except PolyParseError as exc:
                raise WaveletConfigError(exc.reason, lineno, vcol + exc.column - 1) from None
            target = predicts if key == "predict" else updates
            if int(idx) in target:
                raise WaveletConfigError("duplicate {}[{}]".format(key, idx), lineno, 1)
            target[int(idx)] = (poly, lineno)
        elif key in ("scale_low", "scale_high") and idx is None:
            try:
                val = Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise WaveletConfigError("bad rational {!r}".format(value), lineno, vcol) from None
            if key == "scale_low":
                scale_low = val
            else:
                scale_high = val
        elif key == "name" and idx is None:
            name = value
        else:
            raise WaveletConfigError("unknown key {!r}".format(key), lineno, m.start("key") + 1)

    if not predicts:
        raise WaveletConfigError("no lifting pairs declared")
    if sorted(predicts) != list(range(1, len(predicts) + 1)):
        raise WaveletConfigError("predict indices must run 1..K, got {}".format(sorted(predicts)))
    if sorted(updates) != sorted(predicts):
        raise WaveletConfigError("predict and update indices differ")

    pairs = []
    for k in range(1, len(predicts) + 1):
        (p, pline), (u, uline) = predicts[k], updates[k]
        for poly, role, line in ((p, "predict", pline), (u, "update", uline)):
            if poly.is_zero():
                raise WaveletConfigError("{}[{}] is the zero polynomial".format(role, k), line)
            if not poly.is_horizontal():
                raise WaveletConfigError("{}[{}] must only use zm".format(role, k), line)
        pairs.append(LiftingPair(p, u))

    if scale_low is None and scale_high is None:
        scale_low = scale_high = Fraction(1)
    elif scale_high is None:
        scale_high = 1 / scale_low
    elif scale_low is None:
        scale_low = 1 / scale_high
    try:
        return WaveletSpec(name, pairs, scale_low, scale_high)
    except ValueError as exc:
        raise WaveletConfigError(str(exc)) from None


def dump_custom(w):
    lines = ["name = {}".format(w.name)]
    for k, pair in enumerate(w.pairs, 1):
        lines.append("predict[{}] = {}".format(k, pair.predict))
        lines.append("update[{}] = {}".format(k, pair.update))
    lines.append("scale_low = {}".format(w.scale_low))
    lines.append("scale_high = {}".format(w.scale_high))
    return "\n".join(lines) + "\n"


def resolve(arg):
    """``cdf53`` -> builtin, ``@path`` -> config file."""
    if arg.startswith("@"):
        path = arg[1:]
        with open(path) as f:
            text = f.read()
        stem = re.sub(r"\.[^./]*$", "", path.rsplit("/", 1)[-1]) or "custom"
        return load_custom(text, name=stem)
    return builtin(arg)
