"""
Slow reference transforms for checking the engine.

Nothing here shares code with :mod:`wavelift.engine` or
:mod:`wavelift.schemes`: the filters are expanded with plain 2x2 polynomial
matrices, and the transforms are scalar loops in float64 with their own
boundary indexing.
"""

from dataclasses import dataclass

import numpy as np

from wavelift.poly2 import LaurentPoly2, ONE, ZERO

__all__ = [
    "FilterBank",
    "filters_from_lifting",
    "lifting_polyphase",
    "polyphase_from_filters",
    "direct_transform_1d",
    "direct_transform",
    "naive_lifting_1d",
    "lifting_transform_2d",
]

WSS = "whole-sample-symmetric"
ZERO_PAD = "zero-pad"


def _mode(extension):
    value = getattr(extension, "value", extension)
    if value not in (WSS, ZERO_PAD):
        raise ValueError("unsupported extension {!r}".format(extension))
    return value


@dataclass(frozen=True)
class FilterBank:
    """Analysis filters: ``low[m] = sum(g0[k] * x[2m + k])``, likewise ``g1``."""

    g0: LaurentPoly2
    g1: LaurentPoly2

    def taps(self, which):
        g = self.g0 if which == 0 else self.g1
        return sorted((a, float(c)) for (a, _), c in g.terms.items())


def _mul2(x, y):
    return [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]


def lifting_polyphase(w):
    """2x2 polyphase matrix (rows low/high, columns even/odd) of the lifting chain."""
    m = [[ONE, ZERO], [ZERO, ONE]]
    for pair in w.pairs:
        m = _mul2([[ONE, ZERO], [pair.predict, ONE]], m)
        m = _mul2([[ONE, pair.update], [ZERO, ONE]], m)
    scale = [[LaurentPoly2.constant(w.scale_low), ZERO], [ZERO, LaurentPoly2.constant(w.scale_high)]]
    return _mul2(scale, m)


def filters_from_lifting(w):
    m = lifting_polyphase(w)
    g0 = m[0][0].upsample(2) + m[0][1].upsample(2, shift=1)
    g1 = m[1][0].upsample(2) + m[1][1].upsample(2, shift=1)
    return FilterBank(g0, g1)


def polyphase_from_filters(fb):
    e0, o0 = fb.g0.even_odd_split()
    e1, o1 = fb.g1.even_odd_split()
    return [[e0, o0], [e1, o1]]


def _reflect(i, n):
    while i < 0 or i >= n:
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * (n - 1) - i
    return i


def _sample(x, i, mode):
    n = len(x)
    if 0 <= i < n:
        return x[i]
    if mode == ZERO_PAD:
        return 0.0
    return x[_reflect(i, n)]


def direct_transform_1d(signal, fb, extension=WSS):
    mode = _mode(extension)
    x = [float(v) for v in signal]
    n = len(x)
    if n % 2:
        raise ValueError("signal length must be even")
    t0, t1 = fb.taps(0), fb.taps(1)
    low = [sum(c * _sample(x, 2 * m + k, mode) for k, c in t0) for m in range(n // 2)]
    high = [sum(c * _sample(x, 2 * m + k, mode) for k, c in t1) for m in range(n // 2)]
    return np.array(low), np.array(high)


def direct_transform(pixels, fb, extension=WSS):
    """Separable filter bank on rows then columns; returns ``(LL, HL, LH, HH)``."""
    px = np.asarray(pixels, dtype=np.float64)
    rows, cols = px.shape
    if rows % 2 or cols % 2:
        raise ValueError("image dimensions must be even")
    lo_h = np.empty((rows, cols // 2))
    hi_h = np.empty((rows, cols // 2))
    for y in range(rows):
        lo_h[y], hi_h[y] = direct_transform_1d(px[y], fb, extension)
    ll = np.empty((rows // 2, cols // 2))
    lh = np.empty_like(ll)
    hl = np.empty_like(ll)
    hh = np.empty_like(ll)
    for m in range(cols // 2):
        ll[:, m], lh[:, m] = direct_transform_1d(lo_h[:, m], fb, extension)
        hl[:, m], hh[:, m] = direct_transform_1d(hi_h[:, m], fb, extension)
    return ll, hl, lh, hh


def naive_lifting_1d(signal, w, extension=WSS):
    """In-place lifting on the interleaved signal; returns ``(low, high)``."""
    mode = _mode(extension)
    x = [float(v) for v in signal]
    n = len(x)
    if n % 2:
        raise ValueError("signal length must be even")
    for pair in w.pairs:
        p = [(a, float(c)) for (a, _), c in pair.predict.terms.items()]
        u = [(a, float(c)) for (a, _), c in pair.update.terms.items()]
        snap = list(x)
        for i in range(1, n, 2):
            x[i] = snap[i] + sum(c * _sample(snap, i - 1 + 2 * a, mode) for a, c in p)
        snap = list(x)
        for i in range(0, n, 2):
            x[i] = snap[i] + sum(c * _sample(snap, i + 1 + 2 * a, mode) for a, c in u)
    low = np.array(x[0::2]) * float(w.scale_low)
    high = np.array(x[1::2]) * float(w.scale_high)
    return low, high


def lifting_transform_2d(pixels, w, extension=WSS):
    """``naive_lifting_1d`` on rows then columns; returns ``(LL, HL, LH, HH)``."""
    px = np.asarray(pixels, dtype=np.float64)
    rows, cols = px.shape
    lo_h = np.empty((rows, cols // 2))
    hi_h = np.empty((rows, cols // 2))
    for y in range(rows):
        lo_h[y], hi_h[y] = naive_lifting_1d(px[y], w, extension)
    ll = np.empty((rows // 2, cols // 2))
    lh, hl, hh = np.empty_like(ll), np.empty_like(ll), np.empty_like(ll)
    for m in range(cols // 2):
        ll[:, m], lh[:, m] = naive_lifting_1d(lo_h[:, m], w, extension)
        hl[:, m], hh[:, m] = naive_lifting_1d(hi_h[:, m], w, extension)
    return ll, hl, lh, hh
