"""
Property checks shared by ``dwt verify`` and the benchmark guard.

Each check returns a :class:`CheckResult`; ``detail`` names the first
counterexample when a check fails.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from wavelift import oracle
from wavelift.engine import AccessTrace, Engine, ExtensionMode, QuadField, make_plan, to_mallat
from wavelift.schemes import COMPONENTS, build_all, count_ops, invert, verify_equivalence

__all__ = ["CheckResult", "run_checks", "format_table"]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _worst(a_planes, b_planes, labels=COMPONENTS):
    """(max abs difference, plane label, row, col)."""
    best = (0.0, None, None, None)
    for c, (a, b) in enumerate(zip(a_planes, b_planes)):
        d = np.abs(np.asarray(a, np.float64) - np.asarray(b, np.float64))
        idx = np.unravel_index(int(np.argmax(d)), d.shape)
        if d[idx] > best[0]:
            best = (float(d[idx]), labels[c], int(idx[0]), int(idx[1]))
    return best


def _where(worst):
    err, band, n, m = worst
    if band is None:
        return "max error 0"
    return "max error {:.3g} at {}[row {}, col {}]".format(err, band, n, m)


def check_symbolic(schemes):
    names = list(schemes)
    for a, b in itertools.combinations(names, 2):
        v = verify_equivalence(schemes[a], schemes[b])
        if not v:
            return CheckResult("symbolic-equivalence", False, "{} vs {}: {}".format(a, b, v))
    return CheckResult("symbolic-equivalence", True, "{} schemes exact-equal".format(len(names)))


def check_step_counts(schemes, w):
    extra = 1 if w.is_scaled else 0
    want = {
        "sep-lifting": 4 * w.K + extra,
        "ns-lifting": 2 * w.K + extra,
        "ns-adapted": 2 * w.K + extra,
        "sep-conv": 2,
    }
    for name, s in schemes.items():
        got = count_ops(s).steps
        if got != want[name]:
            return CheckResult("step-counts", False, "{}: {} steps, expected {}".format(name, got, want[name]))
    return CheckResult("step-counts", True, ", ".join("{}={}".format(n, want[n]) for n in schemes))


def check_structure(schemes):
    for name, s in schemes.items():
        for k, step in enumerate(s.steps, 1):
            for p, part in enumerate(step.parts[1:], 2):
                if not part.is_constant_only():
                    return CheckResult("composite-structure", False,
                                       "{} step {} part {} reads neighbours".format(name, k, p))
            if name != "sep-conv":
                for p, part in enumerate(step.parts, 1):
                    det = part.determinant()
                    if not det.is_constant() or (not part.is_diagonal() and det != 1):
                        return CheckResult("composite-structure", False,
                                           "{} step {} part {} has determinant {}".format(name, k, p, det))
    return CheckResult("composite-structure", True, "later parts constant-only, lifting determinants 1")


def check_vanishing_moment(schemes, size, threads):
    tile = QuadField.from_pixels(np.full((size, size), 0.5, np.float32))
    for name, s in schemes.items():
        out = to_mallat(_run(s, tile, threads))
        for c in (1, 2, 3):
            err = float(np.abs(out[c]).max())
            if err > 1e-5:
                return CheckResult("vanishing-moment", False,
                                   "{}: constant input leaves {} = {:.3g}".format(name, COMPONENTS[c], err))
    return CheckResult("vanishing-moment", True, "constant tiles give zero detail subbands")


def _run(scheme, tile, threads, trace=None):
    plan = make_plan(scheme, tile.height_quads, threads)
    with Engine(threads) as eng:
        return eng.run(tile, plan, trace)


def check_oracle(schemes, w, x, mode, threads, tol=1e-3):
    label = "oracle[{}]".format(mode.value)
    conv = oracle.direct_transform(x, oracle.filters_from_lifting(w), mode)
    # zero padding is applied per step, so near the edges a lifting scheme
    # computes the scalar lifting result, not the filter bank one
    lifting = conv if mode is ExtensionMode.SYMMETRIC else oracle.lifting_transform_2d(x, w, mode)
    for name, s in schemes.items():
        ref = conv if name == "sep-conv" else lifting
        out = to_mallat(_run(s, QuadField.from_pixels(x, mode), threads))
        worst = _worst(out, ref)
        if not worst[0] < tol:
            return CheckResult(label, False, "{}: {}".format(name, _where(worst)))
    return CheckResult(label, True, "all schemes within {}".format(tol))


def check_reconstruction(schemes, x, mode, threads, tol=1e-4):
    label = "reconstruction[{}]".format(mode.value)
    tile = QuadField.from_pixels(x, mode)
    failures = []
    for name, s in schemes.items():
        fwd = _run(s, tile, threads)
        back = _run(invert(s), fwd, threads)
        worst = _worst([back.data], [x], labels=("pixel",))
        if not worst[0] < tol:
            failures.append("{}: {}".format(name, _where(worst)))
    if failures:
        return CheckResult(label, False, "; ".join(failures))
    return CheckResult(label, True, "all schemes within {}".format(tol))


def check_determinism(schemes, x, threads_list):
    tile = QuadField.from_pixels(x)
    for name, s in schemes.items():
        ref = _run(s, tile, 1).data
        for t in threads_list:
            out = _run(s, tile, t).data
            if out.tobytes() != ref.tobytes():
                n, m = np.argwhere(out != ref)[0]
                return CheckResult("determinism", False,
                                   "{}: {} threads differ from serial at pixel ({}, {})".format(name, t, n, m))
    return CheckResult("determinism", True, "threads {} bit-identical".format(sorted(set(threads_list))))


def check_isolation(schemes, x, threads):
    tile = QuadField.from_pixels(x)
    threads = max(threads, 2)
    for name, s in schemes.items():
        trace = AccessTrace()
        _run(s, tile, threads, trace)
        bad = trace.violations()
        if bad or trace.neighbour_reads:
            return CheckResult("isolation", False, "{}: {} cross-band reads, {} neighbour reads in constant parts"
                               .format(name, len(bad), trace.neighbour_reads))
    return CheckResult("isolation", True, "no in-step cross-band reads")


def run_checks(w, size=(64, 64), threads=4, seed=0, extensions=(ExtensionMode.SYMMETRIC,)):
    """All checks for one wavelet.  ``size`` is ``(width, height)`` in pixels."""
    width, height = size
    rng = np.random.default_rng(seed)
    x = rng.random((height, width)).astype(np.float32)
    schemes = build_all(w)
    results = [
        check_symbolic(schemes),
        check_step_counts(schemes, w),
        check_structure(schemes),
        check_vanishing_moment(schemes, min(width, height), threads),
    ]
    for mode in extensions:
        mode = ExtensionMode.parse(mode)
        results.append(check_oracle(schemes, w, x, mode, threads))
    for mode in extensions:
        mode = ExtensionMode.parse(mode)
        results.append(check_reconstruction(schemes, x, mode, threads))
    results.append(check_determinism(schemes, x, [2, 7, threads]))
    results.append(check_isolation(schemes, x, threads))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        lines.append("{:<{w}}  {}  {}".format(r.name, "PASS" if r.ok else "FAIL", r.detail, w=width))
    return "\n".join(lines)
