from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from wavelift.poly2 import LaurentPoly2 as P, ONE, ZERO, ZM
from wavelift.schemes import (
    PolyMatrix4, SCHEME_NAMES, SchemeError, Step, build, build_adapted_nonseparable, build_all,
    build_nonseparable_lifting, build_separable_convolution, build_separable_lifting, count_ops,
    dump, horizontal_predict, horizontal_update, invert, spatial_predict, spatial_update,
    verify_equivalence, vertical_predict, vertical_update,
)
from wavelift.wavelets import LiftingPair, WaveletSpec, available, builtin

CDF53 = builtin("cdf53")
CDF97 = builtin("cdf97")
P53, U53 = CDF53.pairs[0].predict, CDF53.pairs[0].update
IDENTITY = PolyMatrix4.identity()


def hpoly(max_terms=3):
    coef = st.fractions(min_value=-3, max_value=3, max_denominator=6).filter(bool)
    return st.dictionaries(st.tuples(st.integers(-2, 2), st.just(0)), coef, min_size=1,
                           max_size=max_terms).map(P)


wavelets = st.builds(
    lambda pairs: WaveletSpec("random", [LiftingPair(p, u) for p, u in pairs]),
    st.lists(st.tuples(hpoly(), hpoly()), min_size=1, max_size=3),
)


def test_sep_lifting_cdf53_shapes():
    s = build_separable_lifting(CDF53)
    assert len(s.steps) == 4
    hp, vp, hu, vu = (st_.parts[0] for st_ in s.steps)
    pt, ut = P53.transpose(), U53.transpose()
    assert hp == PolyMatrix4([[1, 0, 0, 0], [P53, 1, 0, 0], [0, 0, 1, 0], [0, 0, P53, 1]])
    assert vp == PolyMatrix4([[1, 0, 0, 0], [0, 1, 0, 0], [pt, 0, 1, 0], [0, pt, 0, 1]])
    assert hu == PolyMatrix4([[1, U53, 0, 0], [0, 1, 0, 0], [0, 0, 1, U53], [0, 0, 0, 1]])
    assert vu == PolyMatrix4([[1, 0, ut, 0], [0, 1, 0, ut], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_ns_lifting_cdf53_shapes():
    s = build_nonseparable_lifting(CDF53)
    pred, upd = (x.parts[0] for x in s.steps)
    q = F(1, 4)
    assert pred[3, 0] == P({(0, 0): q, (1, 0): q, (0, 1): q, (1, 1): q})
    pt, ut = P53.transpose(), U53.transpose()
    assert pred == PolyMatrix4([[1, 0, 0, 0], [P53, 1, 0, 0], [pt, 0, 1, 0], [P53 * pt, pt, P53, 1]])
    assert upd == PolyMatrix4([[1, U53, ut, U53 * ut], [0, 1, 0, ut], [0, 0, 1, U53], [0, 0, 0, 1]])


def test_fusion_identity_per_pair():
    for w in (CDF53, CDF97):
        for pair in w.pairs:
            p, u = pair.predict, pair.update
            assert vertical_predict(p) @ horizontal_predict(p) == spatial_predict(p)
            assert vertical_update(u) @ horizontal_update(u) == spatial_update(u)


def test_adapted_cdf53_parts():
    s = build_adapted_nonseparable(CDF53)
    assert len(s.steps) == 2
    pred = s.steps[0]
    p0, p1 = P53.split_constant()
    assert pred.parts == (spatial_predict(p1), horizontal_predict(p0), vertical_predict(p0))
    assert pred.parts[2] @ pred.parts[1] @ pred.parts[0] == spatial_predict(P53)
    for step in s.steps:
        assert all(part.is_constant_only() for part in step.parts[1:])


def test_adapted_without_constant_term_collapses():
    w = WaveletSpec("shift", [LiftingPair(-ZM, P.monomial(-1, 0, F(1, 2)))])
    a = build_adapted_nonseparable(w)
    n = build_nonseparable_lifting(w)
    assert [st_.parts for st_ in a.steps] == [st_.parts for st_ in n.steps]


def test_adapted_with_constant_only_filter():
    w = WaveletSpec("haar", [LiftingPair(P.constant(-1), P.constant(F(1, 2)))])
    a = build_adapted_nonseparable(w)
    assert all(part.is_constant_only() for st_ in a.steps for part in st_.parts)
    assert verify_equivalence(a, build_separable_lifting(w))


def test_sep_conv_cdf53():
    s = build_separable_convolution(CDF53)
    assert len(s.steps) == 2
    up = U53 * P53
    assert s.steps[0].parts[0] == PolyMatrix4(
        [[1 + up, U53, 0, 0], [P53, 1, 0, 0], [0, 0, 1 + up, U53], [0, 0, P53, 1]]
    )


def test_sep_conv_folds_scaling():
    s = build_separable_convolution(CDF97)
    assert len(s.steps) == 2


@pytest.mark.parametrize("a, b", [
    ("sep-lifting", "ns-lifting"),
    ("sep-lifting", "sep-conv"),
    ("sep-lifting", "ns-adapted"),
    ("ns-lifting", "ns-adapted"),
])
def test_equivalent_pairs(a, b):
    for w in (CDF53, CDF97):
        assert verify_equivalence(build(a, w), build(b, w))


def test_mismatch_names_entry():
    v = verify_equivalence(build_separable_lifting(CDF53), build_separable_lifting(CDF97))
    assert not v
    assert v.entry is not None and v.left != v.right
    assert "mismatch" in str(v)


# hand counts: every monomial off the unit diagonal is one multiply-accumulate
def _hand_counts_cdf53():
    lp, lu = P53.term_count(), U53.term_count()
    sep = 2 * lp + 2 * lp + 2 * lu + 2 * lu
    ns = (4 * lp + lp * lp) + (4 * lu + lu * lu)
    # constant part detached: one remaining tap per 1-D filter
    ad = (4 * 1 + 1) + 2 * 2 + (4 * 1 + 1) + 2 * 2
    # N^H: (1 + UP) has 3 taps on each of 2 diagonal entries, plus 2 U and 2 P entries
    conv = 2 * (2 * 3 + 2 * lu + 2 * lp)
    return {"sep-lifting": sep, "ns-lifting": ns, "ns-adapted": ad, "sep-conv": conv}


def test_mac_counts_cdf53():
    hand = _hand_counts_cdf53()
    assert hand == {"sep-lifting": 16, "ns-lifting": 24, "ns-adapted": 18, "sep-conv": 28}
    for name, want in hand.items():
        assert count_ops(build(name, CDF53)).macs_per_quad == want


def test_step_counts():
    want = {
        "cdf53": {"sep-lifting": 4, "ns-lifting": 2, "ns-adapted": 2, "sep-conv": 2},
        "cdf97": {"sep-lifting": 9, "ns-lifting": 5, "ns-adapted": 5, "sep-conv": 2},
    }
    for wname, counts in want.items():
        for name, n in counts.items():
            assert count_ops(build(name, builtin(wname))).steps == n


def test_copies_counted_on_unit_diagonal():
    assert count_ops(build_separable_lifting(CDF53)).copies_per_quad == 16
    # 1 + UP has constant 3/4, not a copy
    assert count_ops(build_separable_convolution(CDF53)).copies_per_quad == 4


@pytest.mark.parametrize("name", SCHEME_NAMES)
@pytest.mark.parametrize("w", [CDF53, CDF97], ids=["cdf53", "cdf97"])
def test_invert(name, w):
    s = build(name, w)
    inv = invert(s)
    assert (inv.total @ s.total).is_identity()
    assert (s.total @ inv.total).is_identity()
    assert invert(inv) == s
    for step in inv.steps:
        assert all(part.is_constant_only() for part in step.parts[1:])


def test_elementary_inverse_negates():
    inv = invert(build_separable_lifting(CDF53))
    assert inv.steps[0].parts[0] == vertical_update(-U53)
    assert inv.steps[-1].parts[0] == horizontal_predict(-P53)


def test_spatial_inverse_is_not_plain_negation():
    inv = spatial_predict(P53).inverse()
    assert inv == spatial_predict(-P53)
    assert inv[3, 0] == P53 * P53.transpose()


def test_singular_matrix_rejected():
    singular = PolyMatrix4.from_entries({(0, 0): ONE + ZM})
    with pytest.raises(SchemeError):
        singular.inverse()
    s = build_separable_lifting(CDF53)
    bad = type(s)("bad", [Step([singular])], CDF53)
    with pytest.raises(SchemeError):
        invert(bad)


def test_composite_step_rejects_neighbour_reads_after_first_part():
    with pytest.raises(SchemeError):
        Step([IDENTITY, horizontal_predict(P53)])


def test_lifting_parts_have_unit_determinant():
    for w in (CDF53, CDF97):
        for name in ("sep-lifting", "ns-lifting", "ns-adapted"):
            for part in build(name, w).matrices():
                if not part.is_diagonal():
                    assert part.is_unit_triangular()
                    assert part.determinant() == ONE


def test_dump_one_line_per_step():
    text = dump(build_nonseparable_lifting(CDF53))
    lines = text.splitlines()
    assert len(lines) == 2
    assert "1/4 +1/4*zm +1/4*zn +1/4*zm*zn" in lines[0]
    assert len(dump(build_adapted_nonseparable(CDF53)).splitlines()[0].split(" ; ")) == 3


def test_mac_ordering_registered():
    for name in available():
        w = builtin(name)
        c = {n: count_ops(s).macs_per_quad for n, s in build_all(w).items()}
        assert c["sep-lifting"] < c["ns-adapted"] < c["ns-lifting"] < c["sep-conv"]


@settings(max_examples=40, deadline=None)
@given(wavelets)
def test_all_builders_equivalent(w):
    schemes = build_all(w)
    base = schemes["sep-lifting"]
    for s in schemes.values():
        assert verify_equivalence(base, s)
    assert count_ops(schemes["sep-lifting"]).steps == 4 * w.K
    assert count_ops(schemes["ns-adapted"]).steps == 2 * w.K
    assert count_ops(schemes["sep-conv"]).steps == 2


@settings(max_examples=15, deadline=None)
@given(wavelets)
def test_random_inverse(w):
    s = build_adapted_nonseparable(w)
    assert (invert(s).total @ s.total).is_identity()
