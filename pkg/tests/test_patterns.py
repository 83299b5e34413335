import itertools
import math
from fractions import Fraction

import pytest

from ordpat.errors import (CapExceeded, DuplicateValues, InvalidPattern,
                           LengthMismatch)
from ordpat.patterns import (Pattern, all_patterns, contains_consecutive,
                             elementary_extensions, elementary_predecessors,
                             invert, is_outgrowth, mirror,
                             outgrowth_lower_bound, outgrowth_set,
                             outgrowth_upper_bound, pattern_of_values)

EXAMPLE_OUTGROWTHS = {(3, 2, 1, 0), (2, 3, 1, 0), (2, 1, 3, 0), (2, 1, 0, 3),
                      (0, 3, 2, 1), (3, 0, 2, 1), (3, 2, 0, 1)}


class TestPattern:
    """Construction, text form and ordering."""

    def test_rejects_non_permutations(self):
        for entries in ([], [1, 2], [0, 0], [0, 2]):
            with pytest.raises(InvalidPattern):
                Pattern(entries)

    def test_text_form(self):
        p = Pattern.parse('[2,1,0]')
        assert p == (2, 1, 0)
        assert str(p) == '[2,1,0]'
        assert Pattern.parse(' 2, 1 ,0 ') == p
        assert p.to_json() == [2, 1, 0]

    def test_parse_rejects_garbage(self):
        with pytest.raises(InvalidPattern):
            Pattern.parse('[2;1;0]')

    def test_all_patterns_sorted(self):
        patterns = all_patterns(4)
        assert len(patterns) == 24
        assert patterns == sorted(patterns)


class TestPatternOfValues:

    def test_rationals(self):
        xs = [Fraction(1, 5), Fraction(2, 5), Fraction(4, 5), Fraction(3, 5)]
        assert pattern_of_values(xs) == (0, 1, 3, 2)

    def test_singleton(self):
        assert pattern_of_values([5]) == (0,)

    def test_logistic_orbit(self):
        xs = [Fraction(3, 10), Fraction(21, 25), Fraction(336, 625)]
        assert pattern_of_values(xs) == (0, 2, 1)

    def test_ties(self):
        with pytest.raises(DuplicateValues):
            pattern_of_values([1, 3, 1])


class TestInvertMirror:

    def test_invert(self):
        assert invert(Pattern([2, 0, 1])) == (1, 2, 0)
        assert invert(Pattern([4, 2, 1, 5, 3, 0])) == (5, 2, 1, 4, 0, 3)
        assert invert(Pattern([0, 1, 2])) == (0, 1, 2)

    def test_mirror(self):
        assert mirror(Pattern([3, 1, 0, 2])) == (2, 0, 1, 3)
        assert mirror(Pattern([0, 1])) == (1, 0)

    def test_involutions(self):
        for L in range(1, 8):
            for p in map(Pattern, itertools.permutations(range(L))):
                assert invert(invert(p)) == p, f"invert fails on {p}"
                assert mirror(mirror(p)) == p, f"mirror fails on {p}"

    @pytest.mark.slow
    def test_involutions_length_8(self):
        for p in all_patterns(8):
            assert invert(invert(p)) == p
            assert mirror(mirror(p)) == p


class TestContainsConsecutive:

    def test_match_position(self):
        found = contains_consecutive(Pattern([5, 2, 1, 4, 0, 3]),
                                     Pattern([1, 2, 0]))
        assert found
        assert found.position == 2

    def test_self(self):
        p = Pattern([3, 0, 2, 1])
        assert contains_consecutive(p, p).position == 0

    def test_no_match(self):
        found = contains_consecutive(Pattern([0, 1, 2, 3]), Pattern([1, 0]))
        assert not found
        assert found.position is None

    def test_too_long(self):
        with pytest.raises(LengthMismatch):
            contains_consecutive(Pattern([0, 1]), Pattern([0, 1, 2]))


class TestOutgrowth:

    def test_examples(self):
        assert is_outgrowth(Pattern([4, 2, 1, 5, 3, 0]), Pattern([2, 0, 1]))
        assert is_outgrowth(Pattern([3, 2, 1, 0]), Pattern([2, 1, 0]))
        assert not is_outgrowth(Pattern([0, 1, 3, 2]), Pattern([2, 1, 0]))

    def test_not_longer(self):
        with pytest.raises(LengthMismatch):
            is_outgrowth(Pattern([0, 1]), Pattern([1, 0]))

    def test_decreasing_pattern(self):
        assert outgrowth_set(Pattern([2, 1, 0]), 4) == EXAMPLE_OUTGROWTHS

    def test_ascent(self):
        expected = {p for p in all_patterns(3) if p != (2, 1, 0)}
        assert outgrowth_set(Pattern([0, 1]), 3) == expected

    def test_bound_instance(self):
        out = outgrowth_set(Pattern([2, 1, 0]), 5)
        assert len(out) <= outgrowth_upper_bound(3, 5) == 180

    def test_filter_definition(self):
        for L in (2, 3):
            for pi in all_patterns(L):
                for M in range(L + 1, 7):
                    expected = {s for s in all_patterns(M)
                                if is_outgrowth(s, pi)}
                    out = outgrowth_set(pi, M)
                    assert out == expected, f"pi={pi}, M={M}"
                    assert (outgrowth_lower_bound(L, M) <= len(out)
                            <= outgrowth_upper_bound(L, M)), \
                        f"pi={pi}, M={M}: {len(out)} outside the bounds"

    def test_cap(self):
        with pytest.raises(CapExceeded):
            outgrowth_set(Pattern([2, 1, 0]), 10)

    def test_construction_matches_filter(self):
        for pi in all_patterns(3):
            built = outgrowth_set(pi, 6, cap=5, construct=True)
            assert built == outgrowth_set(pi, 6), f"pi={pi}"

    def test_workers(self):
        pi = Pattern([1, 0, 2])
        assert outgrowth_set(pi, 6, jobs=2) == outgrowth_set(pi, 6, jobs=1)

    def test_transitivity(self):
        for pi in all_patterns(2) + all_patterns(3):
            taus = [t for t in all_patterns(4) if is_outgrowth(t, pi)]
            for sigma in all_patterns(5):
                if any(is_outgrowth(sigma, t) for t in taus):
                    assert is_outgrowth(sigma, pi), f"{sigma} over {pi}"

    @pytest.mark.slow
    def test_transitivity_length_6(self):
        for pi in all_patterns(3):
            for tau in all_patterns(4) + all_patterns(5):
                if not is_outgrowth(tau, pi):
                    continue
                for sigma in outgrowth_set(tau, 6):
                    assert is_outgrowth(sigma, pi), f"{sigma} over {pi}"

    def test_trend(self):
        pi = Pattern([2, 1, 0])
        ratios = [Fraction(len(outgrowth_set(pi, M)), math.factorial(M))
                  for M in range(4, 8)]
        assert ratios == sorted(ratios), f"ratios not monotone: {ratios}"

    @pytest.mark.slow
    def test_trend_up_to_9(self):
        pi = Pattern([2, 1, 0])
        ratios = [Fraction(len(outgrowth_set(pi, M, jobs=2)),
                           math.factorial(M)) for M in range(4, 10)]
        assert ratios == sorted(ratios), f"ratios not monotone: {ratios}"


class TestElementary:

    def test_extensions_of_decreasing(self):
        ext = elementary_extensions(Pattern([2, 1, 0]))
        assert ext == [(3, 2, 1, 0), (2, 3, 1, 0), (2, 1, 3, 0), (2, 1, 0, 3),
                       (0, 3, 2, 1), (3, 0, 2, 1), (3, 2, 0, 1), (3, 2, 1, 0)]

    def test_extensions_of_singleton(self):
        assert elementary_extensions(Pattern([0])) == [(1, 0), (0, 1),
                                                       (0, 1), (1, 0)]

    def test_extensions_are_the_next_outgrowths(self):
        for L in range(1, 6):
            for pi in all_patterns(L):
                ext = elementary_extensions(pi)
                assert len(ext) == 2*(L + 1)
                assert all(is_outgrowth(e, pi) for e in ext)
                assert set(ext) == outgrowth_set(pi, L + 1), f"pi={pi}"

    def test_predecessors(self):
        assert elementary_predecessors(Pattern([3, 1, 0, 2])) == ((1, 0, 2),
                                                                  (2, 0, 1))
        assert elementary_predecessors(Pattern([3, 2, 1, 0])) == ((2, 1, 0),
                                                                  (2, 1, 0))

    def test_round_trip(self):
        for sigma in all_patterns(4):
            for q in elementary_predecessors(sigma):
                assert sigma in elementary_extensions(q)

    def test_predecessors_of_singleton(self):
        with pytest.raises(LengthMismatch):
            elementary_predecessors(Pattern([0]))


class TestBounds:

    def test_upper(self):
        assert outgrowth_upper_bound(3, 4) == 48
        assert outgrowth_upper_bound(3, 3) == 6

    def test_upper_domain(self):
        with pytest.raises(LengthMismatch):
            outgrowth_upper_bound(1, 3)

    def test_lower(self):
        assert outgrowth_lower_bound(3, 4) == 4
        assert outgrowth_lower_bound(3, 3) == 0
        assert len(outgrowth_set(Pattern([2, 1, 0]), 4)) == 7 <= 48
