import numpy as np
import pytest

from conftest import compositions
from ordpat import shifts
from ordpat.errors import (AlphabetMismatch, BadLength, DuplicateShifts,
                           HypothesisViolated, InvalidPattern,
                           InvalidSequence, LengthTooLong,
                           PeriodicCollision, UnknownName)
from ordpat.patterns import (Pattern, all_patterns, elementary_extensions,
                             elementary_predecessors, mirror, outgrowth_set)
from ordpat.shifts import (Bisequence, Family, Order, SegmentPartition,
                           SymbolSequence, Verdict, brute_force_realized,
                           classify_spiralling, compare_bisequences,
                           compare_sequences, forbidden_patterns,
                           is_allowed_for_shift, is_root_pattern,
                           named_forbidden_family, parse_spiralling,
                           pattern_of_bisequence, pattern_of_sequence,
                           r4_screen, root_patterns, shift_census,
                           spiralling_pattern, twosided_realized,
                           witness_short_pattern)

LONG_WORD = SymbolSequence(3, (2, 1, 1, 1, 2, 2, 0, 0, 1, 1, 0, 0, 2, 2, 2, 1),
                           (0,))

SPIRAL_WORD = SymbolSequence(7, (3, 3, 2, 3, 4, 1, 5, 1, 1, 0, 5, 6), (0,))

EXAMPLE_PARTITION = (3, 2, 1, 1, 3, 2)

EXAMPLE_SPIRAL = (9, 8, 7, 5, 2, 1, 0, 3, 4, 6, 10, 11)


def random_sequences(rng, count, N=2):
    """Short random sequences, so that equal pairs are frequent."""
    out = []
    for i in range(count):
        pre = rng.integers(0, N, size=rng.integers(0, 4))
        per = rng.integers(0, N, size=rng.integers(1, 4))
        out.append(SymbolSequence(N, pre, per))
    return out


def allowed(p, N):
    return is_allowed_for_shift(Pattern(p), N).allowed


class TestSymbolSequence:
    """Canonical form, text form and shifts."""

    def test_canonical_form(self):
        assert SymbolSequence(2, (1, 1), (1,)) == SymbolSequence(2, (), (1,))
        w = SymbolSequence(2, (0, 1), (0, 1, 0, 1))
        assert (w.preperiod, w.period) == ((), (0, 1))
        assert hash(w) == hash(SymbolSequence(2, (), (0, 1)))

    def test_invalid(self):
        with pytest.raises(InvalidSequence):
            SymbolSequence(1, (), (0,))
        with pytest.raises(InvalidSequence):
            SymbolSequence(2, (), ())
        with pytest.raises(InvalidSequence):
            SymbolSequence(2, (2,), (0,))

    def test_text_form(self):
        w = SymbolSequence.parse('201|0', 3)
        assert (w.preperiod, w.period) == ((2, 0, 1), (0,))
        assert str(w) == '201|0'
        wide = SymbolSequence.parse('2,0,11|0', 12)
        assert wide.preperiod == (2, 0, 11)
        assert str(wide) == '2,0,11|0'

    def test_parse_rejects_garbage(self):
        with pytest.raises(InvalidSequence):
            SymbolSequence.parse('2010', 3)
        with pytest.raises(InvalidSequence):
            SymbolSequence.parse('2a|0', 3)

    def test_indexing(self):
        w = SymbolSequence(3, (2,), (0, 1))
        assert w.prefix(6) == (2, 0, 1, 0, 1, 0)

    def test_shift(self):
        w = SymbolSequence(3, (2, 0, 1), (0,))
        assert w.shift(1) == SymbolSequence.parse('01|0', 3)
        assert w.shift(5) == SymbolSequence(3, (), (0,))
        periodic = SymbolSequence(2, (), (0, 1))
        assert periodic.shift(1) == SymbolSequence(2, (), (1, 0))
        assert periodic.shift(2) == periodic

    def test_excluded(self):
        assert SymbolSequence(2, (0,), (1,)).is_excluded
        assert not SymbolSequence(3, (0,), (1,)).is_excluded


class TestCompareSequences:

    def test_examples(self):
        a = SymbolSequence(2, (0,), (1,))
        b = SymbolSequence(2, (1, 1), (0,))
        assert compare_sequences(a, b) is Order.LESS
        assert compare_sequences(b, SymbolSequence(2, (1,), (0,))) \
            is Order.GREATER
        assert compare_sequences(a, SymbolSequence(2, (0, 1), (1,))) \
            is Order.EQUAL
        assert a < b

    def test_periods_of_different_lengths(self):
        a = SymbolSequence(2, (), (0, 1))
        b = SymbolSequence(2, (), (0, 1, 1))
        assert compare_sequences(a, b) is Order.LESS

    def test_alphabets(self):
        with pytest.raises(AlphabetMismatch):
            compare_sequences(SymbolSequence(2, (), (0,)),
                              SymbolSequence(3, (), (0,)))

    @pytest.mark.parametrize('cases', [
        10**4,
        pytest.param(10**5, marks=pytest.mark.slow),
    ])
    def test_total_order(self, cases):
        rng = np.random.default_rng(20240611)
        for i in range(cases):
            a, b, c = random_sequences(rng, 3)
            ab = compare_sequences(a, b)
            bc = compare_sequences(b, c)
            ac = compare_sequences(a, c)
            assert compare_sequences(b, a) == -ab, f"{a} {b}"
            assert (ab is Order.EQUAL) == (a == b), f"{a} {b}"
            if ab <= 0 and bc <= 0:
                assert ac <= 0, f"{a} {b} {c}"
                assert (ac is Order.EQUAL) == (ab == bc == 0), \
                    f"{a} {b} {c}"

    def test_pattern_agrees_with_order(self):
        rng = np.random.default_rng(7)
        for i in range(2000):
            pre = rng.integers(0, 3, size=rng.integers(0, 7))
            per = rng.integers(0, 3, size=rng.integers(1, 5))
            w = SymbolSequence(3, pre, per)
            L = int(rng.integers(2, 9))
            try:
                p = pattern_of_sequence(w, L)
            except PeriodicCollision:
                assert len({w.shift(k) for k in range(L)}) < L, f"{w}"
                continue
            for k in range(L - 1):
                assert compare_sequences(w.shift(p[k]), w.shift(p[k + 1])) \
                    is Order.LESS, f"{w}, L={L}: {p}"


class TestPatternOfSequence:

    def test_long_word(self):
        assert pattern_of_sequence(LONG_WORD, 14) == \
            (6, 10, 7, 11, 9, 8, 1, 2, 3, 5, 0, 4, 13, 12)
        # the tail is never reached
        other = SymbolSequence(3, LONG_WORD.preperiod, (2,))
        assert pattern_of_sequence(other, 14) == \
            pattern_of_sequence(LONG_WORD, 14)

    def test_spiral_word(self):
        assert pattern_of_sequence(SPIRAL_WORD, 12) == EXAMPLE_SPIRAL

    def test_periodic_orbit(self):
        w = SymbolSequence(2, (), (0, 1))
        assert pattern_of_sequence(w, 2) == (0, 1)
        with pytest.raises(PeriodicCollision):
            pattern_of_sequence(w, 3)

    def test_fixed_point(self):
        with pytest.raises(PeriodicCollision):
            pattern_of_sequence(SymbolSequence(2, (), (0,)), 2)

    def test_bad_length(self):
        with pytest.raises(BadLength):
            pattern_of_sequence(LONG_WORD, 0)


class TestBisequence:

    def test_text_form(self):
        w = Bisequence.parse('1|0||01|1', 2)
        assert str(w) == '1|0||01|1'
        assert Bisequence.parse('1|0∥01|1', 2) == w

    def test_shift(self):
        w = Bisequence.parse('|0||10|1', 2)
        assert w.shift(1) == Bisequence.parse('1|0||0|1', 2)
        assert w.shift(2) == Bisequence.parse('01|0|||1', 2)

    def test_right_half_first(self):
        a = Bisequence.parse('|1||0|1', 2)
        b = Bisequence.parse('|0||1|0', 2)
        assert compare_bisequences(a, b) is Order.LESS

    def test_left_half_breaks_ties(self):
        a = Bisequence.parse('1|0||0|1', 2)
        b = Bisequence.parse('|0||0|1', 2)
        assert compare_bisequences(a, b) is Order.GREATER
        assert compare_bisequences(a, a) is Order.EQUAL

    def test_left_half_decides_constant_right(self):
        assert pattern_of_bisequence(Bisequence.parse('|1||0', 2), 2) \
            == (1, 0)
        assert pattern_of_bisequence(Bisequence.parse('|0||1', 2), 2) \
            == (0, 1)

    def test_duplicate_shifts(self):
        with pytest.raises(DuplicateShifts):
            pattern_of_bisequence(Bisequence.parse('|0||0', 2), 2)

    def test_agrees_with_right_half(self):
        w = Bisequence(SymbolSequence(3, (2,), (1,)), LONG_WORD)
        assert pattern_of_bisequence(w, 14) == \
            pattern_of_sequence(LONG_WORD, 14)


class TestSpiralling:

    def test_example(self):
        assert spiralling_pattern(EXAMPLE_PARTITION) == EXAMPLE_SPIRAL
        assert spiralling_pattern(EXAMPLE_PARTITION, mirrored=True) == \
            mirror(Pattern(EXAMPLE_SPIRAL))

    def test_small(self):
        assert spiralling_pattern((1, 1)) == (0, 1)
        assert spiralling_pattern((1, 1), mirrored=True) == (1, 0)
        assert spiralling_pattern((2, 1, 1)) == (3, 1, 0, 2)
        assert spiralling_pattern((2, 1, 1, 1, 1)) == (5, 3, 1, 0, 2, 4)

    def test_partition(self):
        part = SegmentPartition(EXAMPLE_PARTITION)
        assert (part.D, part.total) == (6, 12)
        assert part.starts == (0, 3, 5, 6, 7, 10)
        with pytest.raises(InvalidPattern):
            SegmentPartition((3,))

    def test_parse_example(self):
        shape = parse_spiralling(Pattern(EXAMPLE_SPIRAL))
        assert shape.partition == EXAMPLE_PARTITION
        assert not shape.mirrored

    def test_parse_not_spiralling(self):
        assert parse_spiralling(Pattern([2, 0, 3, 1])) is None
        # a single segment
        assert parse_spiralling(Pattern([2, 1, 0])) is None

    def test_parse_short_first_segment(self):
        p = spiralling_pattern((1, 2, 1))
        assert p == (3, 0, 1, 2)
        shape = parse_spiralling(p)
        assert shape == ((3, 1), True)
        assert spiralling_pattern(*shape) == p

    def test_round_trip(self):
        for L in range(3, 9):
            for part in compositions(L, first_min=2):
                for mirrored in (False, True):
                    p = spiralling_pattern(part, mirrored)
                    assert parse_spiralling(p) == (part, mirrored), \
                        f"{part}, mirrored={mirrored}"


class TestClassifySpiralling:

    def test_example(self):
        assert classify_spiralling(EXAMPLE_PARTITION, 6) is Verdict.FORBIDDEN
        assert classify_spiralling(EXAMPLE_PARTITION, 7) is Verdict.ALLOWED

    def test_short_last_segment(self):
        assert classify_spiralling((2, 1, 1), 2) is Verdict.FORBIDDEN
        assert classify_spiralling((2, 1, 1), 3) is Verdict.ALLOWED

    def test_two_segments(self):
        assert classify_spiralling((2, 2), 2) is Verdict.FORBIDDEN
        assert classify_spiralling((2, 2), 3) is Verdict.ALLOWED

    def test_hypothesis(self):
        with pytest.raises(HypothesisViolated):
            classify_spiralling((1, 2), 2)

    @pytest.mark.parametrize('N', [2, 3, 4])
    def test_agrees_with_exact_decision(self, N):
        for L in range(3, 7):
            for part in compositions(L, first_min=2):
                expected = classify_spiralling(part, N) is Verdict.ALLOWED
                for mirrored in (False, True):
                    p = spiralling_pattern(part, mirrored)
                    assert allowed(p, N) == expected, \
                        f"N={N}, {part}, mirrored={mirrored}"

    @pytest.mark.slow
    @pytest.mark.parametrize('N', [2, 3, 4])
    def test_agrees_with_exact_decision_long(self, N):
        for L in (7, 8):
            for part in compositions(L, first_min=2):
                expected = classify_spiralling(part, N) is Verdict.ALLOWED
                for mirrored in (False, True):
                    p = spiralling_pattern(part, mirrored)
                    assert allowed(p, N) == expected, \
                        f"N={N}, {part}, mirrored={mirrored}"


class TestScreen:

    def test_ruled_out(self):
        result = r4_screen(Pattern([3, 1, 0, 2]), 2)
        assert result.verdict is Verdict.RULED_OUT
        assert result.blocks == [(3, 1), (0,), (2,)]

    def test_inconclusive(self):
        assert r4_screen(Pattern([2, 1, 0]), 2).verdict is \
            Verdict.INCONCLUSIVE
        result = r4_screen(Pattern([0, 1, 2, 3]), 2)
        assert result.blocks == [(0, 1, 2, 3)]

    @pytest.mark.parametrize('N', [2, 3])
    def test_sound(self, N):
        for L in range(2, 7):
            census = shift_census(N, L)
            for p in all_patterns(L):
                if r4_screen(p, N).verdict is Verdict.RULED_OUT:
                    assert p not in census.allowed, f"{p} ruled out, N={N}"


class TestExactDecision:

    def test_forbidden_example(self):
        verdict = is_allowed_for_shift(Pattern([3, 1, 0, 2]), 2)
        assert not verdict
        assert verdict.witness is None

    def test_witness(self):
        verdict = is_allowed_for_shift(Pattern([2, 1, 0]), 2)
        assert verdict
        assert pattern_of_sequence(verdict.witness, 3) == (2, 1, 0)

    def test_trivial_length(self):
        assert is_allowed_for_shift(Pattern([0]), 2)

    @pytest.mark.parametrize('N', [2, 3, 4])
    def test_short_patterns_allowed(self, N):
        for L in range(2, N + 2):
            for p in all_patterns(L):
                verdict = is_allowed_for_shift(p, N)
                assert verdict, f"{p} should be allowed for N={N}"
                assert pattern_of_sequence(verdict.witness, L) == p

    def test_mirror_symmetry(self):
        for L in range(2, 6):
            census = shift_census(2, L)
            for p in all_patterns(L):
                assert (p in census.allowed) == (mirror(p) in census.allowed)

    def test_outgrowths_of_forbidden(self):
        out = outgrowth_set(Pattern([3, 1, 0, 2]), 5)
        assert not any(allowed(s, 2) for s in out)

    def test_extension_converse(self):
        for L in range(2, 6):
            longer = shift_census(2, L + 1)
            for p in all_patterns(L):
                group_a = elementary_extensions(p)[:L + 1]
                if not any(e in longer.allowed for e in group_a):
                    assert not allowed(p, 2), f"{p} has no allowed extension"

    def test_listing(self):
        forbidden = forbidden_patterns(2, 4)
        assert (3, 1, 0, 2) in forbidden
        assert forbidden == sorted(forbidden)
        assert forbidden_patterns(2, 1) == []
        roots = root_patterns(2, 4)
        assert set(roots) >= {(3, 1, 0, 2), (2, 0, 1, 3)}
        assert all(is_root_pattern(p, 2) for p in roots)

    def test_memo_file(self, tmp_path, monkeypatch):
        monkeypatch.setattr(shifts, '_CENSUS_MEMO', {})
        census = shift_census(2, 3, cache_dir=str(tmp_path))
        path = tmp_path / 'sawtooth-N2-L3.v1.json'
        assert path.is_file()
        monkeypatch.setattr(shifts, '_CENSUS_MEMO', {})
        assert shift_census(2, 3, cache_dir=str(tmp_path)) == census

    def test_corrupt_memo_file(self, tmp_path, monkeypatch):
        monkeypatch.setattr(shifts, '_CENSUS_MEMO', {})
        (tmp_path / 'sawtooth-N2-L3.v1.json').write_text('{')
        assert len(shift_census(2, 3, cache_dir=str(tmp_path)).allowed) == 6


class TestShortWitness:

    def test_example(self):
        w = witness_short_pattern(Pattern([0, 1, 2]), 2)
        assert w.prefix(3) == (0, 0, 1)

    def test_small_lengths(self):
        assert pattern_of_sequence(witness_short_pattern(Pattern([1, 0]), 2),
                                   2) == (1, 0)
        assert witness_short_pattern(Pattern([0]), 2) is not None

    @pytest.mark.parametrize('N', [2, 3, 4])
    def test_all_short_patterns(self, N):
        for L in range(2, N + 2):
            for p in all_patterns(L):
                w = witness_short_pattern(p, N)
                assert pattern_of_sequence(w, L) == p, f"{p}: {w}"
                if L > 2:
                    assert max(w.preperiod + w.period) <= L - 2

    def test_too_long(self):
        with pytest.raises(LengthTooLong):
            witness_short_pattern(Pattern([0, 1, 2, 3]), 2)


class TestRoots:

    def test_extensions_are_not_roots(self):
        for e in elementary_extensions(Pattern([3, 1, 0, 2])):
            assert not is_root_pattern(e, 2), f"{e}"

    def test_allowed_is_not_root(self):
        assert not is_root_pattern(Pattern([2, 1, 0]), 2)

    def test_spiral_root(self):
        assert is_root_pattern(Pattern([3, 1, 0, 2]), 2)


class TestFamilies:

    def test_spiral(self):
        assert named_forbidden_family(Family.SPIRAL, 2) == (3, 1, 0, 2)
        assert named_forbidden_family('spiral', 3) == (3, 1, 0, 2, 4)
        with pytest.raises(BadLength):
            named_forbidden_family(Family.SPIRAL, 2, L=5, verify=False)

    def test_long_root(self):
        assert named_forbidden_family(Family.LONG_ROOT, 2, 4) == (1, 0, 2, 3)
        assert named_forbidden_family(Family.LONG_ROOT, 3, 5) == \
            (4, 3, 1, 0, 2)
        assert named_forbidden_family(Family.LONG_ROOT, 3, 6) == \
            (5, 4, 1, 0, 2, 3)

    def test_long_root_delegates_for_two_symbols(self):
        assert named_forbidden_family(Family.LONG_ROOT, 2, 5) == \
            (1, 0, 3, 2, 4)

    def test_paired_root(self):
        assert named_forbidden_family(Family.PAIRED_ROOT, 2) == (1, 0, 2, 3)
        with pytest.raises(BadLength):
            named_forbidden_family(Family.PAIRED_ROOT, 3, 5, verify=False)

    @pytest.mark.parametrize('N, L, expected', [
        (3, 6, (1, 0, 3, 2, 4, 5)),
        (3, 7, (1, 0, 3, 2, 5, 4, 6)),
        pytest.param(4, 8, (1, 0, 3, 2, 5, 4, 6, 7),
                     marks=pytest.mark.slow),
    ])
    def test_paired_root_is_root(self, N, L, expected):
        p = named_forbidden_family(Family.PAIRED_ROOT, N, L, verify=False)
        assert p == expected
        assert is_root_pattern(p, N)

    def test_mirrored(self):
        p = named_forbidden_family(Family.SPIRAL, 2, mirrored=True)
        assert p == (2, 0, 1, 3)

    def test_unknown(self):
        with pytest.raises(UnknownName):
            named_forbidden_family('helix', 2)

    @pytest.mark.parametrize('N', [2, 3])
    def test_roots(self, N):
        assert is_root_pattern(named_forbidden_family(Family.SPIRAL, N,
                                                      verify=False), N)
        for L in range(N + 2, N + 5):
            p = named_forbidden_family(Family.LONG_ROOT, N, L, verify=False)
            assert is_root_pattern(p, N), f"N={N}, L={L}: {p}"
            assert is_root_pattern(mirror(p), N)


class TestOracles:

    @pytest.mark.parametrize('N, L', [(2, 3), (2, 4), (2, 5), (3, 3),
                                      (3, 4)])
    def test_brute_force(self, N, L):
        exact = shift_census(N, L).realized
        for preperiod_length in (L + 2, L + 4):
            realized = brute_force_realized(N, L, preperiod_length)
            assert realized <= exact
            if realized == exact:
                break
        assert realized == exact, f"missed: {sorted(exact - realized)}"

    @pytest.mark.slow
    def test_brute_force_long(self):
        exact = shift_census(3, 5).realized
        assert brute_force_realized(3, 5) <= exact
        assert brute_force_realized(3, 5, 9) == exact

    def test_predecessors_of_allowed(self):
        for L in range(3, 6):
            shorter = shift_census(2, L - 1)
            for p in shift_census(2, L).allowed:
                for q in elementary_predecessors(p):
                    assert q in shorter.allowed

    def test_twosided_contains_onesided(self):
        for L in range(2, 5):
            both = twosided_realized(2, L, right_preperiod=L + 2)
            assert shift_census(2, L).realized <= both, f"L={L}"

    def test_twosided_all_of_length_3(self):
        realized = twosided_realized(2, 3, right_preperiod=5)
        assert realized == frozenset(all_patterns(3))
