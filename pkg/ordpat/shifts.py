"""One- and two-sided shifts on N symbols.

Sequences are restricted to eventually periodic ones, stored in canonical
form (primitive period, shortest preperiod): two SymbolSequences are equal
as infinite words exactly when they are equal as Python objects.

Whether a pattern is allowed for the one-sided shift is decided exactly
through the sawtooth map x -> Nx mod 1, whose order patterns are those of
the shift (the base-N expansion is one-to-one and order-preserving). The
structural tools of this module (spiralling patterns, block screening,
explicit witnesses) are checked against that decision in the tests.
"""
import collections
import enum
import functools
import itertools
import json
import logging
import math
import os
import threading

from ordpat.errors import (AlphabetMismatch, BadLength, DuplicateShifts,
                           FamilyDiscrepancy, HypothesisViolated,
                           InternalError, InvalidPattern, InvalidSequence,
                           LengthTooLong, PeriodicCollision, UnknownName)
from ordpat.patterns import Pattern, elementary_predecessors, mirror
from ordpat.plmaps import (DEFAULT_PIECE_CAP, PatternCensus, builtin_map,
                           enumerate_allowed, psi_inverse)

logger = logging.getLogger(__name__)

CENSUS_MEMO_VERSION = 1


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Verdict(enum.Enum):
    ALLOWED = 'allowed'
    FORBIDDEN = 'forbidden'
    RULED_OUT = 'ruled out'
    INCONCLUSIVE = 'inconclusive'

    def __str__(self):
        return self.value


class Family(enum.Enum):
    """Named families of forbidden patterns of the N-shift.

    SPIRAL is the spiralling pattern of length N+2 with segment lengths
    (2, 1, ..., 1); LONG_ROOT builds root patterns of any length L >= N+2
    from two segments of length 2 at the ends; PAIRED_ROOT starts with
    the swapped pairs 1,0,3,2,... and needs L >= 2N.
    """
    SPIRAL = 'spiral'
    LONG_ROOT = 'long-root'
    PAIRED_ROOT = 'paired-root'

    @classmethod
    def parse(cls, name):
        try:
            return cls(name)
        except ValueError:
            raise UnknownName('unknown family: {!r} (expected one of {})'
                              .format(name, ', '.join(f.value for f in cls)))


def _check_symbols(N):
    if N < 2:
        raise InvalidSequence('a shift needs N >= 2 symbols, got {}'.format(N))


def _primitive_root(word):
    size = len(word)
    for d in range(1, size + 1):
        if size % d == 0 and word[:d]*(size//d) == word:
            return word[:d]


def _parse_word(text, N):
    text = text.strip()
    if not text:
        return ()
    try:
        if ',' in text or N > 10:
            return tuple(int(s) for s in text.split(','))
        return tuple(int(s) for s in text)
    except ValueError:
        raise InvalidSequence('cannot parse symbols: ' + repr(text))


@functools.total_ordering
class SymbolSequence:
    """An eventually periodic sequence preperiod . period . period ...

    Args:
        alphabet_size: The number N >= 2 of symbols.
        preperiod: A finite word over {0, ..., N-1}, possibly empty.
        period: A nonempty finite word over {0, ..., N-1}.

    Raises:
        InvalidSequence: bad alphabet size, empty period or symbol out of
            range.
    """
    __slots__ = ('alphabet_size', 'preperiod', 'period')

    def __init__(self, alphabet_size, preperiod, period):
        _check_symbols(alphabet_size)
        preperiod = tuple(int(s) for s in preperiod)
        period = tuple(int(s) for s in period)
        if not period:
            raise InvalidSequence('the period must not be empty')
        if any(not 0 <= s < alphabet_size for s in preperiod + period):
            raise InvalidSequence('symbols must lie in 0..{}'
                                  .format(alphabet_size - 1))
        period = _primitive_root(period)
        while preperiod and preperiod[-1] == period[-1]:
            preperiod = preperiod[:-1]
            period = period[-1:] + period[:-1]
        self.alphabet_size = alphabet_size
        self.preperiod = preperiod
        self.period = period

    @classmethod
    def parse(cls, text, N):
        """Return the sequence written "pre|period", e.g. "201|0".

        Symbols are digits when N <= 10, comma-separated integers
        otherwise ("2,0,11|0").
        """
        if text.count('|') != 1:
            raise InvalidSequence('expected "pre|period", got ' + repr(text))
        pre, period = text.split('|')
        return cls(N, _parse_word(pre, N), _parse_word(period, N))

    def __str__(self):
        sep = ',' if self.alphabet_size > 10 else ''
        return (sep.join(str(s) for s in self.preperiod) + '|'
                + sep.join(str(s) for s in self.period))

    def __repr__(self):
        return 'SymbolSequence({}, {!r})'.format(self.alphabet_size, str(self))

    def __eq__(self, other):
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return ((self.alphabet_size, self.preperiod, self.period)
                == (other.alphabet_size, other.preperiod, other.period))

    def __lt__(self, other):
        return compare_sequences(self, other) is Order.LESS

    def __hash__(self):
        return hash((self.alphabet_size, self.preperiod, self.period))

    def __getitem__(self, n):
        m = len(self.preperiod)
        if n < m:
            return self.preperiod[n]
        return self.period[(n - m) % len(self.period)]

    def prefix(self, n):
        return tuple(self[i] for i in range(n))

    def shift(self, k=1):
        """Return the sequence with its first k symbols dropped."""
        m = len(self.preperiod)
        if k <= m:
            return SymbolSequence(self.alphabet_size, self.preperiod[k:],
                                  self.period)
        r = (k - m) % len(self.period)
        return SymbolSequence(self.alphabet_size, (),
                              self.period[r:] + self.period[:r])

    @property
    def is_excluded(self):
        """True if the sequence ends with N-1 repeated forever."""
        return self.period == (self.alphabet_size - 1,)


def compare_sequences(a, b):
    """Compare two sequences lexicographically.

    Returns:
        Order.LESS, Order.EQUAL or Order.GREATER.

    Raises:
        AlphabetMismatch: the alphabet sizes differ.
    """
    if a.alphabet_size != b.alphabet_size:
        raise AlphabetMismatch('cannot compare sequences over {} and {} '
                               'symbols'.format(a.alphabet_size,
                                                b.alphabet_size))
    depth = (max(len(a.preperiod), len(b.preperiod))
             + len(a.period)*len(b.period)//math.gcd(len(a.period),
                                                     len(b.period)))
    for i in range(depth):
        sa, sb = a[i], b[i]
        if sa != sb:
            return Order.LESS if sa < sb else Order.GREATER
    return Order.EQUAL


def pattern_of_sequence(w, L):
    """Return the order pattern of the shifts w, Sw, ..., S^{L-1}w.

    All shifts of w have a preperiod of at most m symbols and a period of
    p symbols, so they are ordered by their first m+p symbols.

    Raises:
        PeriodicCollision: two of the L shifts are equal.
    """
    if L < 1:
        raise BadLength('pattern length must be positive, got {}'.format(L))
    depth = len(w.preperiod) + len(w.period)
    keys = [tuple(w[i + t] for t in range(depth)) for i in range(L)]
    if len(set(keys)) < L:
        raise PeriodicCollision('{} has two equal shifts among the first {}'
                                .format(w, L))
    return Pattern(sorted(range(L), key=keys.__getitem__))


class Bisequence:
    """A two-sided sequence (left, right).

    The right half holds the symbols of index 0, 1, ...; the left half
    holds the symbols of index -1, -2, ... read outward.
    """
    __slots__ = ('left', 'right')

    def __init__(self, left, right):
        if left.alphabet_size != right.alphabet_size:
            raise AlphabetMismatch('halves over {} and {} symbols'
                                   .format(left.alphabet_size,
                                           right.alphabet_size))
        self.left = left
        self.right = right

    @property
    def alphabet_size(self):
        return self.right.alphabet_size

    @classmethod
    def parse(cls, text, N):
        """Return the bisequence written "LEFT||RIGHT" (or with U+2225)."""
        for sep in ('∥', '||'):
            if sep in text:
                left, right = text.split(sep, 1)
                return cls(SymbolSequence.parse(left, N),
                           SymbolSequence.parse(right, N))
        raise InvalidSequence('expected "left||right", got ' + repr(text))

    def __str__(self):
        return '{}||{}'.format(self.left, self.right)

    def __repr__(self):
        return 'Bisequence({}, {!r})'.format(self.alphabet_size, str(self))

    def __eq__(self, other):
        if not isinstance(other, Bisequence):
            return NotImplemented
        return (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash((self.left, self.right))

    def shift(self, k=1):
        """Return the bisequence translated k steps to the left."""
        moved = tuple(reversed(self.right.prefix(k)))
        left = SymbolSequence(self.alphabet_size,
                              moved + self.left.preperiod, self.left.period)
        return Bisequence(left, self.right.shift(k))


def compare_bisequences(a, b):
    """Compare right halves first, then left halves, lexicographically."""
    verdict = compare_sequences(a.right, b.right)
    if verdict is Order.EQUAL:
        return compare_sequences(a.left, b.left)
    return verdict


def pattern_of_bisequence(w, L):
    """Return the order pattern of the two-sided shifts of w.

    Raises:
        DuplicateShifts: two of the L shifts coincide.
    """
    shifts = [w.shift(k) for k in range(L)]
    if len(set(shifts)) < L:
        raise DuplicateShifts('{} has two equal shifts among the first {}'
                              .format(w, L))
    key = functools.cmp_to_key(lambda i, j: compare_bisequences(shifts[i],
                                                                shifts[j]))
    return Pattern(sorted(range(L), key=key))


class SegmentPartition(tuple):
    """The lengths (h_1, ..., h_D) of consecutive runs of 0, ..., L-1.

    Raises:
        InvalidPattern: fewer than two segments or a nonpositive length.
    """
    __slots__ = ()

    def __new__(cls, lengths):
        lengths = tuple(int(h) for h in lengths)
        if len(lengths) < 2 or min(lengths) < 1:
            raise InvalidPattern('need at least two positive segment lengths,'
                                 ' got {}'.format(lengths))
        return super().__new__(cls, lengths)

    def __repr__(self):
        return 'SegmentPartition({})'.format(tuple(self))

    @property
    def D(self):
        return len(self)

    @property
    def total(self):
        return sum(self)

    @property
    def starts(self):
        """The first entries e_1 = 0, e_2 = h_1, ... of the segments."""
        return tuple(itertools.accumulate((0,) + self[:-1]))

    def segments(self):
        return [list(range(e, e + h)) for e, h in zip(self.starts, self)]


SpiralShape = collections.namedtuple('SpiralShape', ['partition', 'mirrored'])


def spiralling_pattern(part, mirrored=False):
    """Return the spiralling pattern of a segment partition.

    The odd segments are reversed and laid out leftward from the centre,
    the even ones rightward: [... <-p3, <-p1, p2, p4 ...]. The mirrored
    pattern is read backwards.
    """
    part = SegmentPartition(part)
    segments = part.segments()
    entries = []
    for segment in reversed(segments[0::2]):
        entries.extend(reversed(segment))
    for segment in segments[1::2]:
        entries.extend(segment)
    p = Pattern(entries)
    return mirror(p) if mirrored else p


def _runs(values):
    runs = []
    for v in values:
        if runs and v == runs[-1][-1] + 1:
            runs[-1].append(v)
        else:
            runs.append([v])
    return runs


def _normal_lengths(p):
    """Return the segment lengths if p has the normal form, else None."""
    k = p.index(0)
    odd = _runs(reversed(p[:k + 1]))
    even = _runs(p[k + 1:])
    if len(odd) - len(even) not in (0, 1):
        return None
    segments = [run for pair in itertools.zip_longest(odd, even)
                for run in pair if run is not None]
    if [v for run in segments for v in run] != list(range(len(p))):
        return None
    return tuple(len(run) for run in segments)


def parse_spiralling(p):
    """Return the canonical SpiralShape of p, None if p is not spiralling.

    A pattern with h_1 = 1 is also the pattern of opposite orientation in
    which 0 is merged with the second segment; the latter form (h_1 >= 2)
    is returned. Shapes with fewer than two segments are not spiralling.
    """
    p = Pattern(p)
    for candidate, mirrored in ((p, False), (mirror(p), True)):
        lengths = _normal_lengths(candidate)
        if lengths is None:
            continue
        if lengths[0] == 1:
            lengths = (1 + lengths[1],) + lengths[2:]
            mirrored = not mirrored
        if len(lengths) < 2:
            return None
        return SpiralShape(SegmentPartition(lengths), mirrored)
    return None


def classify_spiralling(part, N):
    """Decide whether a spiralling pattern is forbidden for the N-shift.

    With D segments, the pattern (in either orientation) is forbidden iff
    D >= N and h_D >= 2, or D >= N+1 and h_D = 1.

    Raises:
        HypothesisViolated: h_1 < 2; canonicalize with parse_spiralling.
    """
    part = SegmentPartition(part)
    _check_symbols(N)
    if part[0] < 2:
        raise HypothesisViolated('the first segment must have length >= 2, '
                                 'got {}'.format(tuple(part)))
    last = part[-1]
    if (part.D >= N and last >= 2) or (part.D >= N + 1 and last == 1):
        return Verdict.FORBIDDEN
    return Verdict.ALLOWED


ScreenResult = collections.namedtuple('ScreenResult', ['verdict', 'blocks'])


def r4_screen(p, N):
    """Screen p with the rule governing blocks of equal first symbols.

    Within a block of shifts starting with the same symbol, the order of
    two shifts is that of their successors; two entries pi_a, pi_b
    (a < b, both at most L-2) violating this must lie in different
    blocks. Blocks are contiguous in p, so a greedy left-to-right cut
    gives the least number of blocks.

    Returns:
        ScreenResult(verdict, blocks): RULED_OUT when more than N blocks
        are needed (p is then forbidden), INCONCLUSIVE otherwise; blocks
        is the greedy decomposition as a list of tuples.
    """
    p = Pattern(p)
    _check_symbols(N)
    last = len(p) - 2
    position = [0]*len(p)
    for i, v in enumerate(p):
        position[v] = i

    def compatible(u, v):
        return u > last or v > last or position[u + 1] < position[v + 1]

    blocks = [[p[0]]]
    for v in p[1:]:
        if all(compatible(u, v) for u in blocks[-1]):
            blocks[-1].append(v)
        else:
            blocks.append([v])
    blocks = [tuple(block) for block in blocks]
    verdict = Verdict.RULED_OUT if len(blocks) > N else Verdict.INCONCLUSIVE
    return ScreenResult(verdict, blocks)


_CENSUS_MEMO = {}
_CENSUS_LOCK = threading.Lock()


def _memo_path(cache_dir, N, L):
    return os.path.join(cache_dir, 'sawtooth-N{}-L{}.v{}.json'
                        .format(N, L, CENSUS_MEMO_VERSION))


def _load_memo(path):
    try:
        with open(path, 'r') as f:
            return PatternCensus.from_json(json.load(f))
    except (OSError, ValueError, KeyError) as e:
        logger.warning('ignoring census memo %s: %s', path, e)
        return None


def shift_census(N, L, piece_cap=DEFAULT_PIECE_CAP, jobs=1, cache_dir=None):
    """Return the census of the sawtooth map Nx mod 1 at length L.

    Censuses are kept in memory, and in versioned JSON files when
    cache_dir is given. Each census is built once.
    """
    _check_symbols(N)
    key = (N, L)
    with _CENSUS_LOCK:
        census = _CENSUS_MEMO.get(key)
        if census is not None:
            return census
        path = None
        if cache_dir is not None:
            path = _memo_path(cache_dir, N, L)
            if os.path.isfile(path):
                census = _load_memo(path)
                if census is not None:
                    logger.info('census memo hit: %s', path)
        if census is None:
            census = enumerate_allowed(builtin_map('sawtooth', N), L,
                                       piece_cap, jobs)
            if path is not None:
                os.makedirs(cache_dir, exist_ok=True)
                with open(path, 'w') as f:
                    json.dump(census.to_json(), f)
                logger.info('census memo written: %s', path)
        _CENSUS_MEMO[key] = census
        return census


ShiftVerdict = collections.namedtuple('ShiftVerdict', ['allowed', 'witness'])
ShiftVerdict.__bool__ = lambda self: self.allowed


def is_allowed_for_shift(p, N, piece_cap=DEFAULT_PIECE_CAP, jobs=1,
                         cache_dir=None):
    """Decide exactly whether p is realized by the one-sided N-shift.

    Returns:
        ShiftVerdict(allowed, witness), truthy iff allowed. The witness
        is the base-N expansion of an interior point of the realizing set
        of p under Nx mod 1, checked with pattern_of_sequence.
    """
    p = Pattern(p)
    _check_symbols(N)
    L = len(p)
    if L == 1:
        return ShiftVerdict(True, SymbolSequence(N, (), (0,)))
    census = shift_census(N, L, piece_cap, jobs, cache_dir)
    union = census.allowed.get(p)
    if union is None:
        return ShiftVerdict(False, None)
    witness = psi_inverse(union.sample_point(), N)
    if pattern_of_sequence(witness, L) != p:
        raise InternalError('witness {} does not realize {}'.format(witness,
                                                                    p))
    return ShiftVerdict(True, witness)


def _short_witness_digits(p):
    """Return digits over len(p)-1 symbols realizing p, with pi_0 < pi_N."""
    N = len(p) - 1
    w = [0]*(N + 1)
    if p[N] != N or p[0] == 0:
        l = p.index(N if p[N] != N else N - 1)
        for i, v in enumerate(p):
            w[v] = i if i < l else (l - 1 if i == l else i - 1)
        return w + [N - 1, N - 1]
    k = p.index(p[0] - 1)
    for i, v in enumerate(p):
        w[v] = i if i <= k else i - 1
    return w + [N - 1]


def witness_short_pattern(p, N):
    """Return an explicit sequence of type p, for len(p) <= N+1.

    Only the symbols 0, ..., len(p)-2 are used. When pi_0 > pi_{L-1},
    the witness of the reversed pattern is complemented (s -> N'-1-s),
    which reverses the order of all shifts.

    Raises:
        LengthTooLong: len(p) > N+1.
    """
    p = Pattern(p)
    _check_symbols(N)
    L = len(p)
    if L > N + 1:
        raise LengthTooLong('no explicit witness for length {} over {} '
                            'symbols (need L <= N+1)'.format(L, N))
    if L == 1:
        w = SymbolSequence(N, (), (0,))
    elif L == 2:
        w = SymbolSequence(N, (p[0],), (p[1],))
    else:
        flipped = p[0] > p[-1]
        digits = _short_witness_digits(mirror(p) if flipped else p)
        if flipped:
            top = L - 2
            w = SymbolSequence(N, [top - d for d in digits], (top,))
        else:
            w = SymbolSequence(N, digits, (0,))
    if pattern_of_sequence(w, L) != p:
        raise InternalError('constructed witness {} does not realize {}'
                            .format(w, p))
    return w


def is_root_pattern(p, N, piece_cap=DEFAULT_PIECE_CAP, jobs=1,
                    cache_dir=None):
    """Return True if p is forbidden but both its predecessors are allowed."""
    p = Pattern(p)
    if len(p) < 2:
        return False
    options = dict(piece_cap=piece_cap, jobs=jobs, cache_dir=cache_dir)
    if is_allowed_for_shift(p, N, **options):
        return False
    return all(is_allowed_for_shift(q, N, **options)
               for q in elementary_predecessors(p))


def forbidden_patterns(N, L, piece_cap=DEFAULT_PIECE_CAP, jobs=1,
                       cache_dir=None):
    """Return the sorted forbidden patterns of length L of the N-shift."""
    if L < 2:
        return []
    return list(shift_census(N, L, piece_cap, jobs, cache_dir).forbidden)


def root_patterns(N, L, piece_cap=DEFAULT_PIECE_CAP, jobs=1, cache_dir=None):
    """Return the sorted forbidden root patterns of length L."""
    if L < 3:
        return []
    shorter = shift_census(N, L - 1, piece_cap, jobs, cache_dir)
    return [p for p in forbidden_patterns(N, L, piece_cap, jobs, cache_dir)
            if all(q in shorter.allowed for q in elementary_predecessors(p))]


def named_forbidden_family(family, N, L=None, mirrored=False, verify=True,
                           piece_cap=DEFAULT_PIECE_CAP, jobs=1,
                           cache_dir=None):
    """Return a member of a named family of forbidden patterns.

    Args:
        family: A Family, or its name.
        N: The number of symbols.
        L: The pattern length; defaults to the shortest admissible one.
        mirrored: Return the pattern read backwards.
        verify: Check with the exact decision that the result is a root
            pattern.

    Raises:
        BadLength: L outside the range of the family.
        FamilyDiscrepancy: verification failed.
    """
    if not isinstance(family, Family):
        family = Family.parse(family)
    _check_symbols(N)
    if family is Family.SPIRAL:
        L = N + 2 if L is None else L
        if L != N + 2:
            raise BadLength('the spiral family has length N+2={}, got {}'
                            .format(N + 2, L))
        p = spiralling_pattern((2,) + (1,)*N)
    elif family is Family.LONG_ROOT:
        L = N + 2 if L is None else L
        if L < N + 2:
            raise BadLength('the long-root family needs L >= N+2={}, got {}'
                            .format(N + 2, L))
        if N == 2 and L > 4:
            return named_forbidden_family(Family.PAIRED_ROOT, N, L, mirrored,
                                          verify, piece_cap, jobs, cache_dir)
        if N == 2:
            lengths = (2, 2)
        else:
            lengths = (2, L - N - 1) + (1,)*(N - 3) + (2,)
        p = spiralling_pattern(lengths)
    else:
        L = 2*N if L is None else L
        if L < 2*N:
            raise BadLength('the paired-root family needs L >= 2N={}, got {}'
                            .format(2*N, L))
        entries = [v for k in range(N - 1) for v in (2*k + 1, 2*k)]
        entries += list(range(L - 2, 2*N - 3, -1)) + [L - 1]
        p = Pattern(entries)
        logger.warning('the paired-root family is experimental; '
                       'verify=%s', verify)
    if mirrored:
        p = mirror(p)
    if verify and not is_root_pattern(p, N, piece_cap, jobs, cache_dir):
        raise FamilyDiscrepancy('{} family member {} is not a forbidden root '
                                'pattern for N={}'.format(family.value, p, N))
    return p


def sequences(N, preperiod_length, max_period):
    """Yield all SymbolSequences with the given preperiod length and
    period length at most max_period (canonical duplicates included)."""
    for pre in itertools.product(range(N), repeat=preperiod_length):
        for size in range(1, max_period + 1):
            for period in itertools.product(range(N), repeat=size):
                yield SymbolSequence(N, pre, period)


def brute_force_realized(N, L, preperiod_length=None, max_period=2):
    """Return the patterns of length L realized by a bounded family of
    eventually periodic sequences (preperiod L+2 by default)."""
    if preperiod_length is None:
        preperiod_length = L + 2
    realized = set()
    for w in set(sequences(N, preperiod_length, max_period)):
        try:
            realized.add(pattern_of_sequence(w, L))
        except PeriodicCollision:
            pass
    return frozenset(realized)


def twosided_realized(N, L, right_preperiod=None, left_preperiod=2,
                      max_period=2):
    """Return the patterns of length L realized by a bounded family of
    bisequences.

    This is an empirical lower bound on the allowed patterns of the
    two-sided shift; nothing is asserted about the patterns it misses.
    """
    if right_preperiod is None:
        right_preperiod = L + 1
    rights = set(sequences(N, right_preperiod, max_period))
    lefts = set(sequences(N, left_preperiod, 1))
    realized = set()
    for right in rights:
        for left in lefts:
            try:
                realized.add(pattern_of_bisequence(Bisequence(left, right),
                                                   L))
            except DuplicateShifts:
                pass
    logger.info('two-sided %d-shift, length %d: %d patterns realized by '
                '%d bisequences', N, L, len(realized),
                len(rights)*len(lefts))
    return frozenset(realized)
