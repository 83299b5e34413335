"""Exact piecewise-affine self-maps of [0, 1].

All computations are carried out with ``fractions.Fraction``, so that the
realizing sets P_pi of order patterns are obtained as exact unions of
rational intervals. Between two consecutive critical points (breakpoints
of the iterates and crossings f^i(x) = f^j(x)) the order pattern is
constant, so evaluating it at one midpoint per cell is exact.

The logistic map has irrational crossing points and is handled through
its conjugacy with the tent map (see conjugate_endpoints), point orbits
excepted: rationals are closed under x -> 4x(1-x).
"""
import bisect
import collections
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from ordpat.errors import (BadLength, CapExceeded, DuplicateValues,
                           ExcludedPoint, InternalError, InvalidMap,
                           PeriodicCollision, UnknownName)
from ordpat.patterns import Pattern, all_patterns, pattern_of_values

logger = logging.getLogger(__name__)

DEFAULT_PIECE_CAP = 10**6

CONJUGACY_TOLERANCE = 1e-12

BUILTIN_MAPS = ('tent', 'sawtooth')

ZERO = Fraction(0)
ONE = Fraction(1)


def rational_to_text(x):
    """Return the exact "num/den" form of a rational."""
    x = Fraction(x)
    return '{}/{}'.format(x.numerator, x.denominator)


class PLMap:
    """A piecewise-affine map of [0, 1] into itself.

    Piece i is x -> slope_i * x + intercept_i on [c_i, c_{i+1}); the last
    piece also owns x = 1.

    Args:
        breakpoints: Strictly increasing rationals, from 0 to 1.
        pieces: One (slope, intercept) pair per interval.
        name: A label, carried over to censuses.

    Raises:
        InvalidMap: the breakpoints do not partition [0, 1], a slope
            vanishes, or a piece leaves [0, 1].
    """
    __slots__ = ('breakpoints', 'pieces', 'name')

    def __init__(self, breakpoints, pieces, name='f'):
        breakpoints = tuple(Fraction(c) for c in breakpoints)
        pieces = tuple((Fraction(a), Fraction(b)) for a, b in pieces)
        if len(breakpoints) != len(pieces) + 1:
            raise InvalidMap('{} breakpoints for {} pieces'
                             .format(len(breakpoints), len(pieces)))
        if breakpoints[0] != 0 or breakpoints[-1] != 1:
            raise InvalidMap('breakpoints must run from 0 to 1')
        for (c0, c1), (a, b) in zip(zip(breakpoints, breakpoints[1:]),
                                    pieces):
            if not c0 < c1:
                raise InvalidMap('breakpoints must increase strictly')
            if a == 0:
                raise InvalidMap('piece on [{}, {}) is constant'
                                 .format(c0, c1))
            if not (0 <= a*c0 + b <= 1 and 0 <= a*c1 + b <= 1):
                raise InvalidMap('piece on [{}, {}) leaves [0, 1]'
                                 .format(c0, c1))
        self.breakpoints = breakpoints
        self.pieces = pieces
        self.name = name

    def __repr__(self):
        return 'PLMap({!r}, {} pieces)'.format(self.name, len(self.pieces))

    def __eq__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return (self.breakpoints == other.breakpoints
                and self.pieces == other.pieces)

    def __hash__(self):
        return hash((self.breakpoints, self.pieces))

    def __call__(self, x):
        a, b = self.pieces[self.piece_index(x)]
        return a*x + b

    def piece_index(self, x):
        """Return the index of the piece owning x."""
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return min(max(i, 0), len(self.pieces) - 1)


def identity():
    return PLMap((ZERO, ONE), ((ONE, ZERO),), name='identity')


def builtin_map(name, N=None):
    """Return one of the built-in maps.

    Args:
        name: ``'tent'`` (2x on [0, 1/2), 2-2x on [1/2, 1]) or
            ``'sawtooth'`` (Nx mod 1, N pieces).
        N: The number of pieces of the sawtooth map, N >= 2.

    Raises:
        UnknownName: name is not a built-in map.
        InvalidMap: the sawtooth map with N missing or N < 2.
    """
    if name == 'tent':
        half = Fraction(1, 2)
        return PLMap((ZERO, half, ONE), ((2, 0), (-2, 2)), name='tent')
    if name == 'sawtooth':
        if N is None or N < 2:
            raise InvalidMap('the sawtooth map needs N >= 2, got {}'
                             .format(N))
        breakpoints = [Fraction(i, N) for i in range(N + 1)]
        pieces = [(N, -i) for i in range(N)]
        return PLMap(breakpoints, pieces, name='sawtooth{}'.format(N))
    raise UnknownName('unknown map: {!r} (expected one of {})'
                      .format(name, ', '.join(BUILTIN_MAPS)))


def logistic(x):
    """Return 4x(1-x); exact on Fractions."""
    return 4*x*(1 - x)


def rule_by_name(name, N=None):
    """Return the logistic rule or a built-in PLMap, by name."""
    if name == 'logistic':
        return logistic
    return builtin_map(name, N)


def _jumps_at(f, y):
    """Tell whether f is discontinuous at the interior breakpoint y."""
    j = bisect.bisect_left(f.breakpoints, y)
    if not 0 < j < len(f.pieces) or f.breakpoints[j] != y:
        return False
    (s0, t0), (s1, t1) = f.pieces[j - 1], f.pieces[j]
    return s0*y + t0 != s1*y + t1


def compose(outer, inner, piece_cap=DEFAULT_PIECE_CAP, strict=True):
    """Return the PLMap outer o inner.

    The breakpoints of inner are all kept, so that the partition of the
    result refines that of inner.

    A piece of the result takes its value at its left end from the limit
    on the right. Where inner sends that end (or x = 1) onto a jump of
    outer from the wrong side, no PLMap equals outer o inner.

    Args:
        strict: If False, such points are tolerated and the result is
            only right up to its values there; its partition is still
            exact.

    Raises:
        CapExceeded: the result has more than piece_cap pieces.
        InvalidMap: strict and outer o inner is not a PLMap.
    """
    breakpoints = []
    pieces = []
    intervals = zip(inner.breakpoints, inner.breakpoints[1:])
    for (c0, c1), (a, b) in zip(intervals, inner.pieces):
        lo, hi = sorted((a*c0 + b, a*c1 + b))
        cuts = sorted((d - b)/a for d in outer.breakpoints if lo < d < hi)
        xs = [c0] + cuts + [c1]
        for x0, x1 in zip(xs, xs[1:]):
            if a < 0 and _jumps_at(outer, a*x0 + b):
                _one_sided(outer, inner, x0, strict)
            s, t = outer.pieces[outer.piece_index(a*(x0 + x1)/2 + b)]
            breakpoints.append(x0)
            pieces.append((s*a, s*b + t))
        if len(pieces) > piece_cap:
            raise CapExceeded('composition has more than {} pieces'
                              .format(piece_cap))
    a, b = inner.pieces[-1]
    if a > 0 and _jumps_at(outer, a + b):
        _one_sided(outer, inner, ONE, strict)
    breakpoints.append(ONE)
    return PLMap(breakpoints, pieces,
                 name='{} o {}'.format(outer.name, inner.name))


def _one_sided(outer, inner, x, strict):
    msg = ('{} o {} is not piecewise linear with closed-open pieces: {} '
           'lands on a jump of {}'.format(outer.name, inner.name, x,
                                          outer.name))
    if strict:
        raise InvalidMap(msg)
    logger.debug(msg)


def iterate(f, k, piece_cap=DEFAULT_PIECE_CAP, strict=True):
    """Return the k-th iterate f o ... o f of f (the identity if k = 0).

    The partition of f^k refines the partitions of all lower iterates.
    With strict False, see compose.

    Raises:
        BadLength: k < 0.
        CapExceeded: some iterate has more than piece_cap pieces.
        InvalidMap: strict and some iterate is not a PLMap.
    """
    if k < 0:
        raise BadLength('cannot iterate {} times'.format(k))
    g = identity()
    for i in range(k):
        g = compose(f, g, piece_cap, strict)
    if k > 0:
        g.name = '{}^{}'.format(f.name, k)
        logger.debug('%s has %d pieces', g.name, len(g.pieces))
    return g


def orbit(f, x, n):
    """Return the exact orbit x, f(x), ..., f^{n-1}(x) as a list."""
    values = [x]
    for i in range(n - 1):
        values.append(f(values[-1]))
    return values


def orbit_pattern_at(f, x, L):
    """Return the order pattern of length L defined by x under f.

    Args:
        f: A PLMap or any exact rule, e.g. logistic.
        x: A rational (anything Fraction accepts, such as '3/10').
        L: The pattern length.

    Raises:
        PeriodicCollision: two of the first L iterates coincide.
    """
    values = orbit(f, Fraction(x), L)
    try:
        return pattern_of_values(values)
    except DuplicateValues as e:
        raise PeriodicCollision('orbit of {} under {}: {}'
                                .format(x, getattr(f, 'name', f), e))


class IntervalUnion:
    """A finite union of disjoint open rational intervals, sorted."""
    __slots__ = ('intervals',)

    def __init__(self, intervals=()):
        intervals = tuple(sorted((Fraction(a), Fraction(b))
                                 for a, b in intervals))
        for (a0, b0), (a1, b1) in zip(intervals, intervals[1:]):
            if b0 > a1:
                raise InvalidMap('overlapping intervals ({}, {}) and '
                                 '({}, {})'.format(a0, b0, a1, b1))
        self.intervals = intervals

    def __repr__(self):
        return 'IntervalUnion({})'.format(' u '.join(
            '({}, {})'.format(a, b) for a, b in self.intervals))

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __contains__(self, x):
        return any(a < x < b for a, b in self.intervals)

    @property
    def measure(self):
        """The exact total length."""
        return sum((b - a for a, b in self.intervals), ZERO)

    def sample_point(self):
        """Return the midpoint of the first component."""
        a, b = self.intervals[0]
        return (a + b)/2

    def contains_union(self, other):
        """Return True if every component of other lies in a component."""
        return all(any(a <= c and d <= b for a, b in self.intervals)
                   for c, d in other)

    def to_json(self):
        return [[rational_to_text(a), rational_to_text(b)]
                for a, b in self.intervals]

    @classmethod
    def from_json(cls, data):
        return cls((Fraction(a), Fraction(b)) for a, b in data)


class PatternCensus:
    """The realizing sets of all patterns of one length under one map.

    Attributes:
        length: The pattern length L.
        map_name: The name of the map.
        allowed: A dict mapping each realized Pattern to its
            IntervalUnion, in lexicographic order of the patterns.
        forbidden: The sorted tuple of patterns realized by no point.
        ties: The cells where two iterates coincide identically (empty
            for the built-in maps).
    """

    def __init__(self, length, map_name, allowed, ties=None):
        self.length = length
        self.map_name = map_name
        self.allowed = {p: allowed[p] for p in sorted(allowed)}
        self.forbidden = tuple(p for p in all_patterns(length)
                               if p not in self.allowed)
        self.ties = ties if ties is not None else IntervalUnion()

    def __repr__(self):
        return ('PatternCensus({!r}, L={}, {} allowed, {} forbidden)'
                .format(self.map_name, self.length, len(self.allowed),
                        len(self.forbidden)))

    def __eq__(self, other):
        if not isinstance(other, PatternCensus):
            return NotImplemented
        return (self.length == other.length
                and self.map_name == other.map_name
                and self.allowed == other.allowed
                and self.ties == other.ties)

    @property
    def realized(self):
        return frozenset(self.allowed)

    def is_allowed(self, p):
        return Pattern(p) in self.allowed

    def components(self, p):
        """Return the number of components of P_p (0 if forbidden)."""
        return len(self.allowed.get(Pattern(p), ()))

    @property
    def measure(self):
        """Total length of the realizing sets and tie cells."""
        return (sum((u.measure for u in self.allowed.values()), ZERO)
                + self.ties.measure)

    def rows(self):
        """Yield (pattern, left, right), one per interval, by pattern."""
        for p, union in self.allowed.items():
            for a, b in union:
                yield p, a, b

    def to_json(self):
        data = {'length': self.length,
                'map': self.map_name,
                'allowed': [{'pattern': p.to_json(),
                             'intervals': union.to_json()}
                            for p, union in self.allowed.items()],
                'forbidden': [p.to_json() for p in self.forbidden]}
        if self.ties:
            data['ties'] = self.ties.to_json()
        return data

    @classmethod
    def from_json(cls, data):
        allowed = {Pattern(entry['pattern']):
                   IntervalUnion.from_json(entry['intervals'])
                   for entry in data['allowed']}
        census = cls(data['length'], data['map'], allowed,
                     IntervalUnion.from_json(data.get('ties', [])))
        forbidden = tuple(sorted(Pattern(p) for p in data['forbidden']))
        if forbidden != census.forbidden:
            raise InvalidMap('inconsistent census: forbidden list does not '
                             'complement the allowed patterns')
        return census


def _orbit_coefficients(f, x, length):
    """Return the affine forms (a_i, b_i) of f^i on the cell of x."""
    a, b, y = ONE, ZERO, x
    coefficients = [(a, b)]
    for i in range(length - 1):
        s, t = f.pieces[f.piece_index(y)]
        a, b, y = s*a, s*b + t, s*y + t
        coefficients.append((a, b))
    return coefficients


def _split_cells(f, length, cells):
    """Cut the cells of f^{L-1} at crossings and label each part.

    Returns:
        A list of (left, right, pattern) triples; pattern is None on a
        cell where two iterates coincide identically.
    """
    out = []
    for left, right in cells:
        coefficients = _orbit_coefficients(f, (left + right)/2, length)
        cuts = set()
        degenerate = False
        for (ai, bi), (aj, bj) in itertools.combinations(coefficients, 2):
            if ai == aj:
                if bi == bj:
                    degenerate = True
                    break
                continue
            x = (bj - bi)/(ai - aj)
            if left < x < right:
                cuts.add(x)
        if degenerate:
            out.append((left, right, None))
            continue
        xs = [left] + sorted(cuts) + [right]
        for x0, x1 in zip(xs, xs[1:]):
            m = (x0 + x1)/2
            try:
                p = pattern_of_values([a*m + b for a, b in coefficients])
            except DuplicateValues:
                raise InternalError('tie at the midpoint {} of a pattern '
                                    'cell'.format(m))
            out.append((x0, x1, p))
    return out


def _labelled_cells(f, length, piece_cap, jobs):
    # only the partition of f^{L-1} is used; values come from the orbit
    g = iterate(f, length - 1, piece_cap, strict=False)
    cells = list(zip(g.breakpoints, g.breakpoints[1:]))
    logger.info('census of %s at length %d: %d base cells', f.name,
                length, len(cells))
    if jobs > 1 and len(cells) > jobs:
        size = math.ceil(len(cells)/jobs)
        chunks = [cells[i:i + size] for i in range(0, len(cells), size)]
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            parts = executor.map(_split_cells, itertools.repeat(f),
                                 itertools.repeat(length), chunks)
            return list(itertools.chain.from_iterable(parts))
    return _split_cells(f, length, cells)


def critical_points(f, L, piece_cap=DEFAULT_PIECE_CAP):
    """Return the sorted critical points of f at length L.

    These are the breakpoints of f^0, ..., f^{L-1} together with the
    solutions of f^i(x) = f^j(x), 0 <= i < j < L, inside the linearity
    cells of f^{L-1}; 0 and 1 are included.
    """
    if L < 2:
        raise BadLength('critical points need L >= 2, got {}'.format(L))
    cells = _labelled_cells(f, L, piece_cap, jobs=1)
    return [cells[0][0]] + [x1 for x0, x1, p in cells]


def _realizes(f, x, p):
    try:
        return orbit_pattern_at(f, x, len(p)) == p
    except PeriodicCollision:
        return False


def enumerate_allowed(f, L, piece_cap=DEFAULT_PIECE_CAP, jobs=1):
    """Return the exact census of the order patterns of length L under f.

    Adjacent cells with the same pattern are merged when their common
    endpoint realizes that pattern too, so that each P_pi is reported as
    the interior of its realizing set.

    Args:
        f: A PLMap.
        L: The pattern length, L >= 2.
        piece_cap: The largest number of pieces allowed for f^{L-1}.
        jobs: The number of worker processes used to split the cells.

    Returns:
        A PatternCensus.

    Raises:
        BadLength: L < 2.
        CapExceeded: f^{L-1} has more than piece_cap pieces.
    """
    if L < 2:
        raise BadLength('a census needs L >= 2, got {}'.format(L))
    cells = _labelled_cells(f, L, piece_cap, jobs)
    merged = []
    for x0, x1, p in cells:
        if merged:
            y0, y1, q = merged[-1]
            if p is not None and p == q and _realizes(f, x0, p):
                merged[-1] = (y0, x1, q)
                continue
        merged.append((x0, x1, p))
    allowed = collections.defaultdict(list)
    ties = []
    for x0, x1, p in merged:
        if p is None:
            ties.append((x0, x1))
        else:
            allowed[p].append((x0, x1))
    if ties:
        logger.warning('%s has %d cells where two iterates coincide',
                       f.name, len(ties))
    census = PatternCensus(L, f.name,
                           {p: IntervalUnion(v) for p, v in allowed.items()},
                           IntervalUnion(ties))
    if census.measure != 1:
        raise InternalError('census of {} at length {} covers {} instead of 1'
                            .format(f.name, L, census.measure))
    return census


ConjugateCensus = collections.namedtuple(
    'ConjugateCensus', ['length', 'map_name', 'allowed', 'forbidden'])


def conjugacy(x):
    """Return sin^2(pi x/2), the conjugacy from the tent to the logistic map.

    Works elementwise on arrays.
    """
    return np.sin(np.pi*np.asarray(x, dtype=float)/2)**2


def conjugate_endpoints(census, direction='tent_to_logistic'):
    """Map a tent census to the logistic map through the conjugacy.

    The pattern sets are unchanged; endpoints are binary64 numbers,
    accurate to about CONJUGACY_TOLERANCE.

    Returns:
        A ConjugateCensus, whose ``allowed`` maps patterns to lists of
        (left, right) float pairs.

    Raises:
        InvalidMap: the census does not come from the tent map.
    """
    if direction != 'tent_to_logistic':
        raise UnknownName('unknown direction: {!r}'.format(direction))
    if census.map_name != 'tent':
        raise InvalidMap('only tent censuses can be conjugated, got {!r}'
                         .format(census.map_name))
    allowed = {}
    for p, union in census.allowed.items():
        ends = conjugacy([float(x) for interval in union for x in interval])
        allowed[p] = [(float(a), float(b)) for a, b in ends.reshape(-1, 2)]
    return ConjugateCensus(census.length, 'logistic', allowed,
                           census.forbidden)


def coding_word(f, partition, x, n):
    """Return the itinerary of x with respect to a partition of [0, 1].

    Args:
        f: A PLMap or any exact rule.
        partition: Sorted thresholds t_0 < ... < t_m; the cells are
            [t_i, t_{i+1}), the last one closed.
        x: The initial point.
        n: The number of symbols.

    Returns:
        A tuple of n cell indices.
    """
    thresholds = [Fraction(t) for t in partition]
    last = len(thresholds) - 2
    word = []
    for y in orbit(f, Fraction(x), n):
        i = bisect.bisect_right(thresholds, y) - 1
        word.append(min(max(i, 0), last))
    return tuple(word)


def psi_value(w):
    """Return the point of [0, 1] whose base-N digits are the symbols of w.

    Args:
        w: A SymbolSequence over N symbols.

    Raises:
        ExcludedPoint: w ends with an infinite string of N-1.
    """
    if w.is_excluded:
        raise ExcludedPoint('{} ends with (N-1) repeated, N={}'
                            .format(w, w.alphabet_size))
    N = w.alphabet_size
    head = sum((Fraction(s, N**(k + 1)) for k, s in enumerate(w.preperiod)),
               ZERO)
    period = 0
    for s in w.period:
        period = N*period + s
    tail = Fraction(period, N**len(w.period) - 1)
    return head + tail/N**len(w.preperiod)


def psi_inverse(x, N):
    """Return the base-N expansion of a rational x in [0, 1).

    The greedy expansion never ends with an infinite string of N-1.

    Returns:
        A canonical SymbolSequence.

    Raises:
        ExcludedPoint: x lies outside [0, 1).
    """
    from ordpat.shifts import SymbolSequence
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ExcludedPoint('{} has no base-{} expansion in [0, 1)'
                            .format(x, N))
    digits = []
    seen = {}
    while x not in seen:
        seen[x] = len(digits)
        d = math.floor(N*x)
        digits.append(d)
        x = N*x - d
    start = seen[x]
    return SymbolSequence(N, digits[:start], digits[start:])


GrowthProfile = collections.namedtuple('GrowthProfile',
                                       ['lengths', 'counts', 'log_ratios'])


def growth_profile(f, Lmax, piece_cap=DEFAULT_PIECE_CAP, jobs=1):
    """Return the number of allowed patterns of f for L = 2, ..., Lmax.

    The successive differences of the log-counts are empirical estimates
    of the growth rate; no convergence is claimed.

    Raises:
        BadLength: Lmax < 2.
        CapExceeded: via enumerate_allowed.
    """
    if Lmax < 2:
        raise BadLength('growth profile needs Lmax >= 2, got {}'.format(Lmax))
    lengths = list(range(2, Lmax + 1))
    counts = [len(enumerate_allowed(f, L, piece_cap, jobs).allowed)
              for L in lengths]
    log_ratios = np.diff(np.log(np.array(counts, dtype=float)))
    return GrowthProfile(lengths, counts, log_ratios.tolist())
