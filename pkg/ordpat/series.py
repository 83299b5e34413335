"""Ordinal analysis of finite series.

Windows of L consecutive values are mapped to their order pattern (the
time indices sorted by increasing value); windows with repeated values
are counted as ties and never assigned a pattern. Missing patterns are
compared with those of i.i.d. uniform series of the same length, which
gives a heuristic hint of determinism, not a test with a threshold.

Random numbers come from numpy's SFC64 generator. Its seed sequence is
built from four 64-bit words obtained by running splitmix64 from the
user seed, with the trial index as spawn key, so that outputs depend on
(seed, trial) only.
"""
import collections
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ordpat.errors import (BadLength, BadSeries, BadStochasticVector,
                           DuplicatePoints, DuplicateValues, NonStationary,
                           UnknownName, WindowTooLong)
from ordpat.patterns import Pattern, pattern_of_values
from ordpat.plmaps import rule_by_name

logger = logging.getLogger(__name__)

MASK64 = 2**64 - 1

STATIONARITY_TOLERANCE = 1e-12

MODELS = ('bernoulli', 'markov', 'map_orbit', 'baker_orbit')


def as_series(values):
    """Return values as a 1-D float array, rejecting NaN and infinities."""
    try:
        s = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise BadSeries('not a series of numbers: {}'.format(e))
    if s.ndim != 1 or s.size == 0:
        raise BadSeries('expected a nonempty 1-D series, got shape {}'
                        .format(s.shape))
    if not np.all(np.isfinite(s)):
        raise BadSeries('series contains NaN or infinite values')
    return s


def load_series(path):
    """Read one value per line (plain text or single-column CSV).

    Blank lines and lines starting with ``#`` are skipped, as is a
    non-numeric first line (CSV header).
    """
    values = []
    with open(path, 'r') as f:
        for number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            fields = line.split(',')
            if len(fields) != 1:
                raise BadSeries('{}:{}: expected a single column'
                                .format(path, number))
            try:
                values.append(float(fields[0]))
            except ValueError:
                if values or number > 1:
                    raise BadSeries('{}:{}: not a number: {!r}'
                                    .format(path, number, fields[0]))
    logger.info('read %d values from %s', len(values), path)
    return as_series(values)


class CensusReport:
    """Pattern counts of the windows of a series.

    Attributes:
        length: The window length L.
        counts: A dict mapping observed Patterns to their counts.
        ties: The number of windows with repeated values.
        windows: The total number n-L+1 of windows.
    """

    def __init__(self, length, counts, ties, windows):
        self.length = length
        self.counts = {p: counts[p] for p in sorted(counts)}
        self.ties = ties
        self.windows = windows

    def __repr__(self):
        return ('CensusReport(L={}, {} windows, {} observed, {} missing)'
                .format(self.length, self.windows, len(self.counts),
                        self.missing_count))

    def __add__(self, other):
        if self.length != other.length:
            raise BadLength('cannot add censuses of lengths {} and {}'
                            .format(self.length, other.length))
        counts = collections.Counter(self.counts)
        counts.update(other.counts)
        return CensusReport(self.length, counts, self.ties + other.ties,
                            self.windows + other.windows)

    def count(self, p):
        return self.counts.get(Pattern(p), 0)

    @property
    def missing(self):
        """The patterns of length L never observed, in lexicographic order."""
        return [Pattern(p)
                for p in itertools.permutations(range(self.length))
                if p not in self.counts]

    @property
    def missing_count(self):
        return math.factorial(self.length) - len(self.counts)

    def to_json(self):
        return {'length': self.length,
                'windows': self.windows,
                'ties': self.ties,
                'counts': {str(p): n for p, n in self.counts.items()},
                'missing': [p.to_json() for p in self.missing]}


def _check_window(n, L):
    if L < 2:
        raise BadLength('window length must be at least 2, got {}'.format(L))
    if L > n:
        raise WindowTooLong('window length {} exceeds series length {}'
                            .format(L, n))


def ordinal_census(s, L):
    """Count the order patterns of the windows of length L of s.

    Raises:
        BadSeries: s is empty or contains non-finite values.
        WindowTooLong: L > len(s).
    """
    s = as_series(s)
    _check_window(s.size, L)
    windows = sliding_window_view(s, L)
    order = np.argsort(windows, axis=1, kind='stable')
    ranked = np.take_along_axis(windows, order, axis=1)
    tied = np.any(np.diff(ranked, axis=1) == 0, axis=1)
    ties = int(np.count_nonzero(tied))
    if ties:
        logger.warning('%d of %d windows contain repeated values', ties,
                       len(windows))
    counts = {}
    if ties < len(windows):
        rows, occurrences = np.unique(order[~tied], axis=0,
                                      return_counts=True)
        counts = {Pattern(row): int(k) for row, k in zip(rows, occurrences)}
    return CensusReport(L, counts, ties, len(windows))


def exact_census(values, L):
    """Count the order patterns of an exact (e.g. Fraction) sequence."""
    values = list(values)
    _check_window(len(values), L)
    counts = collections.Counter()
    ties = 0
    for i in range(len(values) - L + 1):
        try:
            counts[pattern_of_values(values[i:i + L])] += 1
        except DuplicateValues:
            ties += 1
    return CensusReport(L, counts, ties, len(values) - L + 1)


def splitmix64(state):
    """Advance a splitmix64 state; return (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30))*0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27))*0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def make_rng(seed, stream=0):
    """Return the numpy Generator of a (seed, stream) pair."""
    state = int(seed) & MASK64
    words = []
    for i in range(4):
        state, word = splitmix64(state)
        words.append(word)
    sequence = np.random.SeedSequence(words, spawn_key=(int(stream),))
    return np.random.Generator(np.random.SFC64(sequence))


def _stochastic_vector(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise BadStochasticVector('expected a probability vector')
    if np.any(p <= 0) or abs(p.sum() - 1) > STATIONARITY_TOLERANCE:
        raise BadStochasticVector('probabilities must be positive and sum '
                                  'to 1, got {}'.format(p.tolist()))
    return p


def _draw(cumulative, u):
    return np.minimum(np.searchsorted(cumulative, u, side='right'),
                      len(cumulative) - 1)


def bernoulli(p, n, seed):
    """Return n i.i.d. symbols with P(s = i) = p[i]."""
    p = _stochastic_vector(p)
    u = make_rng(seed).random(n)
    return _draw(np.cumsum(p), u)


def markov(p, P, n, seed):
    """Return n symbols of the stationary Markov chain (p, P).

    Raises:
        BadStochasticVector: p or a row of P is not a probability vector.
        NonStationary: pP differs from p by more than 1e-12.
    """
    p = _stochastic_vector(p)
    P = np.asarray(P, dtype=float)
    if P.shape != (p.size, p.size):
        raise BadStochasticVector('transition matrix of shape {} for {} '
                                  'states'.format(P.shape, p.size))
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1)
                               > STATIONARITY_TOLERANCE):
        raise BadStochasticVector('rows of the transition matrix must be '
                                  'probability vectors')
    if np.any(np.abs(p @ P - p) > STATIONARITY_TOLERANCE):
        raise NonStationary('p is not stationary for P: pP = {}'
                            .format((p @ P).tolist()))
    u = make_rng(seed).random(n)
    rows = np.cumsum(P, axis=1)
    symbols = np.empty(n, dtype=int)
    if n:
        symbols[0] = _draw(np.cumsum(p), u[0])
    for k in range(1, n):
        symbols[k] = _draw(rows[symbols[k - 1]], u[k])
    return symbols


def map_orbit(f, x0, n, exact=False):
    """Return the orbit of x0 under f, as floats or as Fractions.

    Args:
        f: A PLMap, the logistic rule, or the name of either.
    """
    if isinstance(f, str):
        f = rule_by_name(f)
    x = Fraction(x0) if exact else float(x0)
    if not 0 <= x <= 1:
        raise BadSeries('initial point {} outside [0, 1]'.format(x0))
    values = [x]
    for k in range(n - 1):
        values.append(f(values[-1]))
    if exact:
        return values
    return as_series([float(v) for v in values])


def baker(point):
    """Return the image of (x, y) under the baker's map; exact on Fractions."""
    x, y = point
    if x < Fraction(1, 2):
        return 2*x, y/2
    return 2*x - 1, y/2 + Fraction(1, 2)


def baker_orbit(x0, y0, n):
    """Return the first n points of the baker orbit of (x0, y0)."""
    points = [(x0, y0)]
    for k in range(n - 1):
        points.append(baker(points[-1]))
    return points


def generate(model, n, seed=None, **parameters):
    """Generate a series, a symbol word or a 2-D orbit.

    Args:
        model: One of ``bernoulli`` (p), ``markov`` (p, P),
            ``map_orbit`` (map, x0, optionally exact, N) or
            ``baker_orbit`` (x0, y0).
        n: The number of values.
        seed: The 64-bit seed of the random models.

    Raises:
        UnknownName: unknown model.
    """
    if model in ('bernoulli', 'markov') and seed is None:
        raise BadSeries('the {} model needs a seed'.format(model))
    if model == 'bernoulli':
        return bernoulli(parameters['p'], n, seed)
    if model == 'markov':
        return markov(parameters['p'], parameters['P'], n, seed)
    if model == 'map_orbit':
        f = parameters['map']
        if isinstance(f, str):
            f = rule_by_name(f, parameters.get('N'))
        return map_orbit(f, parameters['x0'], n,
                         parameters.get('exact', False))
    if model == 'baker_orbit':
        return baker_orbit(parameters['x0'], parameters['y0'], n)
    raise UnknownName('unknown model: {!r} (expected one of {})'
                      .format(model, ', '.join(MODELS)))


def twodim_census(orbit, L, primary=0):
    """Count the order patterns of a planar orbit.

    Points are ordered lexicographically, by coordinate ``primary``
    first. For the baker's map, x carries the symbols of nonnegative
    index, so primary=0 gives the order of the two-sided shift.

    Raises:
        DuplicatePoints: two points of a window are equal.
    """
    keys = [(point[primary], point[1 - primary]) for point in orbit]
    _check_window(len(keys), L)
    counts = collections.Counter()
    for i in range(len(keys) - L + 1):
        try:
            counts[pattern_of_values(keys[i:i + L])] += 1
        except DuplicateValues as e:
            raise DuplicatePoints('orbit window at {}: {}'.format(i, e))
    return CensusReport(L, counts, 0, len(keys) - L + 1)


NullDistribution = collections.namedtuple(
    'NullDistribution',
    ['length', 'size', 'missing_counts', 'histogram', 'mean'])


def _null_trial(n, L, seed, trial):
    values = make_rng(seed, trial).random(n)
    return ordinal_census(values, L).missing_count


def null_missing_distribution(n, L, trials, seed, jobs=1):
    """Return the number of missing patterns in i.i.d. uniform series.

    Trial t draws n values from make_rng(seed, t), so the result does
    not depend on jobs.

    Returns:
        NullDistribution(length, size, missing_counts, histogram, mean),
        histogram being a dict {missing count: number of trials}.
    """
    if trials < 1:
        raise BadLength('need at least one trial, got {}'.format(trials))
    _check_window(n, L)
    logger.info('%d null trials, n=%d, L=%d', trials, n, L)
    arguments = (itertools.repeat(n), itertools.repeat(L),
                 itertools.repeat(seed), range(trials))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            missing = list(executor.map(_null_trial, *arguments))
    else:
        missing = list(map(_null_trial, *arguments))
    values, frequencies = np.unique(missing, return_counts=True)
    histogram = {int(v): int(k) for v, k in zip(values, frequencies)}
    return NullDistribution(L, n, missing, histogram,
                            float(np.mean(missing)))


DeterminismReport = collections.namedtuple(
    'DeterminismReport',
    ['census', 'null', 'exceedance', 'degenerate'])


def determinism_report(s, L, trials, seed, jobs=1):
    """Compare the missing patterns of s with the i.i.d. uniform null model.

    The exceedance is the fraction of null trials missing at least as
    many patterns as s. This is a heuristic: small values hint at
    determinism, without any decision threshold.
    """
    s = as_series(s)
    census = ordinal_census(s, L)
    degenerate = census.windows == 1
    if degenerate:
        logger.warning('a single window of length %d: the report is '
                       'degenerate', L)
    null = null_missing_distribution(s.size, L, trials, seed, jobs)
    observed = census.missing_count
    exceedance = sum(m >= observed for m in null.missing_counts)/trials
    return DeterminismReport(census, null, exceedance, degenerate)


def report_to_json(report):
    """Return a DeterminismReport as a JSON-ready dict."""
    return {'heuristic': True,
            'length': report.census.length,
            'missing_count': report.census.missing_count,
            'missing': [p.to_json() for p in report.census.missing],
            'ties': report.census.ties,
            'windows': report.census.windows,
            'degenerate': report.degenerate,
            'exceedance': report.exceedance,
            'null': {'size': report.null.size,
                     'trials': len(report.null.missing_counts),
                     'mean': report.null.mean,
                     'histogram': [[m, k] for m, k
                                   in report.null.histogram.items()]}}
