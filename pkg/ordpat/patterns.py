"""Order patterns as permutations.

A pattern of length L is stored in bracket notation: the entries
[pi_0, ..., pi_{L-1}] list the *time indices* of an orbit in increasing
order of value, i.e. x_{pi_0} < x_{pi_1} < ... < x_{pi_{L-1}}. The rank
vector of the same orbit is obtained with invert().

This module gathers the purely combinatorial operations: containment of
consecutive patterns, outgrowth patterns of a forbidden pattern and the
elementary (one step longer) extensions used to build them.
"""
import collections
import itertools
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor

from ordpat.errors import (CapExceeded, DuplicateValues, InvalidPattern,
                           LengthMismatch)

logger = logging.getLogger(__name__)

DEFAULT_OUTGROWTH_CAP = 9

_TEXT_FORM = re.compile(r'^\s*\[?\s*(\d+(?:\s*,\s*\d+)*)\s*\]?\s*$')


class Pattern(tuple):
    """An immutable permutation of {0, ..., L-1} in bracket notation.

    Patterns compare entrywise, like tuples, so sorted() orders them
    lexicographically.

    Raises:
        InvalidPattern: the entries are not a permutation of
            {0, ..., L-1}, or L = 0.
    """
    __slots__ = ()

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        if not entries or sorted(entries) != list(range(len(entries))):
            raise InvalidPattern('not a permutation of 0..L-1: '
                                 '{}'.format(list(entries)))
        return super().__new__(cls, entries)

    def __repr__(self):
        return 'Pattern({})'.format(str(self))

    def __str__(self):
        return '[' + ','.join(str(e) for e in self) + ']'

    @classmethod
    def parse(cls, text):
        """Return the pattern written as "[2,1,0]" (brackets optional)."""
        match = _TEXT_FORM.match(text)
        if match is None:
            raise InvalidPattern('cannot parse pattern: ' + repr(text))
        return cls(int(e) for e in match.group(1).split(','))

    def to_json(self):
        return list(self)


Containment = collections.namedtuple('Containment', ['found', 'position'])
Containment.__bool__ = lambda self: self.found


def all_patterns(length):
    """Return S_L, the patterns of the given length, in lexicographic order."""
    return [Pattern(p) for p in itertools.permutations(range(length))]


def pattern_of_values(xs):
    """Return the order pattern of a finite sequence of distinct values.

    Args:
        xs: A nonempty sequence of mutually comparable values (ints,
            Fractions, floats...).

    Returns:
        The Pattern [pi_0, ...] with xs[pi_0] < xs[pi_1] < ...

    Raises:
        DuplicateValues: two values compare equal.
    """
    xs = list(xs)
    if not xs:
        raise InvalidPattern('cannot take the pattern of an empty sequence')
    order = sorted(range(len(xs)), key=xs.__getitem__)
    for i, j in zip(order, order[1:]):
        if not xs[i] < xs[j]:
            raise DuplicateValues('values at indices {} and {} are equal: '
                                  '{!r}'.format(min(i, j), max(i, j), xs[i]))
    return Pattern(order)


def invert(p):
    """Return the inverse permutation q, such that q[p[i]] = i."""
    q = [0] * len(p)
    for i, v in enumerate(p):
        q[v] = i
    return Pattern(q)


def mirror(p):
    """Return the pattern read backwards."""
    return Pattern(reversed(p))


def _first_window(seq, order):
    """Return the first i such that seq[i+order[0]] < seq[i+order[1]] < ...

    Returns None if there is no such window.
    """
    width = len(order)
    for i in range(len(seq) - width + 1):
        previous = seq[i + order[0]]
        for k in order[1:]:
            current = seq[i + k]
            if current < previous:
                break
            previous = current
        else:
            return i
    return None


def contains_consecutive(sigma, tau):
    """Test whether sigma contains tau as a consecutive pattern.

    A window sigma[i], ..., sigma[i+len(tau)-1] matches when it is
    order-isomorphic to tau.

    Returns:
        Containment(found, position), truthy iff found; position is the
        smallest matching i, or None.

    Raises:
        LengthMismatch: tau is longer than sigma.
    """
    if len(tau) > len(sigma):
        raise LengthMismatch('pattern of length {} cannot occur in a '
                             'pattern of length {}'.format(len(tau),
                                                           len(sigma)))
    position = _first_window(sigma, invert(tau))
    return Containment(position is not None, position)


def is_outgrowth(sigma, pi):
    """Return True if sigma is an outgrowth pattern of the shorter pi.

    sigma is an outgrowth of pi when the values pi_0+n, ..., pi_{L-1}+n
    appear in sigma in this order for some shift n, which is the same as
    invert(sigma) containing invert(pi) consecutively.

    Raises:
        LengthMismatch: len(pi) >= len(sigma).
    """
    if len(pi) >= len(sigma):
        raise LengthMismatch('an outgrowth must be longer than its root: '
                             '{} vs {}'.format(len(sigma), len(pi)))
    return _first_window(invert(sigma), pi) is not None


def _outgrowth_chunk(pi, length, first):
    rest = [v for v in range(length) if v != first]
    found = []
    for tail in itertools.permutations(rest):
        sigma = (first,) + tail
        positions = [0] * length
        for i, v in enumerate(sigma):
            positions[v] = i
        if _first_window(positions, pi) is not None:
            found.append(Pattern(sigma))
    return found


def _construct_outgrowths(pi, length):
    size = len(pi)
    out = set()
    for n in range(length - size + 1):
        values = [v + n for v in pi]
        others = [v for v in range(length) if not n <= v < n + size]
        for slots in itertools.combinations(range(length), size):
            free = [i for i in range(length) if i not in slots]
            for filling in itertools.permutations(others):
                sigma = [0] * length
                for slot, v in zip(slots, values):
                    sigma[slot] = v
                for slot, v in zip(free, filling):
                    sigma[slot] = v
                out.add(Pattern(sigma))
    return out


def outgrowth_set(pi, length, cap=DEFAULT_OUTGROWTH_CAP, construct=False,
                  jobs=1):
    """Return all outgrowth patterns of pi of the given length.

    Up to the cap, the set is computed by filtering the whole of S_M;
    the permutations are partitioned by their first entry, and the parts
    can be scanned by a pool of worker processes. Above the cap, the
    patterns are built directly (all placements of pi_k+n, all fillings
    of the remaining slots), which must be requested explicitly.

    Args:
        pi: The root pattern.
        length: The length M > len(pi) of the outgrowth patterns.
        cap: The largest M for which S_M is enumerated.
        construct: Allow direct construction above the cap.
        jobs: The number of worker processes for the enumeration.

    Returns:
        A frozenset of Patterns.

    Raises:
        LengthMismatch: length <= len(pi).
        CapExceeded: length > cap and construct is False.
    """
    pi = Pattern(pi)
    if length <= len(pi):
        raise LengthMismatch('outgrowths of a pattern of length {} must be '
                             'longer, got {}'.format(len(pi), length))
    if length > cap:
        if not construct:
            raise CapExceeded('enumerating S_{} exceeds the cap of {}; allow '
                              'direct construction instead'.format(length,
                                                                   cap))
        logger.info('constructing outgrowths of %s of length %d', pi, length)
        return frozenset(_construct_outgrowths(pi, length))
    logger.info('filtering %d permutations for outgrowths of %s',
                math.factorial(length), pi)
    firsts = range(length)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            chunks = list(executor.map(_outgrowth_chunk,
                                       itertools.repeat(pi),
                                       itertools.repeat(length), firsts))
    else:
        chunks = [_outgrowth_chunk(pi, length, first) for first in firsts]
    return frozenset(itertools.chain.from_iterable(chunks))


def elementary_extensions(pi):
    """Return the 2(L+1) outgrowths of pi of length L+1.

    The first L+1 patterns insert the value L at every position (group
    A); the last L+1 patterns shift all entries up by one and insert 0
    at every position (group B). Duplicates are kept.
    """
    size = len(pi)
    group_a = [Pattern(pi[:i] + (size,) + pi[i:]) for i in range(size + 1)]
    raised = tuple(v + 1 for v in pi)
    group_b = [Pattern(raised[:i] + (0,) + raised[i:])
               for i in range(size + 1)]
    return group_a + group_b


def elementary_predecessors(sigma):
    """Return the two patterns sigma is an elementary extension of.

    The first one deletes the largest entry, the second one deletes 0
    and lowers the remaining entries by one.
    """
    size = len(sigma)
    if size < 2:
        raise LengthMismatch('a pattern of length 1 has no predecessors')
    drop_max = Pattern(v for v in sigma if v != size - 1)
    drop_min = Pattern(v - 1 for v in sigma if v != 0)
    return drop_max, drop_min


def outgrowth_upper_bound(size, length):
    """Return (M-L+1) M!/(M-L)!, a bound on the number of outgrowths.

    Args:
        size: The length L of the root pattern, L >= 2.
        length: The length M >= L of the outgrowths.
    """
    if not 2 <= size <= length:
        raise LengthMismatch('need 2 <= L <= M, got L={}, M={}'.format(size,
                                                                      length))
    return ((length - size + 1) * math.factorial(length)
            // math.factorial(length - size))


def outgrowth_lower_bound(size, length):
    """Return M!/L!, the number of outgrowths for a single shift n."""
    if length <= size:
        return 0
    return math.factorial(length) // math.factorial(size)
