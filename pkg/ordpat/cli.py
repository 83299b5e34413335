"""Exact order-pattern analysis of maps, shifts and series.

Subcommands:

  census     realizing intervals of all patterns of a piecewise-linear map
  shift      allowed, forbidden or root patterns of the N-shift
  classify   a single pattern against a map, a shift or a census file
  outgrowth  the outgrowth patterns of a pattern and their bounds
  family     named families of forbidden root patterns
  series     pattern census and determinism report of a series file
  generate   Bernoulli, Markov, map and baker series

Every run writes its version and arguments to stderr; results go to
stdout or to the file given with --output.
"""
import csv
import io
import json
import logging
import sys
from argparse import ArgumentParser, RawDescriptionHelpFormatter
from fractions import Fraction

from ordpat import __version__
from ordpat import config
from ordpat.errors import OrdpatError
from ordpat.patterns import (Pattern, outgrowth_lower_bound, outgrowth_set,
                             outgrowth_upper_bound)
from ordpat.plmaps import (BUILTIN_MAPS, PatternCensus, builtin_map,
                           conjugate_endpoints, enumerate_allowed,
                           rational_to_text, rule_by_name)
from ordpat.series import (MODELS, determinism_report, generate, load_series,
                           ordinal_census, report_to_json)
from ordpat.shifts import (Family, forbidden_patterns, is_allowed_for_shift,
                           is_root_pattern, named_forbidden_family,
                           parse_spiralling, r4_screen, root_patterns,
                           shift_census, twosided_realized)

logger = logging.getLogger(__name__)

CONFIG_HELP = 'path to the configuration file (default: per-user ordpat.cfg)'

VERBOSE_HELP = 'log progress messages'

JOBS_HELP = 'number of worker processes (default: [run] jobs)'

OUTPUT_HELP = 'write the result to this file instead of stdout'

FORMAT_HELP = 'output format'

MAP_HELP = 'name of the map'

SYMBOLS_HELP = 'number N of symbols (sawtooth map, shift)'

LENGTH_HELP = 'pattern length L'

PATTERN_HELP = 'pattern in bracket notation, e.g. "[2,1,0]"'

CONJUGATE_HELP = 'map the tent intervals to the logistic map (floats)'

FIGURE_DATA_HELP = 'also write interval and curve data to this CSV file'

RESOLUTION_HELP = 'number of curve samples in the figure data (0: none)'

LIST_HELP = 'which patterns to list'

CENSUS_FILE_HELP = 'census in JSON format, as written by "census"'

OUTGROWTH_LENGTH_HELP = 'length M of the outgrowth patterns'

CONSTRUCT_HELP = 'build the outgrowths directly above the enumeration cap'

FAMILY_HELP = 'name of the family'

MIRRORED_HELP = 'return the pattern read backwards'

NO_VERIFY_HELP = 'skip the verification of rootness'

INPUT_HELP = 'series file, one value per line'

TRIALS_HELP = 'number of null-model trials (0: census only)'

SEED_HELP = '64-bit seed of the random generator'

MODEL_HELP = 'series model'

SIZE_HELP = 'number of values to generate'

PROBABILITIES_HELP = 'probability vector, e.g. "0.5,0.5"'

MATRIX_HELP = 'transition matrix, rows separated by ";", e.g. "0,1;1,0"'

X0_HELP = 'initial point (decimal or fraction such as 2/5)'

Y0_HELP = 'second coordinate of the initial point (baker)'

EXACT_HELP = 'iterate in exact rational arithmetic'


def setup_argument_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', help=CONFIG_HELP)
    common.add_argument('-v', '--verbose', action='store_true',
                        help=VERBOSE_HELP)
    common.add_argument('-j', '--jobs', type=int, help=JOBS_HELP)
    common.add_argument('-o', '--output', help=OUTPUT_HELP)
    common.add_argument('-f', '--format', choices=['text', 'json', 'csv'],
                        default='text', help=FORMAT_HELP)

    parser = ArgumentParser(prog='ordpat', description=__doc__,
                            formatter_class=RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version',
                        version='ordpat ' + __version__)
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    census = commands.add_parser('census', parents=[common],
                                 help='census of a piecewise-linear map')
    census.add_argument('--map', required=True, choices=BUILTIN_MAPS,
                        help=MAP_HELP)
    census.add_argument('--symbols', type=int, help=SYMBOLS_HELP)
    census.add_argument('--length', type=int, required=True,
                        help=LENGTH_HELP)
    census.add_argument('--conjugate', action='store_true',
                        help=CONJUGATE_HELP)
    census.add_argument('--figure-data', help=FIGURE_DATA_HELP)
    census.add_argument('--resolution', type=int, default=0,
                        help=RESOLUTION_HELP)

    shift = commands.add_parser('shift', parents=[common],
                                help='patterns of the N-shift')
    shift.add_argument('--symbols', type=int, required=True,
                       help=SYMBOLS_HELP)
    shift.add_argument('--length', type=int, required=True, help=LENGTH_HELP)
    listing = shift.add_mutually_exclusive_group()
    for kind in ('allowed', 'forbidden', 'roots', 'two-sided'):
        listing.add_argument('--' + kind, dest='listing', action='store_const',
                             const=kind, help=LIST_HELP)

    classify = commands.add_parser('classify', parents=[common],
                                   help='classify a single pattern')
    classify.add_argument('--pattern', required=True, help=PATTERN_HELP)
    target = classify.add_mutually_exclusive_group(required=True)
    target.add_argument('--shift', type=int, metavar='N', help=SYMBOLS_HELP)
    target.add_argument('--map', choices=BUILTIN_MAPS, help=MAP_HELP)
    target.add_argument('--census-file', help=CENSUS_FILE_HELP)
    classify.add_argument('--symbols', type=int, help=SYMBOLS_HELP)

    outgrowth = commands.add_parser('outgrowth', parents=[common],
                                    help='outgrowth patterns')
    outgrowth.add_argument('--pattern', required=True, help=PATTERN_HELP)
    outgrowth.add_argument('--length', type=int, required=True,
                           help=OUTGROWTH_LENGTH_HELP)
    outgrowth.add_argument('--construct', action='store_true',
                           help=CONSTRUCT_HELP)

    family = commands.add_parser('family', parents=[common],
                                 help='named forbidden families')
    family.add_argument('--name', required=True,
                        choices=[f.value for f in Family], help=FAMILY_HELP)
    family.add_argument('--symbols', type=int, required=True,
                        help=SYMBOLS_HELP)
    family.add_argument('--length', type=int, help=LENGTH_HELP)
    family.add_argument('--mirrored', action='store_true',
                        help=MIRRORED_HELP)
    family.add_argument('--no-verify', action='store_true',
                        help=NO_VERIFY_HELP)

    series = commands.add_parser('series', parents=[common],
                                 help='census of a series file')
    series.add_argument('--input', required=True, help=INPUT_HELP)
    series.add_argument('--length', type=int, required=True,
                        help=LENGTH_HELP)
    series.add_argument('--trials', type=int, default=0, help=TRIALS_HELP)
    series.add_argument('--seed', type=int, help=SEED_HELP)

    generate = commands.add_parser('generate', parents=[common],
                                   help='generate a series')
    generate.add_argument('--model', required=True, choices=MODELS,
                          help=MODEL_HELP)
    generate.add_argument('--size', type=int, required=True, help=SIZE_HELP)
    generate.add_argument('--seed', type=int, help=SEED_HELP)
    generate.add_argument('--p', help=PROBABILITIES_HELP)
    generate.add_argument('--matrix', help=MATRIX_HELP)
    generate.add_argument('--map', choices=BUILTIN_MAPS + ('logistic',),
                          help=MAP_HELP)
    generate.add_argument('--symbols', type=int, help=SYMBOLS_HELP)
    generate.add_argument('--x0', help=X0_HELP)
    generate.add_argument('--y0', help=Y0_HELP)
    generate.add_argument('--exact', action='store_true', help=EXACT_HELP)
    return parser


class Settings:
    """Run-time limits, from the configuration file and the flags."""

    def __init__(self, cfg, args):
        self.piece_cap = cfg['limits'].getint('piece_cap')
        self.outgrowth_cap = cfg['limits'].getint('outgrowth_cap')
        self.jobs = args.jobs or cfg['run'].getint('jobs')
        self.cache_dir = config.cache_directory(cfg)

    @property
    def shift_options(self):
        return dict(piece_cap=self.piece_cap, jobs=self.jobs,
                    cache_dir=self.cache_dir)


def _csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(data):
    return json.dumps(data, indent=2) + '\n'


def _number_text(x):
    if isinstance(x, Fraction):
        return rational_to_text(x)
    return repr(x)


def _parse_pattern(parser, text):
    try:
        return Pattern.parse(text)
    except OrdpatError as e:
        parser.error('--pattern: {}'.format(e))


def _map_of(parser, name, symbols):
    if name == 'sawtooth' and symbols is None:
        parser.error('--symbols is required with --map sawtooth')
    return builtin_map(name, symbols)


def _map_of_census(census):
    name = census.map_name
    if name.startswith('sawtooth'):
        return builtin_map('sawtooth', int(name[len('sawtooth'):]))
    return builtin_map(name)


def emit_figure_data(census, path, resolution=0, f=None):
    """Write the intervals of a census, and sampled iterates, to a CSV file.

    Interval rows are sorted by left endpoint. When resolution R > 0,
    curve rows give f^0(x), ..., f^{L-1}(x) at x = k/R, k = 0, ..., R.
    Errors from the file system are not caught.
    """
    L = census.length
    header = (['kind', 'x_left', 'x_right', 'pattern', 'x']
              + ['f{}'.format(i) for i in range(L)])
    rows = []
    for p, a, b in sorted(census.rows(), key=lambda row: row[1]):
        rows.append(['interval', repr(float(a)), repr(float(b)), str(p), '']
                    + ['']*L)
    if resolution > 0:
        if f is None:
            f = _map_of_census(census)
        for k in range(resolution + 1):
            x = Fraction(k, resolution)
            values = [x]
            for i in range(L - 1):
                values.append(f(values[-1]))
            rows.append(['curve', '', '', '', repr(float(x))]
                        + [repr(float(v)) for v in values])
    with open(path, 'w', newline='') as out:
        out.write(_csv_text(header, rows))
    logger.info('figure data written to %s', path)


def _census_command(parser, args, settings):
    f = _map_of(parser, args.map, args.symbols)
    if args.resolution < 0:
        parser.error('--resolution must be nonnegative')
    if args.conjugate and args.map != 'tent':
        parser.error('--conjugate requires --map tent')
    census = enumerate_allowed(f, args.length, settings.piece_cap,
                               settings.jobs)
    if args.figure_data:
        emit_figure_data(census, args.figure_data, args.resolution, f)
    if args.conjugate:
        conjugate = conjugate_endpoints(census)
        rows = [(str(p), repr(a), repr(b))
                for p, union in conjugate.allowed.items() for a, b in union]
        if args.format == 'json':
            return _json_text({
                'length': conjugate.length,
                'map': conjugate.map_name,
                'allowed': [{'pattern': p.to_json(),
                             'intervals': [list(ab) for ab in union]}
                            for p, union in conjugate.allowed.items()],
                'forbidden': [p.to_json() for p in conjugate.forbidden]})
    else:
        rows = [(str(p), rational_to_text(a), rational_to_text(b))
                for p, a, b in census.rows()]
        if args.format == 'json':
            return _json_text(census.to_json())
    if args.format == 'csv':
        return _csv_text(['pattern', 'left', 'right'], rows)
    lines = ['{} ({}, {})'.format(*row) for row in rows]
    lines += ['forbidden {}'.format(p) for p in census.forbidden]
    return '\n'.join(lines) + '\n'


def _shift_command(parser, args, settings):
    N, L = args.symbols, args.length
    kind = args.listing or 'forbidden'
    if kind == 'allowed':
        patterns = sorted(shift_census(N, L, **settings.shift_options)
                          .allowed) if L > 1 else [Pattern([0])]
    elif kind == 'forbidden':
        patterns = forbidden_patterns(N, L, **settings.shift_options)
    elif kind == 'roots':
        patterns = root_patterns(N, L, **settings.shift_options)
    else:
        patterns = sorted(twosided_realized(N, L))
    if args.format == 'json':
        return _json_text({'symbols': N, 'length': L,
                           kind: [p.to_json() for p in patterns]})
    if args.format == 'csv':
        return _csv_text(['pattern'], [[str(p)] for p in patterns])
    return ''.join('{}\n'.format(p) for p in patterns)


def _classify_command(parser, args, settings):
    p = _parse_pattern(parser, args.pattern)
    result = {'pattern': p.to_json()}
    if args.shift is not None:
        N = args.shift
        verdict = is_allowed_for_shift(p, N, **settings.shift_options)
        result['target'] = 'shift{}'.format(N)
        result['verdict'] = 'allowed' if verdict else 'forbidden'
        if verdict:
            result['witness'] = str(verdict.witness)
        else:
            screen = r4_screen(p, N)
            result['screen'] = str(screen.verdict)
            result['blocks'] = [list(block) for block in screen.blocks]
            result['root'] = is_root_pattern(p, N, **settings.shift_options)
        shape = parse_spiralling(p)
        if shape is not None:
            result['spiral'] = {'lengths': list(shape.partition),
                                'mirrored': shape.mirrored}
    else:
        if args.census_file is not None:
            with open(args.census_file, 'r') as f:
                census = PatternCensus.from_json(json.load(f))
        else:
            f = _map_of(parser, args.map, args.symbols)
            census = enumerate_allowed(f, len(p), settings.piece_cap,
                                       settings.jobs)
        if census.length != len(p):
            parser.error('--pattern: length {} does not match the census '
                         'length {}'.format(len(p), census.length))
        result['target'] = census.map_name
        result['verdict'] = 'allowed' if census.is_allowed(p) else 'forbidden'
        if census.is_allowed(p):
            result['intervals'] = census.allowed[p].to_json()
    if args.format == 'json':
        return _json_text(result)
    if args.format == 'csv':
        keys = list(result)
        return _csv_text(keys, [[json.dumps(result[k]) if
                                 not isinstance(result[k], str) else result[k]
                                 for k in keys]])
    lines = ['pattern {}'.format(p),
             'target {}'.format(result['target']),
             'verdict {}'.format(result['verdict'])]
    if 'witness' in result:
        lines.append('witness {}'.format(result['witness']))
    if 'blocks' in result:
        chain = ';'.join(','.join(str(v) for v in block)
                         for block in result['blocks'])
        lines.append('rule chain [{}] ({})'.format(chain, result['screen']))
        lines.append('root {}'.format('yes' if result['root'] else 'no'))
    if 'spiral' in result:
        lines.append('spiral h={} mirrored={}'.format(
            tuple(result['spiral']['lengths']), result['spiral']['mirrored']))
    for a, b in result.get('intervals', []):
        lines.append('interval ({}, {})'.format(a, b))
    return '\n'.join(lines) + '\n'


def _outgrowth_command(parser, args, settings):
    p = _parse_pattern(parser, args.pattern)
    M = args.length
    if M <= len(p):
        parser.error('--length must exceed the pattern length {}'
                     .format(len(p)))
    patterns = sorted(outgrowth_set(p, M, settings.outgrowth_cap,
                                    args.construct, settings.jobs))
    lower = outgrowth_lower_bound(len(p), M)
    upper = outgrowth_upper_bound(len(p), M) if len(p) >= 2 else None
    if args.format == 'json':
        return _json_text({'pattern': p.to_json(), 'length': M,
                           'count': len(patterns), 'lower_bound': lower,
                           'upper_bound': upper,
                           'outgrowths': [q.to_json() for q in patterns]})
    if args.format == 'csv':
        return _csv_text(['pattern'], [[str(q)] for q in patterns])
    lines = [str(q) for q in patterns]
    lines.append('# count {}, lower bound {}, upper bound {}'
                 .format(len(patterns), lower, upper))
    return '\n'.join(lines) + '\n'


def _family_command(parser, args, settings):
    p = named_forbidden_family(args.name, args.symbols, args.length,
                               args.mirrored, not args.no_verify,
                               **settings.shift_options)
    if args.format == 'json':
        return _json_text({'family': args.name, 'symbols': args.symbols,
                           'length': len(p), 'mirrored': args.mirrored,
                           'verified': not args.no_verify,
                           'pattern': p.to_json()})
    if args.format == 'csv':
        return _csv_text(['family', 'symbols', 'pattern'],
                         [[args.name, args.symbols, str(p)]])
    return '{}\n'.format(p)


def _series_command(parser, args, settings):
    s = load_series(args.input)
    if args.trials < 0:
        parser.error('--trials must be nonnegative')
    if args.trials > 0:
        if args.seed is None:
            parser.error('--seed is required with --trials')
        report = determinism_report(s, args.length, args.trials, args.seed,
                                    settings.jobs)
        data = report_to_json(report)
        census = report.census
    else:
        census = ordinal_census(s, args.length)
        data = census.to_json()
    if args.format == 'json':
        return _json_text(data)
    if args.format == 'csv':
        return _csv_text(['pattern', 'count'],
                         [[str(p), n] for p, n in census.counts.items()])
    lines = ['{} {}'.format(p, n) for p, n in census.counts.items()]
    lines.append('# windows {}, ties {}, missing {}'.format(
        census.windows, census.ties, census.missing_count))
    if args.trials > 0:
        lines.append('# heuristic: exceedance {} over {} null trials'
                     .format(data['exceedance'], args.trials))
    return '\n'.join(lines) + '\n'


def _numbers(parser, flag, text):
    try:
        return [float(v) for v in text.split(',')]
    except (AttributeError, ValueError):
        parser.error('{}: expected comma-separated numbers'.format(flag))


def _point(parser, flag, text):
    if text is None:
        parser.error('{} is required for this model'.format(flag))
    try:
        return Fraction(text)
    except ValueError:
        parser.error('{}: not a number: {!r}'.format(flag, text))


def _generate_command(parser, args, settings):
    if args.size < 1:
        parser.error('--size must be positive')
    model = args.model
    parameters = {}
    if model in ('bernoulli', 'markov'):
        if args.seed is None:
            parser.error('--seed is required for the {} model'.format(model))
        parameters['p'] = _numbers(parser, '--p', args.p)
        if model == 'markov':
            if args.matrix is None:
                parser.error('--matrix is required for the markov model')
            parameters['P'] = [_numbers(parser, '--matrix', row)
                               for row in args.matrix.split(';')]
    elif model == 'map_orbit':
        if args.map is None:
            parser.error('--map is required for the map_orbit model')
        if args.map == 'sawtooth' and args.symbols is None:
            parser.error('--symbols is required with --map sawtooth')
        parameters['map'] = rule_by_name(args.map, args.symbols)
        parameters['x0'] = _point(parser, '--x0', args.x0)
        parameters['exact'] = args.exact
    else:
        parameters['x0'] = _point(parser, '--x0', args.x0)
        parameters['y0'] = _point(parser, '--y0', args.y0)
        if not args.exact:
            parameters['x0'] = float(parameters['x0'])
            parameters['y0'] = float(parameters['y0'])
    values = generate(model, args.size, args.seed, **parameters)
    if model == 'baker_orbit':
        rows = [[_number_text(x), _number_text(y)] for x, y in values]
        header = ['x', 'y']
    else:
        rows = [[_number_text(v if isinstance(v, Fraction) else v.item())]
                for v in values]
        header = ['value']
    if args.format == 'json':
        return _json_text([row if len(row) > 1 else row[0] for row in rows])
    if args.format == 'csv':
        return _csv_text(header, rows)
    return ''.join(','.join(row) + '\n' for row in rows)


COMMANDS = {'census': _census_command,
            'shift': _shift_command,
            'classify': _classify_command,
            'outgrowth': _outgrowth_command,
            'family': _family_command,
            'series': _series_command,
            'generate': _generate_command}


def _setup_logging(cfg, verbose):
    level = logging.INFO if verbose else config.log_level(cfg)
    filename = cfg['logging'].get('file', '') or None
    logging.basicConfig(filename=filename, level=level,
                        format='%(levelname)s:%(name)s:%(message)s')


def run(argv=None):
    """Run the command line; return the exit code.

    Module errors exit with their own code (1 unless stated otherwise),
    argument errors with 2.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    sys.stderr.write('# ordpat {}: {}\n'.format(__version__, ' '.join(argv)))
    parser = setup_argument_parser()
    try:
        args = parser.parse_args(argv)
        try:
            cfg = config.parse_config(args.config)
            _setup_logging(cfg, args.verbose)
        except RuntimeError as e:
            parser.error('--config: {}'.format(e))
        if args.jobs is not None and args.jobs < 1:
            parser.error('--jobs must be positive')
        for flag in ('symbols', 'shift'):
            if getattr(args, flag, None) is not None and \
                    getattr(args, flag) < 2:
                parser.error('--{} must be >= 2'.format(flag))
        settings = Settings(cfg, args)
        text = COMMANDS[args.command](parser, args, settings)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except OrdpatError as e:
        sys.stderr.write('ordpat: error: {}\n'.format(e))
        return e.exit_code
    except OSError as e:
        sys.stderr.write('ordpat: error: {}\n'.format(e))
        return 1
    if args.output:
        try:
            with open(args.output, 'w', newline='') as out:
                out.write(text)
        except OSError as e:
            sys.stderr.write('ordpat: error: {}\n'.format(e))
            return 1
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())
