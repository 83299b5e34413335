"""This module provides functions to locate and parse the ordpat.cfg file.

The configuration file is optional: every setting has a built-in default.
Library functions never read the configuration themselves; the command
line front end reads it once and passes the values on explicitly.

Example of ``ordpat.cfg``::

    [limits]
    outgrowth_cap = 9
    piece_cap = 1000000

    [run]
    jobs = 4

    [cache]
    directory = /tmp/ordpat

    [logging]
    level = INFO
    file =
"""
import configparser
import logging
import os.path
import sys

logger = logging.getLogger(__name__)

CACHE_DIR_VARIABLE = 'ORDPAT_CACHE_DIR'

DEFAULTS = {'limits': {'outgrowth_cap': '9',
                       'piece_cap': '1000000'},
            'run': {'jobs': '1'},
            'cache': {'directory': ''},
            'logging': {'level': 'WARNING',
                        'file': ''}}


def locate():
    """Return the standard path to the ``ordpat.cfg`` file.

    The file lives in the per-user application directory of the current
    platform. It need not exist.
    """
    home = os.path.expanduser('~')
    if sys.platform.startswith('darwin'):
        paths = [home, 'Library', 'Application Support', 'ordpat']
    elif sys.platform.startswith('win32'):
        paths = [os.environ.get('APPDATA', home), 'ordpat']
    else:
        paths = [home, '.ordpat']
    paths += ['ordpat.cfg']
    return os.path.join(*paths)


def parse_config(path=None):
    """Return the contents of the ordpat configuration file.

    Args:
        path: The path to the configuration file. If None, the standard
            location is used, and a missing file silently yields the
            defaults. An explicitly given path must exist.

    Returns:
        An instance of ``configparser.ConfigParser``, prefilled with the
        defaults.

    Raises:
        RuntimeError: an explicitly given file could not be found.
    """
    cfg = configparser.ConfigParser()
    cfg.read_dict(DEFAULTS)
    if path is None:
        path = locate()
        if not os.path.isfile(path):
            return cfg
    elif not os.path.isfile(path):
        raise RuntimeError('could not find config file: '+path)
    logger.info('reading configuration from %s', path)
    cfg.read(path)
    return cfg


def cache_directory(cfg=None):
    """Return the directory of the census memo files, None if disabled.

    The ``ORDPAT_CACHE_DIR`` environment variable overrides the
    ``[cache] directory`` setting.
    """
    directory = os.environ.get(CACHE_DIR_VARIABLE, '')
    if not directory and cfg is not None:
        directory = cfg['cache'].get('directory', '')
    return directory or None


def log_level(cfg):
    """Return the numeric logging level named in ``[logging] level``."""
    name = cfg['logging'].get('level', 'WARNING').upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise RuntimeError('unknown logging level: '+name)
    return level
