"""Exact order-pattern analysis of maps, shifts and series.

Run ``order_patterns.py --help`` for the list of subcommands.
"""
from ordpat.cli import main

if __name__ == '__main__':
    main()
