"""ordpat is a package for the exact analysis of order patterns.

It enumerates the allowed and forbidden order patterns of piecewise-linear
interval maps and of shifts on N symbols in rational arithmetic, builds
outgrowth and root patterns, and looks for missing patterns in time
series.
"""
__version__ = '0.1.0'

import ordpat.errors
import ordpat.config
import ordpat.patterns
import ordpat.plmaps
import ordpat.shifts
import ordpat.series
import ordpat.cli
