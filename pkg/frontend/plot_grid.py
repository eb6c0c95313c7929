#!/usr/bin/env python3
"""Thin launcher: plot_grid.py --csv results.csv --out figs/ [--curves]"""

import sys

from gridplots.cli import main

if __name__ == "__main__":
    sys.exit(main())
