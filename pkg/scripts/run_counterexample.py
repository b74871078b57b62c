#!/usr/bin/env python3
"""Run the reference multi-solution demonstration into out_counterexample/."""
import sys

from fbplab.cli import main

if __name__ == "__main__":
    sys.exit(main(["counterexample", "--out", "out_counterexample"] + sys.argv[1:]))
