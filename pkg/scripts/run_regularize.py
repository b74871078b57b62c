#!/usr/bin/env python3
"""Run the relaxation sweep of the reference scenario into out_regularize/."""
import sys

from fbplab.cli import main

if __name__ == "__main__":
    sys.exit(main(["regularize", "--out", "out_regularize"] + sys.argv[1:]))
