#!/usr/bin/env python3
"""Source-recovery demo: drive the mean from 0 to 1 in unit time, plus a
two-mode target, writing reports into out_inverse/."""
import sys

from fbplab.cli import main

if __name__ == "__main__":
    code = main(["inverse", "--a", "0", "--b", "1", "--T", "1",
                 "--out", "out_inverse"])
    code = code or main(["inverse", "--a", "0,0.1", "--b", "0.4,0.25",
                         "--T", "1", "--out", "out_inverse_two_mode"])
    sys.exit(code)
