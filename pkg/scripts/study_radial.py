"""Errors and sweep counts for the 2-D radial field (|x| - 1)^2 on the radius-2 disk."""

from _common import run

if __name__ == "__main__":
    run("ex2d", [0.25, 0.1, 0.05, 0.025, 0.02, 0.01], [1.0, 2.0], "both", __doc__)
