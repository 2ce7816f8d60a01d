"""Errors and sweep counts of the lower transform of the 1-D double well."""

from _common import run

if __name__ == "__main__":
    run("ex1d", [0.1, 0.05, 0.01, 0.005], [1.0, 2.0], "both", __doc__)
