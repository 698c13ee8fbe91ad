"""Regenerate the bundled weekly dose snapshot.

The raw CDC JYNNEOS weekly export is not redistributed here.  This script
writes a smooth reconstruction: gamma-shaped weekly curves (first doses
peaking mid-August 2022, second doses about five weeks later) scaled so the
first-dose total covers 22.7% of the 1,998,039 at-risk population after the
0.91 male-share adjustment.  Replace the CSV with the real export for exact
reproduction; the loader accepts the same three columns.
"""
import csv
import datetime as dt
import pathlib

import numpy as np

AT_RISK = 1_998_039
FIRST_MALE_SHARE = 0.91
TARGET_FIRST_COVERAGE = 0.227
SECOND_TO_FIRST = 0.62

START = dt.date(2022, 5, 22)
END = dt.date(2023, 7, 1)


def bump(weeks, peak, scale):
    shape = peak / scale
    w = np.maximum(weeks, 1e-9)
    return w ** shape * np.exp(-w / scale)


def main(out):
    n_weeks = (END - START).days // 7 + 1
    w = np.arange(n_weeks, dtype=float) + 0.5
    first = bump(w, 12.0, 3.0) + 0.004 * bump(12.0, 12.0, 3.0)
    second = bump(w, 17.0, 4.25) + 0.004 * bump(17.0, 17.0, 4.25)
    total_first = TARGET_FIRST_COVERAGE * AT_RISK / FIRST_MALE_SHARE
    first = np.rint(first / first.sum() * total_first).astype(int)
    second = np.rint(second / second.sum() * total_first * SECOND_TO_FIRST).astype(int)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["week_start_date", "first_doses", "second_doses"])
        for i in range(n_weeks):
            wr.writerow([(START + dt.timedelta(weeks=i)).isoformat(), first[i], second[i]])


if __name__ == "__main__":
    main(pathlib.Path(__file__).resolve().parents[1] / "src" / "mpoxnet" / "data" / "jynneos_weekly_snapshot.csv")
