#!/usr/bin/env python3
"""Convert externally obtained mouse-vertebra landmark data into the
TSV layout read by `pwshape`.

The second-thoracic mouse vertebra landmarks (23 "small" and 23
"large" six-landmark planar configurations) are distributed with
Dryden & Mardia's *Statistical Shape Analysis* and ship with the R
`shapes` package as the `mice` dataset. They are not redistributed in
this repository; obtain them yourself, export a CSV, and run this
converter. The test suite picks the result up at
`data/mouse_vertebrae.tsv` (or wherever `PWSHAPE_MOUSE_DATA` points).

Export from R:

    library(shapes)
    data(mice)
    sel  <- mice$group %in% c("s", "l")
    arr  <- mice$x[, , sel]
    grp  <- ifelse(mice$group[sel] == "s", "small", "large")
    rows <- do.call(rbind, lapply(seq_len(dim(arr)[3]), function(i) {
      data.frame(group          = grp[i],
                 specimen_id    = sprintf("%s%02d", grp[i],
                                          cumsum(grp == grp[i])[i]),
                 landmark_index = seq_len(dim(arr)[1]),
                 x              = arr[, 1, i],
                 y              = arr[, 2, i])
    }))
    write.csv(rows, "mice_export.csv", row.names = FALSE)

Then:

    python3 tools/convert_mouse_data.py mice_export.csv data/mouse_vertebrae.tsv
"""

import argparse
import csv
import sys

EXPECTED_GROUPS = {"small", "large"}
EXPECTED_SPECIMENS_PER_GROUP = 23
EXPECTED_LANDMARKS = 6
COLUMNS = ["group", "specimen_id", "landmark_index", "x", "y"]


def fail(msg: str) -> None:
    sys.exit(f"error: {msg}")


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Validate an exported mouse-vertebra CSV and emit pwshape TSV."
    )
    parser.add_argument("csv_in", help="CSV exported from the published source")
    parser.add_argument("tsv_out", help="output TSV path (data/mouse_vertebrae.tsv)")
    args = parser.parse_args()

    with open(args.csv_in, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(COLUMNS) <= set(reader.fieldnames):
            fail(f"input must have columns {COLUMNS}, got {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        fail("input CSV is empty")

    specimens: dict[tuple[str, str], dict[int, tuple[float, float]]] = {}
    for line_no, row in enumerate(rows, start=2):
        group = row["group"].strip()
        if group not in EXPECTED_GROUPS:
            fail(f"line {line_no}: group {group!r} is not one of {sorted(EXPECTED_GROUPS)}")
        try:
            index = int(row["landmark_index"])
            coords = (float(row["x"]), float(row["y"]))
        except ValueError as exc:
            fail(f"line {line_no}: {exc}")
        landmarks = specimens.setdefault((group, row["specimen_id"].strip()), {})
        if index in landmarks:
            fail(f"line {line_no}: duplicate landmark {index}")
        landmarks[index] = coords

    for group in sorted(EXPECTED_GROUPS):
        count = sum(1 for g, _ in specimens if g == group)
        if count != EXPECTED_SPECIMENS_PER_GROUP:
            fail(f"group {group!r} has {count} specimens, expected {EXPECTED_SPECIMENS_PER_GROUP}")
    for (group, sid), landmarks in specimens.items():
        if sorted(landmarks) not in (
            list(range(1, EXPECTED_LANDMARKS + 1)),
            list(range(EXPECTED_LANDMARKS)),
        ):
            fail(
                f"specimen {group}/{sid} has landmarks {sorted(landmarks)}, "
                f"expected {EXPECTED_LANDMARKS} consecutive indices"
            )

    with open(args.tsv_out, "w") as out:
        out.write("group\tspecimen_id\tlandmark_index\tx\ty\n")
        for (group, sid), landmarks in specimens.items():
            for index in sorted(landmarks):
                x, y = landmarks[index]
                out.write(f"{group}\t{sid}\t{index}\t{x!r}\t{y!r}\n")
    total = len(specimens)
    print(f"wrote {total} specimens x {EXPECTED_LANDMARKS} landmarks to {args.tsv_out}")


if __name__ == "__main__":
    main()
