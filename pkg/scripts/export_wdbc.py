"""Write the WDBC table bundled with scikit-learn as a UCI-ordered CSV.

scikit-learn ships the same 569 x 30 Diagnostic table as UCI ``wdbc.data`` but
drops the patient ids and encodes malignant as 0. This restores the UCI column
order (id, diagnosis, 30 features) with diagnosis as M/B. The original ids are
not recoverable, so rows get sequential ids.

    python scripts/export_wdbc.py src/qknn_lab/data/wdbc.csv
"""

import csv
import sys

from sklearn.datasets import load_breast_cancer

STATS = ("mean", "se", "worst")
BASE = ("radius", "texture", "perimeter", "area", "smoothness", "compactness",
        "concavity", "concave_points", "symmetry", "fractal_dimension")


def main(out_path):
    data = load_breast_cancer()
    header = ["id", "diagnosis"] + [f"{b}_{s}" for s in STATS for b in BASE]
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, (row, target) in enumerate(zip(data.data, data.target), start=1):
            diagnosis = "M" if data.target_names[target] == "malignant" else "B"
            writer.writerow([str(i), diagnosis] + [repr(float(v)) for v in row])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "wdbc.csv")
