"""Walkthrough: dataset files, mesh sidecars, and the command-line interface.

Datasets travel as CSV with an x1..xn,y header; mesh structure rides in a
JSON sidecar next to the CSV.  The ``gradsurf`` command evaluates single
points, imputes whole query files, and runs benchmark tables.
"""

import tempfile
from pathlib import Path

import numpy as np

from gradsurf import TEST_FUNCTIONS, gen_mesh_dataset, save_dataset
from gradsurf.cli import main

workdir = Path(tempfile.mkdtemp(prefix="gradsurf-demo-"))
print(f"working in {workdir}")

f = TEST_FUNCTIONS["S1"]
training, mesh = gen_mesh_dataset(f, 12)
data = workdir / "surface.csv"
save_dataset(data, training, mesh)
print(f"wrote {training.npoints} training points + mesh sidecar")

print()
print("=== gradsurf eval ===")
code = main(["eval", "--data", str(data), "--at", "3.1,2.7,4.4",
             "--method", "smooth"])
truth = f(np.array([3.1, 2.7, 4.4]))
print(f"true value {truth:.6f}   (exit code {code})")

print()
print("=== gradsurf impute ===")
rng = np.random.default_rng(0)
queries = workdir / "queries.csv"
rows = ["x1,x2,x3"] + [
    f"{a:.4f},{b:.4f},{c:.4f}" for a, b, c in rng.uniform(2.2, 4.8, (5, 3))
]
queries.write_text("\n".join(rows) + "\n")
out = workdir / "imputed.csv"
code = main(["impute", "--data", str(data), "--queries", str(queries),
             "--output", str(out)])
print(f"exit code {code}; output:")
print(out.read_text())

print("=== gradsurf bench ===")
report = workdir / "report.jsonl"
code = main(["bench", "--table", "averaging", "--seed", "1",
             "--output", str(report)])
print(f"exit code {code}; first report line:")
print(report.read_text().splitlines()[0])
