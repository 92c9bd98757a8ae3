"""
Scenes and the command line
===========================

Every shipped scene through `dpw-forge verify`, then generate with
flag overrides.  Equivalent shell commands are shown in the README.
"""

import glob
import os

from dpwforge import cli

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "out")
os.makedirs(OUT, exist_ok=True)

for path in sorted(glob.glob(os.path.join(HERE, "..", "scenes", "*.json"))):
    print("==", os.path.basename(path))
    code = cli.main(["verify", path, "--resolution", "9"])
    print("exit", code)

code = cli.main(["generate", "--surface", "delaunay", "--ambient", "h3", "--q", "0.5", "--s", "0.2", "--t", "0.2",
                 "--close", "--resolution", "17", "--obj", os.path.join(OUT, "delaunay_h3.obj"),
                 "--report", os.path.join(OUT, "delaunay_h3.report.json")])
print("exit", code)
cli.main(["period", "--surface", "delaunay", "--r", "0.3", "--s", "0.2", "--t", "0.15"])
cli.main(["weight", "--r", "0", "--s", "0.25", "--t", "0.25", "--H", "0.5", "--flux"])
