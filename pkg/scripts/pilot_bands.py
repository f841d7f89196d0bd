#!/usr/bin/env python3
"""Recompute the calibrated acceptance bands and rewrite
src/spechit/data/calibrated_bands.json.

The bands are pilot measurements widened by a fixed safety factor; the
acceptance suites assert that fresh runs land inside them (and that the
scale-free ratios stay within a factor-10 spread).  Rerun this script
whenever the band-covered constructions change.
"""

import json
import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from spechit import biased_cycle, pendant_path_example  # noqa: E402
from spechit import geometric, hitting  # noqa: E402

SAFETY = 1.6
OUT = pathlib.Path(__file__).resolve().parents[1] / "src/spechit/data/calibrated_bands.json"


def band(values, safety=SAFETY):
    lo, hi = min(values), max(values)
    return [lo / safety, hi * safety]


def main():
    doc = {"_comment":
           "Calibrated acceptance bands; recompute with scripts/pilot_bands.py"}

    sizes = (16, 32, 64, 128)
    prod, ratio, per_n = [], [], []
    for n in sizes:
        c = biased_cycle(n)
        ps = geometric.pseudo_gap(c)
        hit = hitting.t_H_pi(c, method="arcs")
        s = geometric.rel_geom(c, 1.0 / math.e)
        prod.append(ps.gamma * hit.value ** 2)
        ratio.append(hit.value / s)
        per_n.append(hit.value / n)
        print(f"cycle n={n}: gamma*thpi^2={prod[-1]:.4f} "
              f"thpi/relgeom={ratio[-1]:.4f} thpi/n={per_n[-1]:.4f}")
    doc["cycle_gamma_times_thpi_sq"] = band(prod)
    doc["cycle_thpi_over_relgeom"] = band(ratio)
    doc["cycle_thpi_over_n"] = band(per_n)

    rel_scaled, exits = [], []
    for n in (512, 2048):
        ex = pendant_path_example(n, seed=11)
        audit = hitting.pendant_path_audit(ex, delta=0.1, samples=20,
                                             seed=12)
        rel_scaled.append(audit.rel_over_n23)
        exits.append(audit.max_exit)
        print(f"pendant n={n}: rel/n^(2/3)={audit.rel_over_n23:.4f} "
              f"max_exit={audit.max_exit:.3f}")
    doc["pendant_rel_over_n23"] = band(rel_scaled)
    doc["pendant_exit_cap"] = max(exits) * 2.0

    sanity = [(k, v) for k, v in doc.items()
              if isinstance(v, list) and v[1] / v[0] > 10.0]
    if sanity:
        raise SystemExit(f"band(s) wider than factor 10: {sanity}")

    with open(OUT, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
