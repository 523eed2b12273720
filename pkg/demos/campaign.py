"""
A randomised verification campaign
==================================

Draw random convex bodies, evaluate the curvature inequality in both regimes,
and plot the deficit against the asymmetry index.
"""

import os
import tempfile

from isomoment.functionals import asymmetry
from isomoment.harness import CampaignConfig, random_convex_body, run_inequality_campaign
from isomoment.svg import scatter_svg

config = CampaignConfig(
    inequality_id="thm1",
    generator={"kind": "spectral", "dim": 2, "decay": 0.6},
    samples=200,
    seed=1,
    betas=[0.0],
)
result = run_inequality_campaign(config)
print(result.summary_json())
print(result.csv_text().splitlines()[1])

###############################################################################
# The deficit vanishes only at the disk, so it grows with the asymmetry.
xs = [asymmetry(random_convex_body(config.generator, r.seed)).value for r in result.records]
ys = [r.deficit for r in result.records]
path = os.path.join(tempfile.gettempdir(), "deficit_vs_asymmetry.svg")
with open(path, "w") as fh:
    fh.write(scatter_svg(xs, ys, "deficit vs asymmetry", "asymmetry", "deficit"))
print("wrote", path)
