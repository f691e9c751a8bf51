"""Regenerates the checked-in test fixtures (deterministic)."""
import numpy as np
from pathlib import Path

here = Path(__file__).parent

# 96x96 piecewise-smooth scene: shaded background, disk, bar, stripes.
h = w = 96
yy, xx = np.mgrid[0:h, 0:w].astype(float)
img = 0.25 + 0.35 * xx / (w - 1) + 0.1 * np.sin(yy / 9.0)
img[(xx - 30) ** 2 + (yy - 34) ** 2 < 15 ** 2] = 0.85
img[60:84, 50:88] = 0.15
stripes = (yy > 8) & (yy < 30) & (xx > 56) & (xx < 90)
img[stripes] = 0.5 + 0.3 * np.sign(np.sin(xx[stripes] / 2.0))
img = np.clip(img, 0, 1)
raw = np.round(img * 255).astype(np.uint8)
with open(here / "scene96.pgm", "wb") as f:
    f.write(b"P5\n96 96\n255\n")
    f.write(raw.tobytes())

# Small regression problem with an intercept column and two outliers.
rng = np.random.default_rng(7)
n = 12
x = rng.standard_normal((n, 2))
y = 1.5 + x @ np.array([2.0, -1.0]) + 0.3 * rng.standard_normal(n)
y[[2, 9]] += [6.0, -5.0]
X = np.column_stack([np.ones(n), x])
np.savetxt(here / "tiny.csv", np.column_stack([y, X]), delimiter=",", fmt="%.17g",
           header="y,one,x1,x2", comments="")
beta, *_ = np.linalg.lstsq(X, y, rcond=None)
sigma = np.linalg.norm(y - X @ beta) / np.sqrt(n)
with open(here / "tiny_lse.csv", "w") as f:
    f.write("name,value\n")
    for j, b in enumerate(beta):
        f.write(f"beta{j},{float(b)!r}\n")
    f.write(f"sigma,{float(sigma)!r}\n")
