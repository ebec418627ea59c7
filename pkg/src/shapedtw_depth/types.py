from __future__ import annotations
from typing import Literal

DescriptorKind = Literal["raw", "gradient", "hog1d", "compound"]

# Names accepted on the command line and in run configs
DescriptorName = Literal["hog1d+raw", "hog1d", "raw", "grad"]

TextureKind = Literal["sinusoid-mix", "step-train", "fracture-sinusoid"]
WarpKind = Literal["constant", "linear-ramp", "piecewise-linear"]
SynthKind = Literal["image", "signal"]

CostKind = Literal["pointwise", "shape", "accumulated"]
