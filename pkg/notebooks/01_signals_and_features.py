# %% [markdown]
# # Synthetic movements and their descriptors
#
# Generate one movement of each kind, look at the gyroscope channel that
# carries the motion, then reduce every segment to its 42 descriptors.

# %%
import numpy as np

from wristmotion import SynthesisParams, synthesize, window
from wristmotion.features import FEATURE_NAMES, crossing_rate, dominant_frequency, extract, rom_indicator

kinds = {
    "dorsiflexion": SynthesisParams("dorsiflexion", amplitude=2.0, frequency_hz=1.5, duration_s=2.0, noise_std=0.1),
    "rotation": SynthesisParams("rotation", amplitude=2.0, frequency_hz=0.8, duration_s=2.0, noise_std=0.1, seed=1),
    "shake": SynthesisParams("shake", amplitude=3.0, frequency_hz=4.0, duration_s=2.0, noise_std=0.1, seed=2),
    "still": SynthesisParams("still", duration_s=2.0, noise_std=0.1, seed=3),
}
segments = {name: synthesize(p) for name, p in kinds.items()}

# %%
# Range of motion is the spread of gx; speed is how often gx changes sign.
# Only the dorsiflexion moves gx, so the other kinds show sensor noise here.
for name, seg in segments.items():
    gx = seg.channel("gx")
    print(f"{name:13s} n={len(seg):3d}  rom={rom_indicator(seg):.3f}  "
          f"crossings/s={crossing_rate(seg):5.2f}  fft peak={dominant_frequency(gx, seg.sample_rate_hz):.2f} Hz")

# %%
# 6 channels x 7 statistics. The dorsiflexion's energy sits on gx.
fv = extract(segments["dorsiflexion"])
for name in FEATURE_NAMES:
    if name.startswith("gx"):
        print(f"{name:12s} {fv[name]: .4f}")

# %%
# Live detection slides a 2 s window once per second.
long_rec = synthesize(SynthesisParams("dorsiflexion", amplitude=2.0, frequency_hz=1.5, duration_s=6.0))
wins = window(long_rec, 2.0, 1.0)
print(len(wins), "windows starting at", [round(float(w.t[0]), 2) for w in wins])
print("window rom values:", np.round([rom_indicator(w) for w in wins], 3))
