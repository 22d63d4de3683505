# %% [markdown]
# # Adaptive difficulty
#
# Five calibration shakes set the thresholds at 90% of their median. After
# every 10 shakes a threshold rises by 10% if at least 9 cleared it, falls by
# 10% if fewer than 6 did, and otherwise holds.

# %%
import numpy as np

from wristmotion.adaptive import (
    DifficultyState,
    PlayerModel,
    calibrate,
    calibration_shakes,
    rom_regression_fit,
    rom_regression_loocv_rmse,
    simulate_session,
)
from wristmotion import SynthesisParams, synthesize
from wristmotion.features import rom_indicator

player = PlayerModel(rom_capability=3.0, speed_capability=4.0, noise_std=0.3, seed=1)
state = calibrate(calibration_shakes(player))
print(f"calibrated rom {state.rom_threshold:.3f}, speed {state.speed_threshold:.3f}")

# %%
session = simulate_session(player, state, 300)
for i, rec in enumerate(session.epoch_records):
    print(f"epoch {i + 1:2d}  rom {rec.rom_decision:5s} -> {rec.rom_threshold:.3f}   "
          f"speed {rec.speed_decision:5s} -> {rec.speed_threshold:.3f}")

# %%
# A noiseless player who starts far below their ability climbs to it, then
# alternates around it: every threshold at or under the capability is met
# ten times out of ten, which always triggers a raise.
steady = simulate_session(PlayerModel(3.0, 3.0), DifficultyState(0.5, 0.5, calibrated=True), 300)
print(np.round([r.rom_threshold for r in steady.epoch_records], 3))

# %%
# Predicting a three-level ROM grade from the gx standard deviation alone.
x, grade = [], []
for level, amplitude in enumerate((0.5, 1.5, 3.0)):
    for seed in range(20):
        seg = synthesize(SynthesisParams("dorsiflexion", amplitude=amplitude, frequency_hz=2.0,
                                         duration_s=2.0, noise_std=0.1, seed=100 * level + seed))
        x.append(rom_indicator(seg))
        grade.append(level)
slope, intercept = rom_regression_fit(x, grade)
print(f"grade ~ {slope:.3f} * rom + {intercept:.3f}, leave-one-out RMSE {rom_regression_loocv_rmse(x, grade):.3f}")
