# %% [markdown]
# # Report arithmetic
#
# Metrics are kept as exact fractions and rounded half-up only for display.
# Overall precision, recall and F are macro averages of the two classes.

# %%
from wristmotion.evaluation import ConfusionMatrix, f_score, format_report, macro_average, round_half_up

precision = macro_average(0.938, 0.987)
recall = macro_average(0.974, 0.968)
print("overall precision", round_half_up(precision), "recall", round_half_up(recall))
print("dorsiflexion F", round_half_up(f_score(0.938, 0.974)), "non-dorsiflexion F", round_half_up(f_score(0.987, 0.968)))

# %%
# Published counts next to the figures printed beside them: the report
# recomputes from the counts and flags any mismatch.
print(format_report(ConfusionMatrix(tp=252, fp=10, fn=35, tn=931), "CNN"))
