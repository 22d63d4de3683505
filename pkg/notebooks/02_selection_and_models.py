# %% [markdown]
# # Feature selection and classifiers on a synthetic corpus
#
# A seeded corpus with per-subject amplitude and tempo, split by subject so
# no person appears on both sides. Pass --cnn to also fit the convolutional
# network (a few minutes on the full corpus).

# %%
import sys

from wristmotion.corpus import make_corpus, subject_ids
from wristmotion.evaluation import evaluate_split, format_table
from wristmotion.features import FEATURE_NAMES, extract_matrix, fit_normalizer
from wristmotion.pipeline import train_model
from wristmotion.selection import mrmr_select

import numpy as np

corpus = make_corpus(n_segments=600, n_subjects=20, noise_std=0.3, seed=0)
held_out = set(subject_ids(20)[-5:])
train = [s for s in corpus if s.subject_id not in held_out]
test = [s for s in corpus if s.subject_id in held_out]
print(f"{len(train)} training and {len(test)} test segments, test subjects {sorted(held_out)}")

# %%
# mRMR ranking: relevance is the ANOVA F against the label, redundancy the
# mean |r| with what is already picked.
X = fit_normalizer(extract_matrix(train)).apply(extract_matrix(train))
y = np.array([s.label for s in train], dtype=int)
ranking = mrmr_select(X, y, 10)
for idx, score in zip(ranking.ranked_indices, ranking.scores):
    print(f"{FEATURE_NAMES[idx]:14s} {score:.4g}")

# %%
kinds = ["knn", "svm", "mlp"] + (["cnn"] if "--cnn" in sys.argv else [])
reports = {}
for kind in kinds:
    artifact = train_model(kind, train, seed=0)
    _, reports[kind.upper()] = evaluate_split(artifact, test)
print(format_table(reports))
