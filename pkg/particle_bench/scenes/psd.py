"""Particle-size distributions over the eight sieve classes."""
import math

import numpy as np
from scipy.stats import norm

from ..exceptions import InputError
from ..particles.sieve import CLASS_INDICES

PSD_KINDS = ("uniform", "gaussian", "random", "explicit")


class PsdSpec:
    def __init__(
        self,
        kind,
        total_count=None,
        mean_class=None,
        std_class=None,
        counts=None,
        total_count_range=None,
    ):
        if kind not in PSD_KINDS:
            raise InputError(f"unknown PSD kind {kind!r}")
        self.kind = kind
        self.total_count = total_count
        self.mean_class = mean_class
        self.std_class = std_class
        self.counts = counts
        self.total_count_range = tuple(total_count_range) if total_count_range else None
        self._validate()

    def _validate(self):
        if self.kind == "explicit":
            counts = self.counts
            if counts is None or len(counts) != len(CLASS_INDICES):
                raise InputError("explicit PSD needs one count per class")
            if any(c < 0 for c in counts) or sum(counts) <= 0:
                raise InputError("explicit PSD counts must be >= 0 with a positive sum")
            return

        if self.total_count_range:
            lo, hi = self.total_count_range
            if not 0 < lo <= hi:
                raise InputError(f"invalid total_count_range [{lo}, {hi}]")
        elif not self.total_count or self.total_count <= 0:
            raise InputError("total_count must be positive")

        if self.kind == "gaussian":
            if self.mean_class is None or not self.std_class or self.std_class <= 0:
                raise InputError("gaussian PSD needs mean_class and std_class > 0")

    def draw_total(self, rng):
        if self.kind == "explicit":
            return int(sum(self.counts))
        if self.total_count_range:
            lo, hi = self.total_count_range
            return int(rng.integers(lo, hi + 1))
        return int(self.total_count)

    def to_dict(self):
        return {
            "kind": self.kind,
            "total_count": self.total_count,
            "total_count_range": list(self.total_count_range) if self.total_count_range else None,
            "mean_class": self.mean_class,
            "std_class": self.std_class,
            "counts": list(self.counts) if self.counts is not None else None,
        }

    def __repr__(self):
        return f"<PsdSpec(kind='{self.kind}', total_count={self.total_count})>"


def class_probabilities(spec, rng, classes=CLASS_INDICES):
    """Probability vector over all 8 classes, zero outside ``classes``."""
    allowed = np.isin(np.asarray(CLASS_INDICES), list(classes))
    if spec.kind == "uniform":
        weights = allowed.astype(float)
    elif spec.kind == "gaussian":
        weights = norm.pdf(np.asarray(CLASS_INDICES, dtype=float), spec.mean_class, spec.std_class)
        weights = np.where(allowed, weights, 0.0)
        if weights.sum() == 0:
            raise InputError("gaussian PSD puts no mass on the allowed classes")
    else:
        weights = np.zeros(len(CLASS_INDICES))
        weights[allowed] = rng.dirichlet(np.ones(int(allowed.sum())))
    return weights / weights.sum()


def sample_psd(spec, rng, classes=CLASS_INDICES):
    """Per-class counts as an 8-list indexed by class - 1."""
    if spec.kind == "explicit":
        return [int(c) for c in spec.counts]
    total = spec.draw_total(rng)
    probabilities = class_probabilities(spec, rng, classes)
    return [int(c) for c in rng.multinomial(total, probabilities)]


def pair_occlusion_variant(scene_counts):
    return [math.ceil(count / 2) for count in scene_counts]
