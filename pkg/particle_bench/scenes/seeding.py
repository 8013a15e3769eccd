import hashlib
import struct

import numpy as np

IMAGE_SLOT = 0
PLAN_SLOT = -1


def derive_instance_seed(master_seed, image_index, instance_index):
    """64-bit BLAKE2b digest of the signed triple, stable across platforms."""
    packed = struct.pack(">qqq", int(master_seed), int(image_index), int(instance_index))
    return int.from_bytes(hashlib.blake2b(packed, digest_size=8).digest(), "big")


def companion_index(image_index):
    """Image index used for the low-occlusion companion of ``image_index``."""
    return -(image_index + 1)


class SeedPlan:
    """Per-image seeding: slot 0 drives image-level draws, slot -1 the layer shuffle, slot k >= 1 draw k."""

    def __init__(self, master_seed, image_index):
        self.master_seed = int(master_seed)
        self.image_index = int(image_index)

    def seed(self, slot):
        return derive_instance_seed(self.master_seed, self.image_index, slot)

    def image_rng(self):
        return np.random.default_rng(self.seed(IMAGE_SLOT))

    def instance_rng(self, slot):
        return np.random.default_rng(self.seed(slot))

    def plan_rng(self):
        return np.random.default_rng(self.seed(PLAN_SLOT))

    @property
    def image_seed(self):
        return self.seed(IMAGE_SLOT)

    def __repr__(self):
        return f"<SeedPlan(master_seed={self.master_seed}, image_index={self.image_index})>"
