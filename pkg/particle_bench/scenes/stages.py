from ..exceptions import InputError
from ..particles.sieve import CLASS_INDICES

STAGES = ("L1", "L2", "L3")
DEFAULT_VISIBILITY_FLOOR = 0.60
DEFAULT_MAX_PLACE_ATTEMPTS = 50
DEFAULT_SATURATION_PATIENCE = 200


class StageSpec:
    def __init__(
        self,
        stage,
        classes,
        visibility_floor=DEFAULT_VISIBILITY_FLOOR,
        max_place_attempts=DEFAULT_MAX_PLACE_ATTEMPTS,
        l1_saturation_patience=DEFAULT_SATURATION_PATIENCE,
    ):
        if stage not in STAGES:
            raise InputError(f"unknown stage {stage!r}")
        classes = tuple(sorted(set(classes)))
        if not classes or any(c not in CLASS_INDICES for c in classes):
            raise InputError(f"classes must be a non-empty subset of 1..8, got {list(classes)}")
        if stage in ("L1", "L2") and len(classes) != 1:
            raise InputError(f"{stage} needs exactly one class, got {list(classes)}")
        if not 0 < visibility_floor <= 1:
            raise InputError(f"visibility_floor must be in (0, 1], got {visibility_floor}")
        if max_place_attempts < 1 or l1_saturation_patience < 1:
            raise InputError("max_place_attempts and l1_saturation_patience must be >= 1")

        self.stage = stage
        self.classes = classes
        self.visibility_floor = float(visibility_floor)
        self.max_place_attempts = int(max_place_attempts)
        self.l1_saturation_patience = int(l1_saturation_patience)

    def with_classes(self, classes):
        return StageSpec(
            self.stage,
            classes,
            visibility_floor=self.visibility_floor,
            max_place_attempts=self.max_place_attempts,
            l1_saturation_patience=self.l1_saturation_patience,
        )

    def to_dict(self):
        return {
            "stage": self.stage,
            "classes": list(self.classes),
            "visibility_floor": self.visibility_floor,
            "max_place_attempts": self.max_place_attempts,
            "l1_saturation_patience": self.l1_saturation_patience,
        }

    def __repr__(self):
        return f"<StageSpec(stage='{self.stage}', classes={list(self.classes)})>"
