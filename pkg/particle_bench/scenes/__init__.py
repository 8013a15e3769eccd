from .augment import AugmentConfig, AugmentParams, apply, sample_params
from .composer import PlacedInstance, Scene, compose_l1, compose_l2, compose_l3, compose_scene
from .psd import PsdSpec, pair_occlusion_variant, sample_psd
from .seeding import SeedPlan, derive_instance_seed
from .stages import StageSpec
