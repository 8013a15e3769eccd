class ParticleBenchError(Exception):
    """Base class for every error raised by particle_bench."""


class InputError(ParticleBenchError):
    """Bad input or configuration. The CLI exits with code 2 for these."""


class GeometryError(InputError, ValueError):
    pass


class SieveRangeError(InputError, ValueError):
    def __init__(self, size_mm):
        self.size_mm = size_mm
        super().__init__(f"out of sieve range: {size_mm} mm")


class DegenerateParticleError(InputError):
    def __init__(self, source=None):
        self.source = source
        message = "degenerate particle"
        if source:
            message += f" ({source})"
        super().__init__(message)


class CatalogError(InputError):
    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message}: {path}" if path else message)


class EmptyPoolError(InputError):
    def __init__(self, size_class):
        self.size_class = size_class
        super().__init__(f"no assets in the pool for class {size_class}")


class MissingAssetError(InputError):
    def __init__(self, asset_id):
        self.asset_id = asset_id
        super().__init__(f"asset not found in catalog: {asset_id}")


class ConfigError(InputError):
    def __init__(self, messages, source=None):
        self.messages = messages
        self.source = source
        self.field_paths = sorted(messages) if isinstance(messages, dict) else []
        super().__init__(self._describe())

    def _describe(self):
        if isinstance(self.messages, dict):
            details = "; ".join(
                f"{path}: {', '.join(errors)}" for path, errors in sorted(self.messages.items())
            )
        else:
            details = str(self.messages)
        prefix = f"invalid config {self.source}" if self.source else "invalid config"
        return f"{prefix}: {details}"


class GraymapOverflowError(ParticleBenchError):
    def __init__(self, instance_count):
        self.instance_count = instance_count
        super().__init__(
            f"{instance_count} instances do not fit a 16-bit graymap (max 65535)"
        )


class PlacementRejected(ParticleBenchError):
    """A proposed placement violated the stage constraints."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


class EvaluationError(InputError):
    pass


class NoGroundTruthError(EvaluationError):
    def __init__(self, image_id=None):
        self.image_id = image_id
        super().__init__(f"no ground truth ({image_id})" if image_id else "no ground truth")


class DatasetMismatchError(EvaluationError):
    def __init__(self, missing, extra=None):
        self.missing = sorted(missing)
        self.extra = sorted(extra or [])
        super().__init__(
            "predictions missing for images: " + ", ".join(self.missing)
            if self.missing
            else "image id sets differ"
        )
