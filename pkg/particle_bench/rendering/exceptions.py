from ..exceptions import InputError, ParticleBenchError


class PgmFormatError(InputError):
    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message} ({path})" if path else message)


class MalformedHeaderError(PgmFormatError):
    def __init__(self, path=None, detail=None):
        self.detail = detail
        message = "malformed header"
        if detail:
            message += f": {detail}"
        super().__init__(message, path)


class TruncatedPayloadError(PgmFormatError):
    def __init__(self, expected, actual, path=None):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"truncated payload: expected {expected} bytes, found {actual}", path
        )


class UnsupportedMaxvalError(PgmFormatError):
    def __init__(self, maxval, path=None):
        self.maxval = maxval
        super().__init__(f"unsupported maxval {maxval}, expected 65535", path)


class MetadataSchemaError(InputError):
    def __init__(self, field_paths, path=None):
        self.field_paths = field_paths
        self.path = path
        details = "; ".join(
            f"{field}: {', '.join(errors)}" for field, errors in sorted(field_paths.items())
        )
        super().__init__(f"schema violation in {path}: {details}" if path else details)


class MetadataInvariantError(ParticleBenchError):
    def __init__(self, message, instance_id=None):
        self.instance_id = instance_id
        super().__init__(
            f"instance {instance_id}: {message}" if instance_id is not None else message
        )
