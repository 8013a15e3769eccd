"""Cross-checks between a graymap and its metadata document."""
import numpy as np

from .exceptions import MetadataInvariantError
from .metadata import check_record
from .rle import runs_to_indices


def repaint_from_record(record, max_layer=None):
    """Graymap ids obtained by painting the decoded amodal runs in z-order."""
    flat = np.zeros(record.width * record.height, dtype=np.uint16)
    for instance in sorted(record.instances, key=lambda i: i.z):
        if max_layer is not None and instance.layer > max_layer:
            continue
        flat[runs_to_indices(instance.amodal_rle)] = instance.instance_id
    return flat.reshape(record.height, record.width)


def audit_image(record, graymap):
    """Problems found for one image, as human-readable strings; empty when consistent."""
    problems = []
    try:
        check_record(record)
    except MetadataInvariantError as e:
        problems.append(str(e))

    if (graymap.width, graymap.height) != (record.width, record.height):
        problems.append(
            f"graymap is {graymap.width}x{graymap.height}, metadata says {record.width}x{record.height}"
        )
        return problems

    expected_ids = {instance.instance_id for instance in record.instances if instance.visible_area}
    if graymap.id_set() != expected_ids:
        problems.append("graymap ids differ from the visible instances in metadata")

    counts = graymap.pixel_counts()
    for instance in record.instances:
        if counts.get(instance.instance_id, 0) != instance.visible_area:
            problems.append(
                f"instance {instance.instance_id}: {counts.get(instance.instance_id, 0)} graymap pixels, "
                f"visible_area {instance.visible_area}"
            )

    if not np.array_equal(repaint_from_record(record), graymap.ids):
        problems.append("repainting the amodal runs does not reproduce the graymap")

    for layer in sorted({instance.layer for instance in record.instances}):
        repainted = np.bincount(repaint_from_record(record, max_layer=layer).ravel())
        for instance in record.instances:
            if instance.layer != layer:
                continue
            pixels = int(repainted[instance.instance_id]) if instance.instance_id < repainted.size else 0
            if pixels != instance.layer_visible_area:
                problems.append(
                    f"instance {instance.instance_id}: within-layer repaint gives {pixels}, "
                    f"layer_visible_area {instance.layer_visible_area}"
                )
    return problems
