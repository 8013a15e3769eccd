"""Run-length encoding of masks as (start, length) pairs over row-major canvas order."""
import numpy as np

from ..geometry import BinaryMask


def _row_runs(bits):
    height, width = bits.shape
    padded = np.zeros((height, width + 2), dtype=np.int8)
    padded[:, 1:-1] = bits
    diff = np.diff(padded, axis=1)
    rows, starts = np.nonzero(diff == 1)
    _, ends = np.nonzero(diff == -1)
    return rows, starts, ends - starts


def _merge(starts, lengths):
    if starts.size == 0:
        return starts, lengths
    ends = starts + lengths
    breaks = np.flatnonzero(starts[1:] != ends[:-1]) + 1
    first = np.concatenate(([0], breaks))
    last = np.concatenate((breaks - 1, [starts.size - 1]))
    return starts[first], ends[last] - starts[first]


def encode_placed(bits, x, y, canvas_width):
    """Runs of a local mask anchored at (x, y), expressed in canvas coordinates."""
    rows, cols, lengths = _row_runs(np.asarray(bits, dtype=bool))
    starts = (rows.astype(np.int64) + y) * canvas_width + cols + x
    starts, lengths = _merge(starts, lengths.astype(np.int64))
    return [[int(s), int(n)] for s, n in zip(starts, lengths)]


def encode_mask(mask):
    return encode_placed(mask.bits, 0, 0, mask.width)


def runs_to_indices(runs):
    """Flat row-major pixel indices covered by the runs, ascending."""
    if not runs:
        return np.zeros(0, dtype=np.int64)
    runs = np.asarray(runs, dtype=np.int64)
    starts, lengths = runs[:, 0], runs[:, 1]
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return offsets + np.arange(int(lengths.sum()), dtype=np.int64)


def decode_runs(runs, width, height):
    flat = np.zeros(width * height, dtype=bool)
    flat[runs_to_indices(runs)] = True
    return BinaryMask(flat.reshape(height, width))


def run_area(runs):
    return int(sum(length for _, length in runs))


def run_bbox(runs, canvas_width):
    """(x0, y0, x1, y1) of the pixels covered by the runs, exclusive upper corner."""
    indices = runs_to_indices(runs)
    ys, xs = np.divmod(indices, canvas_width)
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1
