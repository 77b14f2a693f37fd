"""Deterministic output writers: CSV/JSON reports, curve files, trajectory
SVGs, and the binary checkpoint container.

Everything here must be byte-identical across reruns with the same config
and seeds, so no timestamps, no dict-order dependence, and fixed float
formatting. Wall-clock numbers go to a separate timing sidecar that is
explicitly outside that guarantee.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "fmt6",
    "write_report_csv",
    "write_report_json",
    "write_curves_csv",
    "write_trajectory_csv",
    "write_trajectory_svg",
    "write_realization_csv",
    "write_blob",
    "read_blob",
    "write_timing",
]

_BLOB_MAGIC = b"SBCK"
_BLOB_VERSION = 1

REPORT_COLUMNS = [
    "env",
    "agent",
    "scenario",
    "n_seeds",
    "n_episodes",
    "mean_reward",
    "robust_reward",
    "mean_contact_pct",
    "mean_hq_pct",
    "mean_cost",
    "mean_value",
    "mean_sidetracks",
]

CURVE_COLUMNS = ["seed", "episode", "reward", "contact_pct", "hq_pct", "cost", "n_sidetracks"]


def fmt6(value) -> str:
    """Six-decimal fixed format; None becomes an empty cell and an exact
    negative zero is normalized so reruns cannot differ on its sign."""
    if value is None:
        return ""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return f"{value:.6f}"


def write_report_csv(path: str, report_rows: list[dict]) -> None:
    lines = [",".join(REPORT_COLUMNS)]
    for row in report_rows:
        cells = []
        for col in REPORT_COLUMNS:
            value = row.get(col)
            if col in ("env", "agent", "scenario"):
                cells.append("" if value is None else str(value))
            elif col in ("n_seeds", "n_episodes"):
                cells.append("" if value is None else str(int(value)))
            else:
                cells.append(fmt6(value))
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump({"schema_version": 1, **payload}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_curves_csv(path: str, curves: dict) -> None:
    """``curves`` maps seed -> TrainingCurve; one long table with a seed column."""
    lines = [",".join(CURVE_COLUMNS)]
    for seed in sorted(curves):
        c = curves[seed]
        for i in range(len(c.episode)):
            cells = [
                str(seed),
                str(int(c.episode[i])),
                fmt6(c.reward[i]),
                fmt6(c.contact_pct[i]),
                fmt6(None if c.hq_pct is None else c.hq_pct[i]),
                fmt6(None if c.cost is None else c.cost[i]),
                fmt6(None if c.n_sidetracks is None else c.n_sidetracks[i]),
            ]
            lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trajectory_csv(path: str, rows: list[tuple]) -> None:
    """Per-node episode dump (see envs.metrics.trajectory_rows) as CSV."""
    lines = ["index,x,tvd,top,bottom,hq,inside,cum_reward"]
    for index, x, tvd, top, bottom, hq, inside, cum in rows:
        lines.append(
            ",".join([
                str(index), fmt6(x), fmt6(tvd), fmt6(top), fmt6(bottom),
                fmt6(hq), str(int(inside)), fmt6(cum),
            ])
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_realization_csv(path: str, real) -> None:
    """Columnar dump of one geological realization for plotting and replay.

    Layered realizations get (index, top, bottom, hq) rows; faulted ones get
    (index, x, upper, lower, fault) rows where the fault cell holds the drawn
    displacement at the node sitting exactly on that fault's location.
    """
    if hasattr(real, "upper"):
        disp_at = {}
        for loc, disp in zip(real.fault_locations, real.fault_displacements):
            disp_at[float(loc)] = disp_at.get(float(loc), 0.0) + disp
        lines = ["index,x,upper,lower,fault"]
        for j, x in enumerate(real.xs):
            fault = disp_at.get(float(x))
            lines.append(
                ",".join([
                    str(j), fmt6(x), fmt6(real.upper[j]), fmt6(real.lower[j]),
                    fmt6(fault),
                ])
            )
    else:
        lines = ["index,top,bottom,hq"]
        for i in range(len(real.top)):
            lines.append(
                ",".join([
                    str(i), fmt6(real.top[i]), fmt6(real.bottom[i]),
                    fmt6(real.hq_bottom[i]),
                ])
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# trajectory plot


def _scale(vals, lo, hi, out_lo, out_hi):
    if hi == lo:
        hi = lo + 1.0
    return out_lo + (np.asarray(vals, dtype=float) - lo) * (out_hi - out_lo) / (hi - lo)


def _polyline(xs, ys, style: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" {style}/>'


def _polygon(xs, ys, style: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polygon points="{pts}" {style}/>'


def write_trajectory_svg(path: str, real, tvds: np.ndarray, title: str) -> None:
    """Render boundaries, pay zones, and the drilled path to a standalone SVG.

    Works for both reservoir types: anything with ``top``/``bottom`` plus an
    ``hq_bottom`` (layered), or ``upper``/``lower`` plus fault candidate
    positions (faulted). Depth increases downward on screen, like a section.
    """
    width, height = 860.0, 420.0
    ml, mr, mt, mb = 60.0, 20.0, 40.0, 30.0
    if hasattr(real, "upper"):
        top = np.asarray(real.upper, dtype=float)
        bottom = np.asarray(real.lower, dtype=float)
        band = None
        xs_data = np.asarray(real.xs, dtype=float)
        vlines = [loc for loc in real.fault_locations]
    else:
        top = np.asarray(real.top, dtype=float)
        bottom = np.asarray(real.bottom, dtype=float)
        band = np.asarray(real.hq_bottom, dtype=float)
        xs_data = np.arange(len(top), dtype=float)
        vlines = []
    tvds = np.asarray(tvds, dtype=float)
    n = min(len(tvds), len(top))
    z_all = np.concatenate([top, bottom, tvds])
    z_lo, z_hi = float(z_all.min()) - 2.0, float(z_all.max()) + 2.0
    x_lo, x_hi = float(xs_data[0]), float(xs_data[-1])

    def sx(v):
        return _scale(v, x_lo, x_hi, ml, width - mr)

    def sy(v):
        return _scale(v, z_lo, z_hi, mt, height - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{ml:.0f}" y="24" font-family="monospace" font-size="14">{title}</text>',
    ]
    poly_x = np.concatenate([xs_data, xs_data[::-1]])
    poly_y = np.concatenate([top, bottom[::-1]])
    parts.append(_polygon(sx(poly_x), sy(poly_y), 'fill="#dde8f0" stroke="none"'))
    if band is not None:
        band_y = np.concatenate([top, band[::-1]])
        parts.append(_polygon(sx(poly_x), sy(band_y), 'fill="#c4dcc4" stroke="none"'))
    for loc in vlines:
        x = float(sx(loc))
        parts.append(
            f'<line x1="{x:.2f}" y1="{mt:.2f}" x2="{x:.2f}" y2="{height - mb:.2f}" '
            'stroke="#888888" stroke-dasharray="4,3" stroke-width="1"/>'
        )
    parts.append(_polyline(sx(xs_data), sy(top), 'fill="none" stroke="#4477aa" stroke-width="1.5"'))
    parts.append(_polyline(sx(xs_data), sy(bottom), 'fill="none" stroke="#4477aa" stroke-width="1.5"'))
    parts.append(
        _polyline(sx(xs_data[:n]), sy(tvds[:n]), 'fill="none" stroke="#cc3311" stroke-width="2"')
    )
    for z in (z_lo + 2.0, z_hi - 2.0):
        parts.append(
            f'<text x="4" y="{float(sy(z)):.2f}" font-family="monospace" font-size="11">{z:.1f}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# binary checkpoint container


def write_blob(path: str, meta: dict, arrays: list[np.ndarray]) -> None:
    """Checkpoint container: JSON header (sorted keys) plus raw float64/int64
    array blobs, all little-endian."""
    header = json.dumps(meta, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_BLOB_MAGIC)
        fh.write(struct.pack("<II", _BLOB_VERSION, len(header)))
        fh.write(header)
        fh.write(struct.pack("<I", len(arrays)))
        for arr in arrays:
            arr = np.ascontiguousarray(arr)
            if arr.dtype.kind == "f":
                arr = arr.astype("<f8")
                code = b"f"
            elif arr.dtype.kind in "iu":
                arr = arr.astype("<i8")
                code = b"i"
            else:
                raise TypeError(f"unsupported array dtype: {arr.dtype}")
            fh.write(code)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def read_blob(path: str) -> tuple[dict, list[np.ndarray]]:
    with open(path, "rb") as fh:
        if fh.read(4) != _BLOB_MAGIC:
            raise ValueError(f"{path} is not a checkpoint")
        version, header_len = struct.unpack("<II", fh.read(8))
        if version != _BLOB_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        meta = json.loads(fh.read(header_len).decode())
        (n_arrays,) = struct.unpack("<I", fh.read(4))
        arrays = []
        for _ in range(n_arrays):
            code = fh.read(1)
            (ndim,) = struct.unpack("<I", fh.read(4))
            shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
            count = int(np.prod(shape)) if shape else 1
            dtype = "<f8" if code == b"f" else "<i8"
            data = np.frombuffer(fh.read(8 * count), dtype=dtype).reshape(shape)
            arrays.append(data.astype(float) if code == b"f" else data.astype(np.int64))
    return meta, arrays


def write_timing(path: str, timings: dict) -> None:
    """Wall-clock sidecar; the only output allowed to differ between reruns."""
    with open(path, "w") as fh:
        json.dump(timings, fh, sort_keys=True, indent=2)
        fh.write("\n")
