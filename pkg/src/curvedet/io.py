"""CSV and SVG export with atomic writes."""

from __future__ import annotations

import io
import os
import tempfile

import numpy as np

from .curves import SampledCurve

CSV_HEADER = "s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau,sigma"
PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}
WIDTH, HEIGHT, MARGIN = 800, 600, 0.05


def write_atomic(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(x) -> str:
    return format(float(x), ".17g")


def curve_csv(curve: SampledCurve) -> str:
    if curve.frames is None or curve.kappa is None or curve.tau is None:
        raise ValueError("CSV export needs frames, kappa and tau")
    sigma = curve.sigma if curve.sigma is not None else np.full(len(curve), np.nan)
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for i in range(len(curve)):
        row = [curve.s[i], *curve.positions[i], *curve.frames[i].ravel(), curve.kappa[i], curve.tau[i], sigma[i]]
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def curve_svg(points, plane: str = "xy") -> str:
    """Static SVG of the projected polyline, autoscaled into an 800x600 view with 5% margin."""
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {sorted(PLANES)}")
    P = np.asarray(points, dtype=float)[:, PLANES[plane]]
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = np.maximum(hi - lo, 1e-300)
    inner_w, inner_h = WIDTH * (1 - 2 * MARGIN), HEIGHT * (1 - 2 * MARGIN)
    scale = min(inner_w / span[0], inner_h / span[1])
    offset = np.array([WIDTH, HEIGHT]) / 2 - scale * (lo + hi) / 2 * np.array([1, -1])
    xs = offset[0] + scale * P[:, 0]
    ys = offset[1] - scale * P[:, 1]
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs, ys))
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">\n'
        f'  <polyline fill="none" stroke="black" stroke-width="1.5" points="{pts}"/>\n'
        "</svg>\n"
    )
