"""JSON / CSV / SVG writers with a fixed header block and stable number formatting."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__

TOOL = "stressfree"


@dataclass(frozen=True)
class Header:
    command: str
    seed: int | None = None

    def lines(self) -> list[str]:
        return [f"tool: {TOOL} {__version__}", f"command: {self.command}", f"seed: {self.seed}"]

    def as_dict(self) -> dict:
        return {"tool": TOOL, "version": __version__, "command": self.command, "seed": self.seed}


def fmt(x) -> str:
    """Shortest decimal string that round-trips to the same double."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no nan/inf literal; keep them readable as strings.
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def to_json(body: dict, header: Header) -> str:
    doc = {"header": header.as_dict(), **_plain(body)}
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def to_csv(columns, rows, header: Header, notes: dict | None = None) -> str:
    buf = io.StringIO()
    for line in header.lines():
        buf.write(f"# {line}\n")
    for k, v in (notes or {}).items():
        buf.write(f"# {k}: {fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------- colors

def _cyclic_table(size: int = 256) -> tuple[str, ...]:
    out = []
    for k in range(size):
        t = 2.0 * math.pi * k / size
        rgb = (0.5 + 0.45 * math.cos(t - s) for s in (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0))
        out.append("#" + "".join(f"{round(255 * c):02x}" for c in rgb))
    return tuple(out)


CYCLIC_256 = _cyclic_table()
NEUTRAL = "#bdbdbd"


def color_for_angle(theta: float) -> str:
    """Colour for a director angle; period π, so θ and θ + π coincide."""
    if not math.isfinite(theta):
        return NEUTRAL
    k = int(math.floor(theta / math.pi * len(CYCLIC_256))) % len(CYCLIC_256)
    return CYCLIC_256[k]


# ---------------------------------------------------------------- svg

@dataclass(frozen=True)
class Shape:
    points: np.ndarray  # (k, 2)
    fill: str = "none"
    stroke: str = "#000000"
    closed: bool = True
    width: float = 0.003


def to_svg(panels: list[list[Shape]], header: Header, size: int = 480, gap: float = 0.15) -> str:
    """Panels side by side in one SVG, mathematical orientation (y up)."""
    boxes = []
    for shapes in panels:
        P = np.vstack([s.points for s in shapes]) if shapes else np.zeros((1, 2))
        boxes.append((P.min(axis=0), P.max(axis=0)))
    span = max(float(np.max(hi - lo)) for lo, hi in boxes) or 1.0
    cell = span * (1.0 + gap)
    width = cell * len(panels)
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    out.write("<!--\n")
    for line in header.lines():
        out.write(f"  {line}\n")
    out.write("  coordinates: y axis flipped to point up\n-->\n")
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size * len(panels)}" height="{size}" '
        f'viewBox="0 0 {fmt(width)} {fmt(cell)}">\n'
    )
    for p, (shapes, (lo, hi)) in enumerate(zip(panels, boxes)):
        cx = p * cell + 0.5 * cell - 0.5 * float(lo[0] + hi[0])
        cy = 0.5 * cell + 0.5 * float(lo[1] + hi[1])
        out.write(f'<g transform="translate({fmt(cx)} {fmt(cy)}) scale(1 -1)">\n')
        for s in shapes:
            pts = " ".join(f"{fmt(round(float(x), 9))},{fmt(round(float(y), 9))}" for x, y in s.points)
            tag = "polygon" if s.closed else "polyline"
            out.write(
                f'<{tag} points="{pts}" fill="{s.fill}" stroke="{s.stroke}" '
                f'stroke-width="{fmt(s.width * span)}"/>\n'
            )
        out.write("</g>\n")
    out.write("</svg>\n")
    return out.getvalue()


def write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
