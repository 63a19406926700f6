"""Raster region algebra for image-domain bookkeeping.

Regions are boolean rasters with a marked basepoint, 4-connected material,
8-connected complement, and an empty margin ring.  The algebra mirrors the
set operations used when comparing image domains of solved maps:

* extended_union: union with its holes filled (smallest simply connected
  raster region containing both);
* reduced_intersection: basepoint component of the intersection;
* kernel_of_shrinking: limit region of a strictly shrinking family --
  basepoint component of the interior of the raster-closed intersection;
* schoenfliess_test: does the complement of the closure form a single
  region, with every boundary cell reachable from it?
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import EmptyIntersectionError, InvalidSequenceError

CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
BOX = np.ones((3, 3), dtype=bool)


def _label4(mask):
    return ndimage.label(mask, structure=CROSS)


def _label8(mask):
    return ndimage.label(mask, structure=BOX)


def dilate(mask):
    return ndimage.binary_dilation(mask, structure=CROSS)


def erode(mask):
    return ndimage.binary_erosion(mask, structure=CROSS)


@dataclass
class RasterRegion:
    mask: np.ndarray
    basepoint: tuple

    def __post_init__(self):
        self.mask = np.ascontiguousarray(self.mask, dtype=bool)
        self.basepoint = (int(self.basepoint[0]), int(self.basepoint[1]))

    def validate(self):
        """Basepoint inside, one 4-connected component, empty margin ring."""
        r, c = self.basepoint
        if not (0 <= r < self.mask.shape[0] and 0 <= c < self.mask.shape[1]):
            raise ValueError("basepoint outside the canvas")
        if not self.mask[r, c]:
            raise ValueError("basepoint not inside the region")
        if self.mask[0, :].any() or self.mask[-1, :].any() or self.mask[:, 0].any() or self.mask[:, -1].any():
            raise ValueError("region touches the canvas margin")
        labels, count = _label4(self.mask)
        if count != 1:
            raise ValueError(f"region has {count} 4-connected components")
        return self

    def is_simply_connected(self):
        """No bounded complement component (complement taken 8-connected)."""
        comp = ~self.mask
        labels, count = _label8(comp)
        border = np.unique(
            np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
        )
        border = border[border != 0]
        return bool(np.isin(labels[comp], border).all())

    def area(self):
        return int(self.mask.sum())

    def same_frame(self, other):
        return self.mask.shape == other.mask.shape and self.basepoint == other.basepoint


def fill_holes(mask):
    """Fill bounded complement components (8-connected complement)."""
    comp = ~mask
    labels, _ = _label8(comp)
    border = np.unique(np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]))
    border = border[border != 0]
    bounded = comp & ~np.isin(labels, border)
    return mask | bounded


def extended_union(a, b):
    """Union of the two regions with all holes filled."""
    if not a.same_frame(b):
        raise ValueError("regions live on different frames")
    return RasterRegion(fill_holes(a.mask | b.mask), a.basepoint)


def extended_union_many(regions):
    """Direct n-ary extended union (union everything, then fill)."""
    regions = list(regions)
    if not regions:
        raise ValueError("need at least one region")
    first = regions[0]
    mask = first.mask.copy()
    for r in regions[1:]:
        if not first.same_frame(r):
            raise ValueError("regions live on different frames")
        mask |= r.mask
    return RasterRegion(fill_holes(mask), first.basepoint)


def reduced_intersection(a, b):
    """Basepoint component of the intersection."""
    if not a.same_frame(b):
        raise ValueError("regions live on different frames")
    inter = a.mask & b.mask
    r, c = a.basepoint
    if not inter[r, c]:
        raise EmptyIntersectionError("intersection misses the basepoint")
    labels, _ = _label4(inter)
    return RasterRegion(labels == labels[r, c], a.basepoint)


def reduced_intersection_many(regions):
    """Direct n-ary reduced intersection."""
    regions = list(regions)
    if not regions:
        raise ValueError("need at least one region")
    first = regions[0]
    mask = first.mask.copy()
    for r in regions[1:]:
        if not first.same_frame(r):
            raise ValueError("regions live on different frames")
        mask &= r.mask
    r, c = first.basepoint
    if not mask[r, c]:
        raise EmptyIntersectionError("intersection misses the basepoint")
    labels, _ = _label4(mask)
    return RasterRegion(labels == labels[r, c], first.basepoint)


def boundary_cells(mask):
    """Cells of the region with a 4-neighbor outside it."""
    return mask & ~erode(mask)


def schoenfliess_test(region):
    """Boundary accessibility of the region's raster closure.

    Omega = complement of the one-cell dilation (the raster closure).  True
    iff Omega has exactly one 8-connected component and every boundary cell
    of the region lies within three cross-dilations of Omega.  A region whose
    closure walls off an inner cavity (annulus with a sealed slit) fails the
    first clause; a region with a deep sealed slot fails the second.
    """
    mask = region.mask
    closure = dilate(mask)
    omega = ~closure
    labels, count = _label8(omega)
    if count != 1:
        return False
    # three cross-dilations: the closure retreats Omega one cell from every
    # wall and one more from a slit tip, so even the tip corners of an open
    # slit sit at 4-distance three from Omega
    near = dilate(dilate(dilate(omega)))
    return bool((near | ~boundary_cells(mask)).all())


def kernel_of_shrinking(regions):
    """Kernel of a strictly shrinking family of regions.

    Precondition (checked): dilate(D_{k+1}) inside D_k for every consecutive
    pair.  The kernel is the basepoint component of the one-cell interior of
    the raster closure of the intersection; closing first matches the
    continuum kernel of a decreasing sequence (interior of the intersection
    of closures) and is what lets a two-cell access throat seal in the
    limit.  On families without such throats the closing is a no-op and the
    kernel is plain erode(intersection) at the basepoint.
    """
    regions = list(regions)
    if not regions:
        raise ValueError("need at least one region")
    first = regions[0]
    for i in range(len(regions) - 1):
        if not regions[i].same_frame(regions[i + 1]):
            raise ValueError("regions live on different frames")
        if (dilate(regions[i + 1].mask) & ~regions[i].mask).any():
            raise InvalidSequenceError(
                f"family is not strictly shrinking at step {i} -> {i + 1}", index=i
            )
    inter = first.mask.copy()
    for reg in regions[1:]:
        inter &= reg.mask
    r, c = first.basepoint
    if not inter[r, c]:
        raise EmptyIntersectionError("intersection misses the basepoint")
    closed = erode(dilate(inter))
    interior = erode(closed)
    if not interior[r, c]:
        raise EmptyIntersectionError("kernel interior misses the basepoint")
    labels, _ = _label4(interior)
    return RasterRegion(labels == labels[r, c], first.basepoint)


# ---------------------------------------------------------------------------
# demo family: spiral corridor into a pendant cavity

def _paint_curve(shape, points, half_width):
    """Cells within Euclidean distance half_width of the sampled curve."""
    canvas = np.zeros(shape, dtype=bool)
    ij = np.rint(points).astype(int)
    keep = (
        (ij[:, 0] >= 0) & (ij[:, 0] < shape[0]) & (ij[:, 1] >= 0) & (ij[:, 1] < shape[1])
    )
    canvas[ij[keep, 0], ij[keep, 1]] = True
    if not canvas.any():
        return canvas
    dist = ndimage.distance_transform_edt(~canvas)
    return dist <= half_width


def _disk(shape, center, radius):
    rr, cc = np.ogrid[: shape[0], : shape[1]]
    return (rr - center[0]) ** 2 + (cc - center[1]) ** 2 <= radius * radius


def _spiral_points(center, a_from, a_to, r_at, step_deg=0.2):
    angles = np.arange(a_from, a_to + step_deg, step_deg)
    rad = np.deg2rad(angles)
    r = r_at(angles)
    return np.stack([center[0] + r * np.sin(rad), center[1] + r * np.cos(rad)], axis=1)


def build_shrinking_spiral_family(size=512, levels=3):
    """Strictly shrinking simply connected family whose kernel walls off a cavity.

    Each level carves deeper: a spiral corridor from outside the disk wraps
    further inward with a narrower live tip (half-widths 4 -> 3 -> 2 cells),
    and the final level adds a two-cell throat into a freshly carved pendant
    cavity.  Intersecting, closing, and eroding seals the throat, so the
    kernel encircles the cavity and fails schoenfliess_test while every term
    passes the simple-connectivity invariant.
    """
    if size < 256:
        raise ValueError("demo needs at least a 256-cell canvas")
    if levels != 3:
        raise ValueError("the demo family is calibrated for exactly three levels")
    s = size / 512.0
    center = (size // 2, size // 2)
    body_r0 = 212.0 * s
    # spiral runs from angle -30 deg (radius just outside the body, so the
    # corridor breaches the rim) and ends pointing straight up at 270 deg,
    # which keeps the final throat axis-aligned and exactly two cells wide
    spiral_start_r = 218.0 * s
    spiral_slope = (218.0 - 104.0) * s / 300.0
    r_at = lambda a: spiral_start_r - spiral_slope * (a + 30.0)
    tips = (70.0, 170.0, 270.0)
    half_widths = (4.0 * s, 3.0 * s, 2.0 * s)

    shape = (size, size)
    corridors = []
    corridor = np.zeros(shape, dtype=bool)
    for k in range(levels):
        if k:
            corridor = dilate(corridor)
        a_from = -30.0 if k == 0 else tips[k - 1] - 6.0
        stretch = _paint_curve(shape, _spiral_points(center, a_from, tips[k], r_at), half_widths[k])
        corridor = corridor | stretch
        corridors.append(corridor.copy())

    # pendant cavity past the spiral end, reached only through a two-column
    # throat; the gap between corridor tip and cavity rim leaves enough
    # sealed length to survive closing, eroding, and the test's dilation
    tip_r = r_at(tips[-1])
    cavity_radius = round(14.0 * s)
    cavity_center = (center[0] - round(tip_r - 12.0 * s) + cavity_radius, center[1])
    cavity = _disk(shape, cavity_center, cavity_radius)
    throat = np.zeros(shape, dtype=bool)
    row_hi = center[0] - int(round(tip_r))
    row_lo = cavity_center[0] - cavity_radius + 1
    throat[row_hi : row_lo + 1, center[1] : center[1] + 2] = True

    regions = []
    for k in range(levels):
        body = _disk(shape, center, body_r0 - k)
        mask = body & ~corridors[k]
        if k == levels - 1:
            mask &= ~(cavity | throat)
        bp_angle = np.deg2rad(330.0)
        bp = (
            int(round(center[0] + 160.0 * s * np.sin(bp_angle))),
            int(round(center[1] + 160.0 * s * np.cos(bp_angle))),
        )
        labels, _ = _label4(mask)
        if not mask[bp]:
            raise RuntimeError("demo basepoint fell outside the carved body")
        mask = labels == labels[bp]
        region = RasterRegion(mask, bp)
        region.validate()
        if not region.is_simply_connected():
            raise RuntimeError(f"demo level {k} is not simply connected")
        regions.append(region)

    for i in range(levels - 1):
        if (dilate(regions[i + 1].mask) & ~regions[i].mask).any():
            raise RuntimeError(f"demo family not strictly shrinking at level {i}")
    return regions


# ---------------------------------------------------------------------------
# raster IO: portable bitmap plus a JSON sidecar for the basepoint

def save_region(region, path):
    """Write mask as ASCII PBM (P1) and basepoint metadata alongside."""
    path = Path(path)
    mask = region.mask
    lines = [f"P1", f"{mask.shape[1]} {mask.shape[0]}"]
    for row in mask:
        lines.append(" ".join("1" if v else "0" for v in row))
    path.write_text("\n".join(lines) + "\n")
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "basepoint": list(region.basepoint),
                "shape": list(mask.shape),
                "area": region.area(),
            },
            indent=2,
        )
    )
    return path


def load_region(path):
    path = Path(path)
    tokens = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError(f"{path} is not an ASCII PBM file")
    width, height = int(tokens[1]), int(tokens[2])
    bits = np.array(tokens[3 : 3 + width * height], dtype=int).reshape(height, width)
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = json.loads(sidecar.read_text())
    return RasterRegion(bits.astype(bool), tuple(meta["basepoint"]))
