#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Deterministic hard rasterisation of triangle meshes.

Every pixel centre is tested against every triangle whose screen bounding
box contains it; the covering triangle with the smallest perspective-correct
depth wins and ties go to the lower face index. Edge functions are always
evaluated from the lower to the higher vertex index of the edge, so two
triangles that share an edge see bit-identical values on it, and a top-left
style rule assigns pixels lying exactly on the edge to one of them.

Triangles with any vertex at or behind the near plane are discarded as a
whole. There is no backface culling.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import logging
from dataclasses import dataclass

import numpy as np

from PIL import Image

from .camera import NEAR_PLANE
from ..utils import atomic_write, split_bands, thread_count, thread_map

# =============================================================================
# CONSTANTS
# =============================================================================

#: Maximum number of (face, pixel) candidate pairs evaluated at once.
CANDIDATE_CHUNK = 2**20

logger = logging.getLogger(__name__)


# =============================================================================
# RASTER BUFFER
# =============================================================================


@dataclass(frozen=True, eq=False)
class RasterBuffer:
    """Per-pixel visibility of a rasterised mesh.

    Parameters
    ----------
    face_index : array of shape (H, W)
        Index of the visible face, ``-1`` for background.
    barycentric : array of shape (H, W, 3)
        Perspective-correct weights of the visible face vertices (in the
        order of ``faces[face_index]``); zero on background pixels.
    depth : array of shape (H, W)
        Camera-space depth, ``inf`` on background pixels.
    faces : array of shape (F, 3)
        Faces that were rasterised.
    n_vertices : int
        Vertex count of the rasterised mesh.

    """

    face_index: np.ndarray
    barycentric: np.ndarray
    depth: np.ndarray
    faces: np.ndarray
    n_vertices: int

    @property
    def coverage(self):
        """``(H, W)`` booleans, True on pixels covered by the mesh."""
        return self.face_index >= 0

    @property
    def shape(self):
        """``(H, W)``."""
        return self.face_index.shape


# =============================================================================
# TRIANGLE SETUP
# =============================================================================


@dataclass(frozen=True, eq=False)
class _Geometry:
    """Screen-space triangle data shared by every band."""

    face_ids: np.ndarray  # (M,) original face index
    edge_origin: np.ndarray  # (M, 3, 2) lower-index vertex of each edge
    edge_vector: np.ndarray  # (M, 3, 2) higher minus lower vertex
    edge_sign: np.ndarray  # (M, 3) sign giving the normalised edge value
    edge_owns: np.ndarray  # (M, 3) pixels exactly on the edge are inside
    inverse_depth: np.ndarray  # (M, 3)
    x_range: np.ndarray  # (M, 2) principal-point-relative bounding box
    y_range: np.ndarray  # (M, 2)


def _setup_triangles(vertices, faces, camera):
    cam = camera.to_camera(vertices)
    depth = cam[:, 2]
    behind = depth <= NEAR_PLANE
    safe = np.where(behind, 1.0, depth)
    screen = np.column_stack(
        [camera.fx * cam[:, 0] / safe, camera.fy * cam[:, 1] / safe]
    )

    keep = ~np.any(behind[faces], axis=1)
    face_ids = np.flatnonzero(keep)
    tri = faces[face_ids]
    points = screen[tri]  # (M, 3, 2)

    # edge i is opposite vertex i and goes from vertex i+1 to vertex i+2
    start = np.roll(tri, -1, axis=1)
    stop = np.roll(tri, -2, axis=1)
    p_start = np.roll(points, -1, axis=1)
    p_stop = np.roll(points, -2, axis=1)

    forward = start < stop
    low = np.where(forward[..., None], p_start, p_stop)
    high = np.where(forward[..., None], p_stop, p_start)
    edge_vector = high - low
    direction = np.where(forward, 1.0, -1.0)

    a, b, c = points[:, 0], points[:, 1], points[:, 2]
    ab, ac = b - a, c - a
    area = ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0]
    finite = np.all(np.isfinite(points), axis=(1, 2))
    valid = (area != 0) & finite
    orientation = np.sign(area)

    # edge direction once the triangle is oriented with positive area
    oriented = (p_stop - p_start) * orientation[:, None, None]
    owns = (oriented[..., 1] > 0) | (
        (oriented[..., 1] == 0) & (oriented[..., 0] < 0)
    )

    inverse_depth = 1.0 / depth[tri]

    select = np.flatnonzero(valid)
    return _Geometry(
        face_ids=face_ids[select],
        edge_origin=low[select],
        edge_vector=edge_vector[select],
        edge_sign=(direction * orientation[:, None])[select],
        edge_owns=owns[select],
        inverse_depth=inverse_depth[select],
        x_range=np.column_stack(
            [points[..., 0].min(axis=1), points[..., 0].max(axis=1)]
        )[select],
        y_range=np.column_stack(
            [points[..., 1].min(axis=1), points[..., 1].max(axis=1)]
        )[select],
    )


def _evaluate_candidates(geometry, local, px, py):
    """Coverage test and weights of (triangle, sample) pairs.

    ``local`` indexes the triangles of ``geometry``; ``px`` and ``py`` are
    principal-point-relative sample positions.

    Returns
    -------
    inside, depth, barycentric

    """
    origin = geometry.edge_origin[local]
    vector = geometry.edge_vector[local]
    dx = px[:, None] - origin[..., 0]
    dy = py[:, None] - origin[..., 1]
    edges = vector[..., 0] * dy - vector[..., 1] * dx
    edges = edges * geometry.edge_sign[local]

    owns = geometry.edge_owns[local]
    inside = np.all((edges > 0) | ((edges == 0) & owns), axis=1)
    total = edges.sum(axis=1)
    inside &= total > 0

    safe_total = np.where(inside, total, 1.0)
    linear = edges / safe_total[:, None]
    weighted = linear * geometry.inverse_depth[local]
    inverse = weighted.sum(axis=1)
    inverse = np.where(inside, inverse, 1.0)
    barycentric = weighted / inverse[:, None]
    return inside, 1.0 / inverse, barycentric


def _resolve(pixel, depth, face, barycentric):
    """Keep one candidate per pixel: nearest, then lowest face index."""
    if not len(pixel):
        return pixel, depth, face, barycentric
    order = np.lexsort((face, depth, pixel))
    pixel = pixel[order]
    first = np.flatnonzero(np.r_[True, pixel[1:] != pixel[:-1]])
    winners = order[first]
    return pixel[first], depth[winners], face[winners], barycentric[winners]


# =============================================================================
# BANDS
# =============================================================================


def _pixel_span(low, high, centre, size):
    """Conservative inclusive index range of samples inside [low, high]."""
    low = np.clip(low + centre - 0.5, -1.0, size)
    high = np.clip(high + centre - 0.5, -1.0, size)
    start = np.maximum(np.floor(low).astype(np.int64), 0)
    stop = np.minimum(np.ceil(high).astype(np.int64), size - 1)
    return start, stop


def _rasterize_band(geometry, camera, rows):
    row_start, row_stop = rows
    width = camera.width

    x0, x1 = _pixel_span(*geometry.x_range.T, camera.cx, width)
    y0, y1 = _pixel_span(*geometry.y_range.T, camera.cy, camera.height)
    y0 = np.maximum(y0, row_start)
    y1 = np.minimum(y1, row_stop - 1)

    n_cols = x1 - x0 + 1
    n_rows = y1 - y0 + 1
    selected = np.flatnonzero((n_cols > 0) & (n_rows > 0))
    counts = (n_cols * n_rows)[selected]
    if not len(selected):
        empty = np.empty(0, dtype=np.int64)
        return empty, np.empty(0), empty, np.empty((0, 3))

    # whole triangles grouped into chunks of about CANDIDATE_CHUNK pairs
    chunk_of = (np.cumsum(counts) - 1) // CANDIDATE_CHUNK
    bounds = np.flatnonzero(np.r_[True, chunk_of[1:] != chunk_of[:-1]])
    bounds = np.r_[bounds, len(selected)]

    pixels, depths, face_ids, barys = [], [], [], []
    for begin, end in zip(bounds[:-1], bounds[1:]):
        chunk_counts = counts[begin:end]
        local = np.repeat(selected[begin:end], chunk_counts)
        first = np.repeat(np.cumsum(chunk_counts) - chunk_counts, chunk_counts)
        position = np.arange(len(local)) - first
        cols = x0[local] + position % n_cols[local]
        rows_ = y0[local] + position // n_cols[local]

        px = (cols + 0.5) - camera.cx
        py = (rows_ + 0.5) - camera.cy
        inside, depth, bary = _evaluate_candidates(geometry, local, px, py)

        pixels.append(rows_[inside] * width + cols[inside])
        depths.append(depth[inside])
        face_ids.append(geometry.face_ids[local[inside]])
        barys.append(bary[inside])

    return _resolve(
        np.concatenate(pixels),
        np.concatenate(depths),
        np.concatenate(face_ids),
        np.concatenate(barys),
    )


# =============================================================================
# API
# =============================================================================


def rasterize(vertices, faces, camera, n_threads=None):
    """Rasterise a triangle mesh with a hard z-test.

    Parameters
    ----------
    vertices : array-like of shape (N, 3)
        World-space vertex positions.
    faces : array-like of shape (F, 3)
        Triangle vertex indices.
    camera : Camera
        Projection and image size.
    n_threads : int, optional
        Worker threads, one row band each. The output does not depend on
        it. See :py:func:`facedrive.utils.thread_count`.

    Returns
    -------
    RasterBuffer

    """
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.intp)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise ValueError(
            f"vertices must have shape (N, 3), found {vertices.shape}"
        )
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise ValueError(f"faces must have shape (F, 3), found {faces.shape}")
    if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
        raise ValueError("faces reference vertices out of range")

    height, width = camera.height, camera.width
    face_index = np.full(height * width, -1, dtype=np.intp)
    depth = np.full(height * width, np.inf)
    barycentric = np.zeros((height * width, 3))

    geometry = _setup_triangles(vertices, faces, camera)
    if len(geometry.face_ids):
        n_threads = thread_count(n_threads)
        bands = split_bands(height, n_threads)
        logger.debug(
            "Rasterising %d faces into %dx%d over %d bands",
            len(geometry.face_ids),
            width,
            height,
            len(bands),
        )
        results = thread_map(
            lambda rows: _rasterize_band(geometry, camera, rows),
            bands,
            n_threads=n_threads,
        )
        for pixel, band_depth, band_face, band_bary in results:
            face_index[pixel] = band_face
            depth[pixel] = band_depth
            barycentric[pixel] = band_bary

    return RasterBuffer(
        face_index=face_index.reshape(height, width),
        barycentric=barycentric.reshape(height, width, 3),
        depth=depth.reshape(height, width),
        faces=faces,
        n_vertices=len(vertices),
    )


def interpolate_attribute(raster, values):
    """Barycentric interpolation of per-vertex values.

    Parameters
    ----------
    raster : RasterBuffer
    values : array-like of shape (N,) or (N, C)
        One row per vertex of the rasterised mesh.

    Returns
    -------
    numpy.ndarray of shape (H, W, C)
        float64 image, zero on background pixels.

    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2 or len(values) != raster.n_vertices:
        raise ValueError(
            f"expected values of shape ({raster.n_vertices}, C), "
            f"found {values.shape}"
        )
    height, width = raster.shape
    image = np.zeros((height, width, values.shape[1]))
    covered = raster.coverage
    tri = raster.faces[raster.face_index[covered]]
    image[covered] = np.einsum(
        "mk,mkc->mc", raster.barycentric[covered], values[tri]
    )
    return image


def locate_points(vertices, faces, camera, uv):
    """Visible face and weights at arbitrary sub-pixel positions.

    Uses the same coverage and depth rules as :py:func:`rasterize`, so a
    query at a pixel centre reproduces that pixel of the raster.

    Parameters
    ----------
    vertices, faces, camera :
        As in :py:func:`rasterize`.
    uv : array-like of shape (Q, 2)
        Pixel coordinates; the centre of pixel ``(col, row)`` is at
        ``(col + 0.5, row + 0.5)``.

    Returns
    -------
    face_index : (Q,) int array, ``-1`` where nothing is hit.
    barycentric : (Q, 3) float array.
    depth : (Q,) float array, ``inf`` where nothing is hit.

    """
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.intp)
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    n_queries = len(uv)

    face_index = np.full(n_queries, -1, dtype=np.intp)
    depth = np.full(n_queries, np.inf)
    barycentric = np.zeros((n_queries, 3))

    geometry = _setup_triangles(vertices, faces, camera)
    n_faces = len(geometry.face_ids)
    if not n_faces or not n_queries:
        return face_index, barycentric, depth

    px_all = uv[:, 0] - camera.cx
    py_all = uv[:, 1] - camera.cy
    step = max(1, CANDIDATE_CHUNK // n_faces)
    for begin in range(0, n_queries, step):
        query = np.arange(begin, min(begin + step, n_queries))
        query_ids = np.repeat(query, n_faces)
        local = np.tile(np.arange(n_faces), len(query))
        inside, cand_depth, bary = _evaluate_candidates(
            geometry, local, px_all[query_ids], py_all[query_ids]
        )
        hit, hit_depth, hit_face, hit_bary = _resolve(
            query_ids[inside],
            cand_depth[inside],
            geometry.face_ids[local[inside]],
            bary[inside],
        )
        face_index[hit] = hit_face
        depth[hit] = hit_depth
        barycentric[hit] = hit_bary

    return face_index, barycentric, depth


# =============================================================================
# DEBUG IMAGES
# =============================================================================


def face_index_image(raster):
    """Face index + 1 as a 16-bit image (0 is background)."""
    return np.clip(raster.face_index + 1, 0, 2**16 - 1).astype(np.uint16)


def depth_image(raster):
    """Depth mapped to 1..255 (near is bright), 0 on background."""
    image = np.zeros(raster.shape, dtype=np.uint8)
    covered = raster.coverage
    if covered.any():
        depth = raster.depth[covered]
        near, far = depth.min(), depth.max()
        span = far - near if far > near else 1.0
        image[covered] = np.round(255 - 254 * (depth - near) / span)
    return image


def write_pgm(path, image):
    """Write an 8 or 16 bit grey image as a binary PGM file."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"expected a 2D image, found shape {image.shape}")
    if image.dtype == np.uint8:
        pil_image = Image.fromarray(image, mode="L")
    elif image.dtype == np.uint16:
        pil_image = Image.fromarray(image.astype(np.int32), mode="I")
    else:
        raise ValueError(f"unsupported image dtype {image.dtype}")
    with atomic_write(path, "wb") as fp:
        pil_image.save(fp, format="PPM")
