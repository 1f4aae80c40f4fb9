import numpy as np


SURFACE_TOLERANCE_KM = 1e-6


def segments_clear(p1: np.ndarray, p2: np.ndarray, center: np.ndarray, radius_km: float) -> np.ndarray:
    """
    Vectorised line-of-sight test against a spherical body.

    :param p1: segment starts, shape (n, 3)
    :param p2: segment ends, shape (n, 3)
    :param center: body center, shape (3,) or (n, 3)
    :param radius_km: body radius
    :return: boolean array, True where the segment keeps clear of the body or an endpoint lies on or inside it
    """
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    p2 = np.atleast_2d(np.asarray(p2, dtype=float))
    center = np.asarray(center, dtype=float)
    direction = p2 - p1
    to_center = center - p1
    length_sq = np.einsum("ij,ij->i", direction, direction)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(length_sq > 0, np.einsum("ij,ij->i", to_center, direction) / length_sq, 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = p1 + s[:, None] * direction
    clearance = np.linalg.norm(closest - center, axis=-1)
    # surface endpoints are judged by the elevation mask instead
    inside = ((np.linalg.norm(p1 - center, axis=-1) <= radius_km + SURFACE_TOLERANCE_KM)
              | (np.linalg.norm(p2 - center, axis=-1) <= radius_km + SURFACE_TOLERANCE_KM))
    return (clearance > radius_km) | inside


def los_clear(p1, p2, center, radius_km: float) -> bool:
    if radius_km < 0:
        raise ValueError(f"Radius must be non-negative, got {radius_km}")
    return bool(segments_clear(p1, p2, center, radius_km)[0])


def elevation_angles(ground: np.ndarray, targets: np.ndarray, body_centers: np.ndarray) -> np.ndarray:
    """
    Vectorised elevation of targets above the local horizon of ground points, in degrees.
    """
    ground = np.atleast_2d(np.asarray(ground, dtype=float))
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    normal = ground - np.asarray(body_centers, dtype=float)
    line = targets - ground
    with np.errstate(invalid="ignore", divide="ignore"):
        sine = (np.einsum("ij,ij->i", normal, line)
                / (np.linalg.norm(normal, axis=-1) * np.linalg.norm(line, axis=-1)))
    return np.degrees(np.arcsin(np.clip(sine, -1.0, 1.0)))


def elevation_angle(gs_pos, sat_pos, body_center) -> float:
    return float(elevation_angles(gs_pos, sat_pos, body_center)[0])
