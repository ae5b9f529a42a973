"""
Random instance generation on a wrapped-around hexagonal relay layout.

Relays sit at the centers of a 7- or 19-cell hexagonal cluster. The cluster is
wrapped around by the standard toroidal translation set, so every user sees
each relay through its nearest image. Channels follow the
``pathloss_a + pathloss_b * log10(d_km)`` dB pathloss with Rayleigh fading and
are normalized by the noise power, which makes sigma_k^2 = 1.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from app.core.exceptions import UnsupportedLayoutError
from app.models.problem import ProblemInstance
from app.models.scenario import Scenario

logger = logging.getLogger(__name__)

# cluster size -> (rings around the center cell, lattice coordinates of the wrap shift)
_LAYOUTS: Dict[int, Tuple[int, Tuple[int, int]]] = {
    7: (1, (2, 1)),
    19: (2, (3, 2)),
}

_MIN_DISTANCE_M = 1.0


def _basis(spacing: float) -> np.ndarray:
    return spacing * np.array([[1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])


def _layout(num_relays: int) -> Tuple[int, Tuple[int, int]]:
    if num_relays not in _LAYOUTS:
        raise UnsupportedLayoutError(
            f"hexagonal layout supports {sorted(_LAYOUTS)} relays, got {num_relays}"
        )
    return _LAYOUTS[num_relays]


def relay_positions(sc: Scenario) -> np.ndarray:
    """
    Relay ground coordinates in meters, center relay first.

    Sites are ordered by ring and then by angle, so ``active_relays`` keeps the
    innermost relays.

    Returns:
        (num_relays, 2) array

    Raises:
        UnsupportedLayoutError: num_relays is not 7 or 19
    """
    rings, _ = _layout(sc.num_relays)
    sites = [
        (i, j, max(abs(i), abs(j), abs(i + j)))
        for i in range(-rings, rings + 1)
        for j in range(-rings, rings + 1)
        if max(abs(i), abs(j), abs(i + j)) <= rings
    ]
    ij = np.array([(i, j) for i, j, _ in sites], dtype=float)
    ring = np.array([r for _, _, r in sites])
    xy = ij @ _basis(sc.inter_site_distance)
    angle = np.round(np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2 * np.pi), 9)
    order = np.lexsort((angle, ring))
    return xy[order]


def wrap_shifts(sc: Scenario) -> np.ndarray:
    """
    Translations of the cluster images, zero shift first.

    Returns:
        (7, 2) array
    """
    _, (p, q) = _layout(sc.num_relays)
    base = np.array([p, q], dtype=float) @ _basis(sc.inter_site_distance)
    rot = [
        np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        for t in np.arange(6) * np.pi / 3.0
    ]
    return np.vstack([np.zeros(2)] + [r @ base for r in rot])


def wrapped_distances(user_xy: np.ndarray, sc: Scenario) -> np.ndarray:
    """
    Ground distances from users to the nearest image of every relay.

    Returns:
        (K, num_relays) array in meters
    """
    relays = relay_positions(sc)
    images = relays[:, None, :] + wrap_shifts(sc)[None, :, :]
    diff = np.asarray(user_xy, dtype=float)[:, None, None, :] - images[None, :, :, :]
    return np.min(np.linalg.norm(diff, axis=-1), axis=-1)


def link_distances(user_xy: np.ndarray, sc: Scenario) -> np.ndarray:
    """
    3-D user-to-relay distances in meters (users at ground level).
    """
    ground = wrapped_distances(user_xy, sc)
    return np.maximum(np.hypot(ground, sc.relay_height), _MIN_DISTANCE_M)


def pathloss_db(distance_km, sc: Scenario):
    """Pathloss in dB at ``distance_km`` kilometers."""
    return sc.pathloss_a + sc.pathloss_b * np.log10(distance_km)


def noise_power_dbm(sc: Scenario) -> float:
    """Total noise power in dBm over the system bandwidth."""
    return sc.noise_psd_dbm_hz + 10.0 * np.log10(sc.bandwidth_hz)


def normalized_gains(user_xy: np.ndarray, sc: Scenario) -> np.ndarray:
    """
    Large-scale gains divided by the noise power, (K, num_relays).
    """
    loss = pathloss_db(link_distances(user_xy, sc) / 1000.0, sc)
    return 10.0 ** ((-loss - noise_power_dbm(sc)) / 10.0)


def user_positions(sc: Scenario, rng: np.random.Generator) -> np.ndarray:
    """
    Draw users uniformly over the union of the hexagonal cells.

    A cell is picked uniformly and the user is placed uniformly inside it by
    rejection from the bounding square of the hexagon.

    Returns:
        (num_users, 2) array in meters
    """
    relays = relay_positions(sc)
    apothem = sc.inter_site_distance / 2.0
    circumradius = sc.inter_site_distance / np.sqrt(3.0)
    normals = np.array([[np.cos(t), np.sin(t)] for t in (0.0, np.pi / 3.0, 2.0 * np.pi / 3.0)])

    cells = rng.integers(0, len(relays), size=sc.num_users)
    offsets = np.empty((sc.num_users, 2))
    filled = 0
    while filled < sc.num_users:
        batch = rng.uniform(-circumradius, circumradius, size=(2 * (sc.num_users - filled), 2))
        inside = batch[np.all(np.abs(batch @ normals.T) <= apothem, axis=1)]
        take = min(len(inside), sc.num_users - filled)
        offsets[filled:filled + take] = inside[:take]
        filled += take
    return relays[cells] + offsets


def generate_instance(sc: Scenario) -> ProblemInstance:
    """
    Generate the ProblemInstance of a scenario; deterministic given ``sc.seed``.

    Fading is drawn for the full layout before ``active_relays`` is applied, so
    instances that differ only in the active relay count share channels.
    """
    rng = np.random.default_rng(sc.seed)
    users = user_positions(sc, rng)
    gains = normalized_gains(users, sc)
    shape = (sc.num_users, sc.num_relays)
    fading = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    channels = (np.sqrt(gains) * fading)[:, :sc.M]
    logger.debug(
        "generated instance seed=%d M=%d K=%d gamma=%.2f dB cbar=%.2f",
        sc.seed, sc.M, sc.num_users, sc.gamma_db, sc.cbar,
    )
    return ProblemInstance(
        channels=channels,
        noise_powers=np.ones(sc.num_users),
        sinr_targets=np.full(sc.num_users, 10.0 ** (sc.gamma_db / 10.0)),
        fronthaul_caps=np.full(sc.M, sc.cbar),
    )
