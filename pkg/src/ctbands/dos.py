"""Density of states of the bilayer bands by box counting on a k-grid."""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BrokenPhase, InsufficientBins
from .models import BilayerSpec, band_grid

MIN_GRID = 64
MIN_BINS = 32


@dataclass(frozen=True, eq=False)
class DosHistogram:
    """Binned ``D(eps)`` in states per unit energy per unit cell.

    ``counts`` holds the raw number of k-samples per bin.
    """

    bin_edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    params: dict

    @property
    def centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    def integral(self):
        return float(np.sum(self.density * self.widths))


def min_coupling_energy(spec):
    """Smallest ``|2J(cos kx + cos ky) + T|`` over the continuous zone."""
    return max(abs(spec.t_hop) - 4.0 * abs(spec.j_hop), 0.0)


def max_energy(spec):
    top = abs(spec.t_hop) + 4.0 * abs(spec.j_hop)
    return math.sqrt(max(top**2 - spec.gamma**2, 0.0))


def dos_histogram(spec, grid, bins, energy_range=None):
    """Histogram both bands of the bilayer on an ``grid x grid`` k-mesh.

    Every sample carries weight ``(2 pi / M)^2 / (4 pi^2) = 1 / M^2``, so the
    histogram integrates to 2 (two states per rung cell). The default energy
    window is symmetric and spans the full bandwidth.
    """
    grid, bins = int(grid), int(bins)
    if grid < MIN_GRID:
        raise ValueError(f"grid must be >= {MIN_GRID}, got {grid}")
    if bins < MIN_BINS:
        raise ValueError(f"bins must be >= {MIN_BINS}, got {bins}")
    gamma_c = min_coupling_energy(spec)
    if abs(spec.gamma) > gamma_c:
        raise BrokenPhase(
            f"|gamma| = {abs(spec.gamma)} > gamma_c = {gamma_c}: spectrum is not real"
        )
    if energy_range is None:
        top = max_energy(spec)
        energy_range = (-top, top)
    lo, hi = map(float, energy_range)
    if not hi > lo:
        raise ValueError("energy_range must be increasing")

    bands = band_grid(BilayerSpec(grid, spec.j_hop, spec.t_hop, spec.gamma))
    energies = bands.all_energies().real
    counts, edges = np.histogram(energies, bins=bins, range=(lo, hi))
    density = counts / float(grid) ** 2 / np.diff(edges)
    params = {
        "J": float(spec.j_hop),
        "T": float(spec.t_hop),
        "gamma": float(spec.gamma),
        "M": grid,
        "B": bins,
    }
    hist = DosHistogram(edges, density, counts, params)
    params["integral"] = hist.integral()
    return hist


def dos_approx(epsilon, j_hop, gamma, gamma_c):
    """Linear near-valley estimate ``|eps| / (4 pi J gamma_c)`` above the gap edge."""
    if not gamma_c > 0:
        raise ValueError("gamma_c must be positive")
    eps = np.abs(np.asarray(epsilon, dtype=float))
    edge = math.sqrt(max(gamma_c**2 - gamma**2, 0.0))
    value = np.where(eps >= edge, eps / (4.0 * math.pi * j_hop * gamma_c), 0.0)
    return float(value) if value.ndim == 0 else value


class LinearFit(NamedTuple):
    slope: float
    r_squared: float


def dos_linear_fit(hist, window=None, through_origin=True):
    """Least-squares fit of ``D`` against ``|eps|`` over bin centres in ``window``.

    Bins from both signs of energy are pooled. With ``through_origin`` the
    model is ``D = slope * |eps|``; otherwise an intercept is fitted too.
    """
    if window is None:
        j = hist.params.get("J", 1.0)
        window = (0.05 * abs(j), 0.5 * abs(j))
    lo, hi = window
    x_all = np.abs(hist.centers)
    mask = (x_all >= lo) & (x_all <= hi)
    if np.count_nonzero(mask) < 5:
        raise InsufficientBins(f"only {np.count_nonzero(mask)} bins inside window {window}")
    x, y = x_all[mask], hist.density[mask]
    if through_origin:
        slope = float(x @ y / (x @ x))
        fitted = slope * x
    else:
        slope, intercept = np.polyfit(x, y, 1)
        slope = float(slope)
        fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return LinearFit(slope, r2)


def symmetry_defect(hist):
    """Worst ``|D(eps) - D(-eps)|`` in units of the sampling tolerance ``2/sqrt(n)``.

    Values at or below 1 mean every mirrored bin pair agrees within
    tolerance. Requires edges symmetric about zero.
    """
    edges = hist.bin_edges
    if not np.allclose(edges, -edges[::-1], rtol=0, atol=1e-12 * np.max(np.abs(edges))):
        raise ValueError("bin edges are not symmetric about zero")
    d, d_mirror = hist.density, hist.density[::-1]
    n = np.maximum(hist.counts, hist.counts[::-1])
    worst = 0.0
    for di, dm, ni in zip(d, d_mirror, n):
        if ni == 0:
            continue
        allowed = 2.0 / math.sqrt(ni) * max(di, dm)
        worst = max(worst, abs(di - dm) / allowed)
    return worst
