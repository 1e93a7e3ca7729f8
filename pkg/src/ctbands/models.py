"""Rice-Mele ring and bilayer square lattice: builders and analytic bands."""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BrokenBipartiteness, OddSize, OutsideRegime
from .lattice import BipartiteLattice
from .spectra import branch_energy


@dataclass(frozen=True)
class RiceMeleSpec:
    """Periodic dimerised ring of ``n_cells`` A-B cells, hoppings ``1 -/+ delta``."""

    n_cells: int
    delta: float

    def hopping(self, j):
        """``J_j = 1 + (-1)**j * delta`` for bond ``j`` counted from 1."""
        return 1.0 + (-1) ** j * self.delta


def rice_mele_lattice(spec):
    n = int(spec.n_cells)
    if n < 2:
        raise ValueError("Rice-Mele ring needs n_cells >= 2")
    if abs(spec.delta) >= 1:
        warnings.warn(f"|delta| = {abs(spec.delta)} >= 1: hoppings change sign", stacklevel=2)
    q = np.zeros((n, n))
    for j in range(n):
        # intra-cell bond A_j -- B_j carries J_{2j-1}, inter-cell bond B_j -- A_{j+1} carries J_{2j}
        q[j, j] += spec.hopping(2 * j + 1)
        q[(j + 1) % n, j] += spec.hopping(2 * j + 2)
    labels = {"A": [f"A{j + 1}" for j in range(n)], "B": [f"B{j + 1}" for j in range(n)]}
    return BipartiteLattice(q, labels)


def rice_mele_k_grid(n_cells):
    return 2 * np.pi * np.arange(1, n_cells + 1) / n_cells


def rice_mele_dispersion(delta, k, gamma=0.0):
    """``(epsilon0, epsilon)`` on the positive branch.

    ``epsilon0 = 2 sqrt(delta^2 + (1 - delta^2) cos^2(k/2))`` and
    ``epsilon = sqrt(epsilon0^2 - gamma^2)`` (principal branch).
    """
    eps0 = 2.0 * np.sqrt(delta**2 + (1.0 - delta**2) * np.cos(np.asarray(k) / 2.0) ** 2)
    eps = branch_energy(eps0, gamma)
    if np.ndim(eps0) == 0:
        return float(eps0), complex(eps)
    return eps0, eps


@dataclass(frozen=True)
class BilayerSpec:
    """Two ``n x n`` periodic square layers joined by vertical rungs.

    ``j_hop`` is the intra-layer hopping, ``t_hop`` the rung hopping and
    ``gamma`` the staggered imaginary potential strength.
    """

    n: int
    j_hop: float = 1.0
    t_hop: float = 5.0
    gamma: float = 0.0

    @property
    def gamma_c(self):
        """Exceptional point ``T - 4J`` (lowest coupling energy, at the valley)."""
        return self.t_hop - 4.0 * self.j_hop

    def with_gamma(self, gamma):
        return BilayerSpec(self.n, self.j_hop, self.t_hop, gamma)


def _regime_warning(spec):
    if not spec.t_hop > 4.0 * spec.j_hop:
        warnings.warn(
            f"T = {spec.t_hop} <= 4J = {4.0 * spec.j_hop}: outside the valley regime",
            stacklevel=3,
        )


def site_parity(layer, j, l):
    """Sign of the imaginary potential on site ``(layer, j, l)``; +1 means sublattice A."""
    return -1 if (layer + j + l) % 2 else 1


def bilayer_lattice(spec):
    """Real-space coupling block of the bilayer.

    Sites are ``(layer, j, l)`` with ``layer`` in {1, 2} and ``j, l`` in
    ``1..n``. Every rung ``(j, l)`` holds one A site (layer
    ``(3 + (-1)**(j+l)) / 2``) and one B site, so both sublattices are
    indexed by the rung index ``(j-1)*n + (l-1)``.
    """
    n = int(spec.n)
    if n < 2:
        raise ValueError("bilayer needs n >= 2")
    if n % 2:
        raise OddSize(f"n = {n} is odd: the valley momentum pi is not on the k-grid")
    _regime_warning(spec)

    def rung(j, l):
        return (j - 1) * n + (l - 1)

    def layer_a(j, l):
        return (3 + (-1) ** (j + l)) // 2

    size = n * n
    q = np.zeros((size, size))
    labels_a, labels_b = [None] * size, [None] * size
    for j in range(1, n + 1):
        for l in range(1, n + 1):
            la = layer_a(j, l)
            labels_a[rung(j, l)] = f"{la},{j},{l}"
            labels_b[rung(j, l)] = f"{3 - la},{j},{l}"

    def add_bond(x, y, amplitude):
        px, py = site_parity(*x), site_parity(*y)
        if px == py:
            raise BrokenBipartiteness(f"bond {x} -- {y} joins sites of the same sublattice")
        a, b = (x, y) if px > 0 else (y, x)
        q[rung(a[1], a[2]), rung(b[1], b[2])] += amplitude

    for j in range(1, n + 1):
        for l in range(1, n + 1):
            add_bond((1, j, l), (2, j, l), spec.t_hop)
            jn, ln = j % n + 1, l % n + 1
            for layer in (1, 2):
                add_bond((layer, j, l), (layer, jn, l), spec.j_hop)
                add_bond((layer, j, l), (layer, j, ln), spec.j_hop)
    return BipartiteLattice(q, {"A": labels_a, "B": labels_b})


def bilayer_k_grid(n):
    return 2 * np.pi * np.arange(1, n + 1) / n


def bilayer_epsilon0(spec, k_x, k_y, sector=1):
    """``sector * (2J [cos k_x + cos k_y] + T)``."""
    return sector * (2.0 * spec.j_hop * (np.cos(k_x) + np.cos(k_y)) + spec.t_hop)


def bilayer_dispersion(spec, k_x, k_y, sector=1):
    """``(epsilon0, epsilon)`` for sector ``+1`` or ``-1``.

    ``epsilon = sector * sqrt(epsilon0**2 - gamma**2)`` with the principal
    root, so the ``-`` sector is the negative branch of the same channel.
    """
    if sector not in (1, -1):
        raise ValueError("sector must be +1 or -1")
    eps0 = bilayer_epsilon0(spec, k_x, k_y, sector)
    eps = sector * branch_energy(eps0, spec.gamma)
    if np.ndim(eps0) == 0:
        return float(eps0), complex(eps)
    return eps0, eps


@dataclass(frozen=True, eq=False)
class BandGrid:
    """Bilayer bands on the ``N x N`` grid ``k = 2 pi n / N``, ``n = 1..N``.

    ``epsilon0`` and ``energies`` have shape ``(2, N, N)``: axis 0 is the
    sector (``+``, ``-``), then ``(n_x, n_y)`` in row-major order.
    """

    spec: BilayerSpec
    k: np.ndarray
    epsilon0: np.ndarray
    energies: np.ndarray

    sectors = (1, -1)

    def all_energies(self):
        return self.energies.ravel()

    def positive_energies(self):
        return self.energies[0]

    def rows(self, full=False):
        """Yield ``(k_x, k_y, sector, eps0, eps_re, eps_im)`` rows."""
        sectors = (0, 1) if full else (0,)
        n = self.k.size
        for ix in range(n):
            for iy in range(n):
                for s in sectors:
                    e = self.energies[s, ix, iy]
                    yield (
                        float(self.k[ix]),
                        float(self.k[iy]),
                        "+" if s == 0 else "-",
                        float(self.epsilon0[s, ix, iy]),
                        float(e.real),
                        float(e.imag),
                    )


def band_grid(spec):
    n = int(spec.n)
    if n % 2:
        raise OddSize(f"n = {n} is odd: the valley momentum pi is not on the k-grid")
    k = bilayer_k_grid(n)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    eps0 = np.stack([bilayer_epsilon0(spec, kx, ky, s) for s in BandGrid.sectors])
    energies = np.stack([s * branch_energy(eps0[i], spec.gamma) for i, s in enumerate(BandGrid.sectors)])
    return BandGrid(spec, k, eps0, energies)


@dataclass(frozen=True)
class ValleyAnalysis:
    gap: float
    gamma_c: float
    valley_points: list
    hyperboloid: tuple
    v_g: float


def valley_points(n):
    """Grid momenta of type ``(sigma pi, sigma' pi)`` with odd ``sigma, sigma'``."""
    if n % 2:
        return []
    return [(math.pi, math.pi)]


def _check_regime(spec):
    if not spec.t_hop > 4.0 * spec.j_hop:
        raise OutsideRegime(f"valley analysis needs T > 4J, got T={spec.t_hop}, J={spec.j_hop}")
    if abs(spec.gamma) > spec.gamma_c:
        raise OutsideRegime(f"|gamma| = {abs(spec.gamma)} exceeds gamma_c = {spec.gamma_c}")


def band_gap(spec):
    """``2 sqrt((T - 4J)^2 - gamma^2)``, zero at and beyond the exceptional point."""
    return 2.0 * math.sqrt(max(spec.gamma_c**2 - spec.gamma**2, 0.0))


def hyperboloid_params(spec):
    """``(a, b, c)`` of the two-sheet hyperboloid around the valley."""
    _check_regime(spec)
    c = math.sqrt(spec.gamma_c**2 - spec.gamma**2)
    a = c / math.sqrt(2.0 * spec.j_hop * spec.gamma_c)
    return a, a, c


def group_velocity(spec):
    """``J sqrt(2 (T/J - 4))``."""
    _check_regime(spec)
    return spec.j_hop * math.sqrt(2.0 * (spec.t_hop / spec.j_hop - 4.0))


def valley_analysis(spec):
    """Gap, exceptional point, valley momenta, hyperboloid and group velocity.

    ``hyperboloid`` and ``v_g`` are ``None`` when ``|gamma| > gamma_c``;
    call :func:`hyperboloid_params` or :func:`group_velocity` to get an
    :class:`OutsideRegime` error instead.
    """
    if not spec.t_hop > 4.0 * spec.j_hop:
        raise OutsideRegime(f"valley analysis needs T > 4J, got T={spec.t_hop}, J={spec.j_hop}")
    inside = abs(spec.gamma) <= spec.gamma_c
    return ValleyAnalysis(
        gap=band_gap(spec),
        gamma_c=spec.gamma_c,
        valley_points=valley_points(int(spec.n)),
        hyperboloid=hyperboloid_params(spec) if inside else None,
        v_g=group_velocity(spec) if inside else None,
    )


def hyperboloid_residual(spec, k_x, k_y, energy):
    """``|q_x^2/a^2 + q_y^2/b^2 - eps^2/c^2 + 1|`` with ``q = k - (pi, pi)``."""
    a, b, c = hyperboloid_params(spec)
    qx = np.angle(np.exp(1j * (np.asarray(k_x) - math.pi)))
    qy = np.angle(np.exp(1j * (np.asarray(k_y) - math.pi)))
    lhs = qx**2 / a**2 + qy**2 / b**2 - np.abs(energy) ** 2 / c**2
    return np.abs(lhs + 1.0)


def finite_difference_velocity(spec, dk=0.01):
    """Slope of the ``+`` band through the valley along ``k_x``.

    Central difference of the line that follows the upper sheet for
    ``k_x > pi`` and the lower sheet for ``k_x < pi``, i.e.
    ``(eps_+(pi + dk) - eps_-(pi - dk)) / (2 dk)``.
    """
    _, up = bilayer_dispersion(spec, math.pi + dk, math.pi, 1)
    _, down = bilayer_dispersion(spec, math.pi - dk, math.pi, -1)
    return float(((up - down) / (2.0 * dk)).real)
