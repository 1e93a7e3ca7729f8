"""Closed-form spectrum of a CT-symmetric Hamiltonian.

Each singular triplet ``(s, u, v)`` of the coupling block spans a
two-dimensional channel on which ``H`` acts as the 2x2 matrix
``[[i*gamma, s], [s, -i*gamma]]``. Its eigenvalues are
``+/- sqrt(s**2 - gamma**2)`` and the B/A amplitude ratio of the eigenvector
is ``(eps - i*gamma) / s``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroEpsilon
from .lattice import BipartiteLattice, NhHamiltonian, apply_ct, assemble
from .numerics import svd

ZERO_MODE_NOTICE = (
    "ZeroModePolicy: {count} channel(s) with zero coupling energy; "
    "they carry eigenvalues +/- i*gamma on pure A / pure B null vectors"
)


def theta_of(epsilon0, gamma):
    """Phase angle ``theta`` with ``exp(-1j*theta) == (eps_plus - 1j*gamma) / epsilon0``.

    Real for ``|gamma| <= epsilon0``; in the broken phase
    ``theta = sign(gamma) * (pi/2 - 1j*arccosh(|gamma|/epsilon0))``.
    """
    epsilon0 = float(epsilon0)
    gamma = float(gamma)
    if not epsilon0 > 0.0:
        raise ZeroEpsilon(f"theta is undefined for epsilon0 = {epsilon0!r}")
    ratio = gamma / epsilon0
    if abs(ratio) <= 1.0:
        return complex(math.asin(ratio))
    return math.copysign(1.0, gamma) * complex(math.pi / 2, -math.acosh(abs(ratio)))


def omega_norms(theta):
    """Dirac normalisation ``(1 + exp(2 Im theta), 1 + exp(-2 Im theta))``."""
    im = complex(theta).imag
    return 1.0 + math.exp(2.0 * im), 1.0 + math.exp(-2.0 * im)


def branch_energy(epsilon0, gamma):
    """Principal ``sqrt(epsilon0**2 - gamma**2)``: nonnegative real or positive imaginary."""
    d = np.asarray(epsilon0, dtype=float) ** 2 - np.asarray(gamma, dtype=float) ** 2
    return np.where(d >= 0.0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))


@dataclass(frozen=True, eq=False)
class SpectralPair:
    """One pseudo-spin channel of ``H``.

    ``eigenvectors`` has shape ``(2N, 2)``; column 0 belongs to
    ``eigenvalues[0]`` (the ``+`` branch).
    """

    epsilon0: float
    phi_a: np.ndarray
    phi_b: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    theta: complex
    broken: bool
    zero_mode: bool = False

    @property
    def exceptional(self):
        return not self.zero_mode and self.eigenvalues[0] == 0


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    pairs: list
    gamma: float
    gamma_c: float
    fully_real: bool
    zero_modes: int
    notices: list = field(default_factory=list)

    @property
    def n_broken(self):
        return sum(p.broken for p in self.pairs)

    def eigenvalues(self):
        """All ``2N`` eigenvalues, channel by channel (``+`` then ``-``)."""
        return np.concatenate([p.eigenvalues for p in self.pairs])

    def eigenvectors(self):
        """``2N x 2N`` matrix, columns ordered as :meth:`eigenvalues`."""
        return np.hstack([p.eigenvectors for p in self.pairs])

    def to_dict(self, vectors=False):
        channels = []
        for p in self.pairs:
            ch = {
                "epsilon0": float(p.epsilon0),
                "eigenvalues": [[float(e.real), float(e.imag)] for e in p.eigenvalues],
                "broken": bool(p.broken),
            }
            if vectors:
                ch["eigenvectors"] = [
                    [[float(z.real), float(z.imag)] for z in p.eigenvectors[:, k]]
                    for k in range(2)
                ]
            channels.append(ch)
        return {
            "gamma": float(self.gamma),
            "gamma_c": None if math.isinf(self.gamma_c) else float(self.gamma_c),
            "fully_real": bool(self.fully_real),
            "zero_modes": int(self.zero_modes),
            "channels": channels,
        }


def _as_hamiltonian(h, gamma=None):
    if isinstance(h, NhHamiltonian):
        return h
    return assemble(h, 0.0 if gamma is None else gamma)


def solve(h, decomposition=None):
    """Eigenvalues and Dirac-normalised eigenvectors of ``h`` in closed form.

    Parameters
    ----------
    h : NhHamiltonian
    decomposition : SvdResult, optional
        Precomputed SVD of the coupling block (it does not depend on gamma).

    Returns
    -------
    SpectrumReport
        Channels ordered by descending ``epsilon0``.
    """
    h = _as_hamiltonian(h)
    gamma = h.gamma
    dec = decomposition if decomposition is not None else svd(h.lattice.coupling)
    n = h.n
    pairs = []
    for k in range(n):
        s = float(dec.singular_values[k])
        u = dec.left_vectors[:, k]
        v = dec.right_vectors[:, k]
        if s == 0.0:
            pairs.append(_zero_mode_pair(u, v, gamma))
            continue
        eps_plus = complex(branch_energy(s, gamma))
        eigenvalues = np.array([eps_plus, -eps_plus])
        theta = theta_of(s, gamma)
        omegas = omega_norms(theta)
        ratios = _amplitude_ratios(eps_plus, gamma, s)
        vecs = np.empty((2 * n, 2), dtype=np.complex128)
        for col, (ratio, omega) in enumerate(zip(ratios, omegas)):
            vecs[:n, col] = u / math.sqrt(omega)
            vecs[n:, col] = ratio * v / math.sqrt(omega)
        pairs.append(
            SpectralPair(s, u, v, eigenvalues, vecs, theta, broken=s < abs(gamma))
        )

    finite = [p.epsilon0 for p in pairs if not p.zero_mode]
    gamma_c = min(finite) if finite else math.inf
    zero_modes = dec.n_zero
    notices = [ZERO_MODE_NOTICE.format(count=zero_modes)] if zero_modes else []
    return SpectrumReport(
        pairs=pairs,
        gamma=gamma,
        gamma_c=gamma_c,
        fully_real=abs(gamma) < gamma_c and (zero_modes == 0 or gamma == 0),
        zero_modes=zero_modes,
        notices=notices,
    )


def _amplitude_ratios(eps_plus, gamma, epsilon0):
    """B/A amplitude ratios ``(eps - i gamma) / epsilon0`` for ``eps = +/- eps_plus``.

    The ratios multiply to -1. Deep in the broken phase one numerator
    cancels, so only the larger one is evaluated directly.
    """
    num_plus = eps_plus - 1j * gamma
    num_minus = -eps_plus - 1j * gamma
    if abs(num_plus) >= abs(num_minus):
        r_plus = num_plus / epsilon0
        return r_plus, -1.0 / r_plus
    r_minus = num_minus / epsilon0
    return -1.0 / r_minus, r_minus


def _zero_mode_pair(u, v, gamma):
    # Q v = 0 and Q^H u = 0, so H (u, 0) = i*gamma (u, 0) and H (0, v) = -i*gamma (0, v)
    n = u.shape[0]
    a_state = np.concatenate([u, np.zeros(n)])
    b_state = np.concatenate([np.zeros(n), v])
    if gamma >= 0:
        vecs = np.column_stack([a_state, b_state])
    else:
        vecs = np.column_stack([b_state, a_state])
    g = abs(gamma)
    eigenvalues = np.array([1j * g, -1j * g])
    return SpectralPair(0.0, u, v, eigenvalues, vecs, None, broken=g > 0, zero_mode=True)


def eigenpair_residual(h, report):
    """Largest ``|H psi - eps psi| / |H|`` over all eigenpairs."""
    vecs = report.eigenvectors()
    vals = report.eigenvalues()
    res = np.linalg.norm(h.matrix @ vecs - vecs * vals, axis=0)
    scale = h.norm() or 1.0
    return float(np.max(res) / scale)


def dirac_probability_defect(report, reference):
    """Largest per-site ``| |psi|^2 - |phi|^2 |`` over unbroken channels.

    ``reference`` is the ``gamma = 0`` report of the same lattice, so its
    channels share the singular vectors of ``report``. Returns ``None`` when
    no channel is unbroken.
    """
    worst = None
    for p, p0 in zip(report.pairs, reference.pairs):
        if p.broken or p.zero_mode:
            continue
        d = np.max(np.abs(np.abs(p.eigenvectors) ** 2 - np.abs(p0.eigenvectors) ** 2))
        worst = d if worst is None else max(worst, d)
    return None if worst is None else float(worst)


def ct_fixed_point_phase(psi):
    """Overlap ``c`` with ``CT psi = c psi`` (meaningful when ``psi`` is CT-invariant)."""
    return complex(np.vdot(psi, apply_ct(psi)) / np.vdot(psi, psi))


@dataclass(frozen=True)
class ScanPoint:
    gamma: float
    fully_real: bool
    n_broken: int


def exceptional_scan(lattice, gamma_values):
    """Count CT-broken channels (``epsilon0 < |gamma|``) for each gamma."""
    gamma_values = [float(g) for g in gamma_values]
    if not gamma_values:
        raise ValueError("gamma_values must be nonempty")
    if not isinstance(lattice, BipartiteLattice):
        lattice = BipartiteLattice(lattice)
    dec = svd(lattice.coupling)
    s = dec.singular_values
    finite = s[s > 0]
    gamma_c = float(finite.min()) if finite.size else math.inf
    points = []
    for g in gamma_values:
        broken = int(np.count_nonzero(s < abs(g)))
        points.append(ScanPoint(g, abs(g) < gamma_c and (dec.n_zero == 0 or g == 0), broken))
    return points


def locate_transition(points):
    """Bracket ``(last fully real gamma, first non-real gamma)`` along a scan.

    Returns ``None`` when the scan never leaves the fully real phase.
    """
    ordered = sorted(points, key=lambda p: abs(p.gamma))
    previous = None
    for p in ordered:
        if not p.fully_real:
            if previous is None:
                return None
            return previous.gamma, p.gamma
        previous = p
    return None
