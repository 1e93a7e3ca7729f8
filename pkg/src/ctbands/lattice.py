"""Bipartite lattices, the CT-symmetric Hamiltonian and its symmetry checks.

Site ordering is all A sites first, then all B sites, so the assembled
matrix is literally ``[[i*gamma*I, Q], [Q^H, -i*gamma*I]]``.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .numerics import as_complex_matrix


@dataclass(frozen=True, eq=False)
class BipartiteLattice:
    """Sublattices A and B of equal size ``n`` joined by the coupling block.

    ``coupling[i, j]`` is the hopping from B-site ``j`` to A-site ``i``.
    """

    coupling: np.ndarray
    labels: dict = field(default=None, compare=False)

    def __post_init__(self):
        q = as_complex_matrix(self.coupling)
        if q.shape[0] != q.shape[1]:
            raise DimensionMismatch(
                f"coupling block must be square (equal sublattices), got {q.shape}"
            )
        q.setflags(write=False)
        object.__setattr__(self, "coupling", q)
        if self.labels is not None:
            for key in ("A", "B"):
                if len(self.labels.get(key, ())) != q.shape[0]:
                    raise DimensionMismatch(f"need {q.shape[0]} labels for sublattice {key}")

    @property
    def n(self):
        return self.coupling.shape[0]

    @property
    def is_real(self):
        return not np.any(self.coupling.imag)

    def to_dict(self):
        q = self.coupling
        rows, cols = np.nonzero(q)
        doc = {
            "n": int(self.n),
            "couplings": [
                [int(i), int(j), float(q[i, j].real), float(q[i, j].imag)]
                for i, j in zip(rows, cols)
            ],
        }
        if self.labels is not None:
            doc["labels"] = {k: list(v) for k, v in self.labels.items()}
        return doc

    @classmethod
    def from_dict(cls, doc):
        try:
            n = int(doc["n"])
            entries = doc.get("couplings", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed lattice document: {exc}") from None
        if n < 1:
            raise ValueError("lattice needs n >= 1")
        q = np.zeros((n, n), dtype=np.complex128)
        for entry in entries:
            if len(entry) != 4:
                raise ValueError(f"coupling entry must be [i, j, re, im], got {entry!r}")
            i, j, re, im = entry
            if not (0 <= int(i) < n and 0 <= int(j) < n):
                raise DimensionMismatch(f"coupling index ({i}, {j}) outside 0..{n - 1}")
            q[int(i), int(j)] += complex(float(re), float(im))
        return cls(q, doc.get("labels"))

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def load_lattice(path):
    with open(path) as fh:
        return BipartiteLattice.from_json(fh.read())


def save_lattice(lattice, path):
    with open(path, "w") as fh:
        fh.write(lattice.to_json(indent=1))
        fh.write("\n")


@dataclass(frozen=True, eq=False)
class NhHamiltonian:
    lattice: BipartiteLattice
    gamma: float
    matrix: np.ndarray

    @property
    def n(self):
        return self.lattice.n

    @property
    def dim(self):
        return 2 * self.lattice.n

    def norm(self):
        """Spectral norm, used to scale residual tolerances."""
        return float(np.linalg.norm(self.matrix, 2))


def assemble(lattice, gamma):
    """Build ``H = H0 + i*gamma*(P_A - P_B)`` for a bipartite lattice."""
    gamma = float(gamma)
    if not np.isfinite(gamma):
        raise ValueError("gamma must be finite")
    if not isinstance(lattice, BipartiteLattice):
        lattice = BipartiteLattice(lattice)
    q = lattice.coupling
    n = lattice.n
    eye = np.eye(n)
    h = np.block([[1j * gamma * eye, q], [q.conj().T, -1j * gamma * eye]])
    h.setflags(write=False)
    return NhHamiltonian(lattice, gamma, h)


def chiral_signs(n):
    return np.concatenate([np.ones(n), -np.ones(n)])


def apply_chiral(state):
    """Flip the sign of the B-sublattice half of a ``2N`` state vector."""
    state = np.asarray(state)
    if state.ndim != 1 or state.shape[0] % 2:
        raise DimensionMismatch(f"state must be a vector of even length, got shape {state.shape}")
    return state * chiral_signs(state.shape[0] // 2)


def apply_ct(state):
    """Chiral operator after complex conjugation (antiunitary CT)."""
    return apply_chiral(np.conj(state))


def ct_residual_matrix(matrix):
    matrix = np.asarray(matrix)
    c = chiral_signs(matrix.shape[0] // 2)
    return c[:, None] * matrix.conj() * c[None, :] + matrix


def check_ct_anticommutation(h):
    """Max-norm of ``C conj(H) C + H``; zero when H anticommutes with CT.

    Only guaranteed to vanish for real couplings; complex couplings are
    reported, not assumed symmetric.
    """
    matrix = h.matrix if isinstance(h, NhHamiltonian) else np.asarray(h)
    if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise DimensionMismatch(f"Hamiltonian must be 2N x 2N, got {matrix.shape}")
    return float(np.max(np.abs(ct_residual_matrix(matrix))))


def check_conjugate_pair_spectrum(eigenvalues, tol=1e-9):
    """True if the eigenvalue multiset is closed under complex conjugation.

    Each value is greedily matched to the nearest unused value within
    ``tol`` of its conjugate. Real values may match themselves.
    """
    values = np.asarray(eigenvalues, dtype=np.complex128).ravel()
    unused = np.ones(values.size, dtype=bool)
    for idx in np.argsort(-np.abs(values.imag), kind="stable"):
        if not unused[idx]:
            continue
        target = np.conj(values[idx])
        if abs(values[idx].imag) <= tol:
            unused[idx] = False
            continue
        dist = np.where(unused, np.abs(values - target), np.inf)
        dist[idx] = np.inf
        match = int(np.argmin(dist))
        if dist[match] > tol:
            return False
        unused[idx] = unused[match] = False
    return True
