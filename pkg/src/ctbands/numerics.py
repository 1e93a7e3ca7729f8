"""Dense complex kernels: Hermitian eigendecomposition and square SVD.

The eigensolver is a cyclic Jacobi method. Rotations are scheduled in
round-robin (tournament) order so that each round applies ``n/2`` disjoint
plane rotations at once, which keeps the inner loop in numpy.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

MAX_SWEEPS = 100
ZERO_SINGULAR_RTOL = 1e-9


def as_complex_matrix(m):
    """Return ``m`` as a 2-D complex128 array, copying."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_defect(m):
    """Largest ``|M[i,j] - conj(M[j,i])|``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m, tol=1e-12):
    m = np.asarray(m)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    return hermitian_defect(m) <= tol * scale


def _round_robin(m):
    """Tournament schedule for ``m`` (even) indices: ``m - 1`` rounds of ``m/2`` pairs."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        p = np.array(players[:half])
        q = np.array(players[::-1][:half])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def hermitian_eigen(m, tol=1e-12, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a Hermitian matrix with cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Hermitian matrix. Hermiticity is checked to ``tol * max|m|``.
    tol : float
        Relative tolerance for the symmetry check.
    max_sweeps : int
        Cap on full Jacobi sweeps before :class:`NoConvergence` is raised.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Ascending real eigenvalues.
    eigenvectors : ndarray, shape (n, n)
        Unitary matrix whose columns are the eigenvectors.
    """
    a = as_complex_matrix(m)
    n, n2 = a.shape
    if n != n2:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    if n == 0:
        raise DimensionMismatch("matrix must have dimension >= 1")
    if not is_hermitian(a, tol):
        raise NotHermitian(
            f"matrix is not Hermitian: defect {hermitian_defect(a):.3e} "
            f"exceeds {tol:g} * max|M|"
        )
    a = 0.5 * (a + a.conj().T)

    size = n + (n % 2)
    if size != n:
        a = np.pad(a, ((0, 1), (0, 1)))
    v = np.eye(size, dtype=np.complex128)

    fro = float(np.linalg.norm(a))
    threshold = n * max(np.finfo(float).eps * fro, np.finfo(float).tiny)
    schedule = _round_robin(size) if size > 1 else []

    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        for p, q in schedule:
            _rotate_round(a, v, p, q)
        sweeps += 1

    w = np.real(np.diag(a))[:n]
    v = v[:n, :n]
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _rotation(app, aqq, apq):
    """Per-pair unitary ``[[upp, upq], [uqp, uqq]]`` that diagonalises ``[[app, apq], [conj(apq), aqq]]``."""
    r = np.abs(apq)
    # subnormal couplings would overflow the phase and tau
    active = r > np.finfo(float).tiny
    safe_r = np.where(active, r, 1.0)
    with np.errstate(over="ignore"):
        tau = (aqq - app) / (2.0 * safe_r)
        sign = np.where(tau >= 0.0, 1.0, -1.0)
        t = sign / (np.abs(tau) + np.hypot(1.0, tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    phase = np.where(active, np.conj(apq) / safe_r, 1.0)
    return c, s, -s * phase, c * phase


def _rotate_columns(m, p, q, upp, upq, uqp, uqq):
    col_p = m[:, p].copy()
    col_q = m[:, q]
    m[:, p] = col_p * upp + col_q * uqp
    m[:, q] = col_p * upq + col_q * uqq


def _rotate_round(a, v, p, q):
    """Apply one round of disjoint rotations zeroing ``a[p, q]`` in place."""
    upp, upq, uqp, uqq = _rotation(a[p, p].real, a[q, q].real, a[p, q])
    _rotate_columns(a, p, q, upp, upq, uqp, uqq)

    row_p = a[p, :].copy()
    row_q = a[q, :]
    a[p, :] = np.conj(upp)[:, None] * row_p + np.conj(uqp)[:, None] * row_q
    a[q, :] = np.conj(upq)[:, None] * row_p + np.conj(uqq)[:, None] * row_q

    a[p, q] = 0.0
    a[q, p] = 0.0
    _rotate_columns(v, p, q, upp, upq, uqp, uqq)


def _orthogonalise_columns(b, v, max_sweeps=MAX_SWEEPS):
    """One-sided Jacobi: rotate columns of ``b`` (and ``v``) until mutually orthogonal.

    Started from ``b = Q V`` with ``V`` from the Gram matrix, this restores
    the relative accuracy lost by squaring ``Q``.
    """
    n = b.shape[1]
    size = n + (n % 2)
    if size != n:
        b = np.pad(b, ((0, 0), (0, 1)))
        v = np.pad(v, ((0, 1), (0, 1)))
    schedule = _round_robin(size) if size > 1 else []
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        worst = 0.0
        for p, q in schedule:
            alpha = np.sum(np.abs(b[:, p]) ** 2, axis=0)
            beta = np.sum(np.abs(b[:, q]) ** 2, axis=0)
            gram = np.sum(np.conj(b[:, p]) * b[:, q], axis=0)
            scale = np.sqrt(alpha * beta)
            rel = np.where(scale > 0, np.abs(gram) / np.where(scale > 0, scale, 1.0), 0.0)
            worst = max(worst, float(rel.max()))
            gram = np.where(rel > eps, gram, 0.0)
            rot = _rotation(alpha, beta, gram)
            _rotate_columns(b, p, q, *rot)
            _rotate_columns(v, p, q, *rot)
        if worst <= size * eps:
            return b[:, :n], v[:n, :n]
    raise NoConvergence(f"column orthogonalisation did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True)
class SvdResult:
    """Singular triplets of a square matrix ``Q``.

    ``Q @ right_vectors[:, n] == singular_values[n] * left_vectors[:, n]``.
    Left vectors live on sublattice A, right vectors on sublattice B.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    n_zero: int = 0

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def svd(q, tol=1e-12):
    """Singular value decomposition of a square complex matrix via ``Q^H Q``.

    Right vectors come from the eigenvectors of ``Q^H Q``; a one-sided Jacobi
    pass on ``Q V`` then makes the columns exactly orthogonal.

    Singular values are returned in descending order. Values at or below
    ``1e-9 * max(s)`` are zero modes: they are reported as exactly ``0`` and
    their left vectors are completed to an orthonormal basis.
    """
    q = as_complex_matrix(q)
    n, n2 = q.shape
    if n != n2:
        raise DimensionMismatch(f"coupling block must be square, got {q.shape}")

    _, v = hermitian_eigen(q.conj().T @ q, tol=tol)
    qv, v = _orthogonalise_columns(q @ v, v)
    # |Q v| is accurate to eps*|Q| even for tiny singular values, sqrt(eigenvalue) is not
    s = np.linalg.norm(qv, axis=0)
    order = np.argsort(-s, kind="stable")
    s, v, qv = s[order], v[:, order], qv[:, order]

    cutoff = ZERO_SINGULAR_RTOL * (s[0] if n else 0.0)
    nonzero = s > cutoff
    if s[0] == 0.0:
        nonzero[:] = False
    u = np.zeros_like(q)
    u[:, nonzero] = qv[:, nonzero] / s[nonzero]
    n_zero = int(np.count_nonzero(~nonzero))
    if n_zero:
        u[:, ~nonzero] = _complete_basis(u[:, nonzero], n_zero)
        s = np.where(nonzero, s, 0.0)
    return SvdResult(s, u, v, n_zero)


def _complete_basis(u, count):
    """Orthonormal columns spanning (part of) the complement of ``u``'s span."""
    n = u.shape[0]
    basis = [u[:, i] for i in range(u.shape[1])]
    extra = []
    projector = np.eye(n, dtype=np.complex128) - u @ u.conj().T
    residual_norms = np.linalg.norm(projector, axis=0)
    for idx in np.argsort(-residual_norms, kind="stable"):
        if len(extra) == count:
            break
        w = np.zeros(n, dtype=np.complex128)
        w[idx] = 1.0
        for _ in range(2):
            for b in basis + extra:
                w = w - b * np.vdot(b, w)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            extra.append(w / norm)
    return np.column_stack(extra)
