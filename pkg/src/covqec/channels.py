"""Dense finite-dimensional channel algebra and SU(2) Haar quadrature.

Channels are kept small and explicit: Kraus lists or Choi matrices as numpy
arrays.  Choi matrices are state-normalized throughout, J = (N (x) I)(Phi+),
indexed (out, in) against (out, in); the unnormalized convention needed by
the fidelity SDP is produced at that call site only.

Matrix square roots go through Hermitian eigendecompositions with negative
eigenvalues clipped at -1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "KrausChannel",
    "ChoiMatrix",
    "CovariantParams",
    "HaarQuadrature",
    "CovarianceViolationError",
    "identity_channel",
    "depolarizing_channel",
    "replace_channel",
    "unitary_channel",
    "apply_channel",
    "compose",
    "tensor",
    "mixture",
    "uhlmann_fidelity",
    "entanglement_fidelity",
    "entanglement_error",
    "covariant_params",
    "covariant_choi",
    "cov_fidelity_and_errors",
    "lemma5_bound",
    "twirl_to_covariant",
    "haar_quadrature_su2",
    "su2_from_euler",
    "su2_eigenphase",
    "haar_su2",
    "max_entangled_state",
    "assert_density_matrix",
    "trace_norm",
    "sqrtm_psd",
]

_HERM_TOL = 1e-10


class CovarianceViolationError(ValueError):
    """Raised when a Choi matrix is not covariant to the requested tolerance."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(f"channel is not covariant: reconstruction residual {residual:.3e} > {tol:.3e}")


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------

@dataclass
class KrausChannel:
    dim_in: int
    dim_out: int
    kraus: list[np.ndarray]

    def __post_init__(self) -> None:
        self.kraus = [np.asarray(k, dtype=complex) for k in self.kraus]
        for k in self.kraus:
            if k.shape != (self.dim_out, self.dim_in):
                raise ValueError(f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})")
        acc = sum(k.conj().T @ k for k in self.kraus)
        if np.max(np.abs(acc - np.eye(self.dim_in))) > _HERM_TOL:
            raise ValueError("Kraus operators are not trace preserving")

    def choi(self) -> "ChoiMatrix":
        d = self.dim_in
        mat = np.zeros((self.dim_out * d, self.dim_out * d), dtype=complex)
        for k in self.kraus:
            v = k.reshape(-1)
            mat += np.outer(v, v.conj())
        return ChoiMatrix(d, self.dim_out, mat / d)


@dataclass
class ChoiMatrix:
    dim_in: int
    dim_out: int
    mat: np.ndarray
    check: bool = True

    def __post_init__(self) -> None:
        self.mat = np.asarray(self.mat, dtype=complex)
        n = self.dim_in * self.dim_out
        if self.mat.shape != (n, n):
            raise ValueError("Choi matrix has wrong shape")
        if self.check:
            if np.max(np.abs(self.mat - self.mat.conj().T)) > _HERM_TOL:
                raise ValueError("Choi matrix is not Hermitian")
            if np.linalg.eigvalsh(self.mat).min() < -_HERM_TOL:
                raise ValueError("Choi matrix is not PSD")
            marg = _partial_trace_out(self.mat, self.dim_out, self.dim_in)
            if np.max(np.abs(marg - np.eye(self.dim_in) / self.dim_in)) > _HERM_TOL:
                raise ValueError("Choi matrix is not trace preserving")

    def unnormalized(self) -> np.ndarray:
        return self.mat * self.dim_in


@dataclass(frozen=True)
class CovariantParams:
    """A d -> d channel commuting with U (.) U^dag, parametrized by its
    Choi weight off the maximally entangled state: J = (1-a) Phi+ + a rho_perp."""
    d: int
    a: float


def _partial_trace_out(mat: np.ndarray, d_out: int, d_in: int) -> np.ndarray:
    t = mat.reshape(d_out, d_in, d_out, d_in)
    return np.einsum("aiak->ik", t)


def max_entangled_state(d: int) -> np.ndarray:
    """Projector onto |Phi+> = sum_i |ii> / sqrt(d), as a d^2 x d^2 matrix."""
    v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# constructors and algebra
# ---------------------------------------------------------------------------

def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d, d, [np.eye(d, dtype=complex)])


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    return KrausChannel(u.shape[1], u.shape[0], [u])


def depolarizing_channel(p: float, d: int = 2) -> KrausChannel:
    """rho -> (1-p) rho + p I/d."""
    kraus = [np.sqrt(1 - p) * np.eye(d, dtype=complex)]
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = np.sqrt(p / d)
            kraus.append(e)
    return KrausChannel(d, d, kraus)


def replace_channel(sigma: np.ndarray) -> KrausChannel:
    """rho -> Tr(rho) sigma for a fixed state sigma."""
    sigma = np.asarray(sigma, dtype=complex)
    d = sigma.shape[0]
    w, v = np.linalg.eigh(sigma)
    kraus = []
    for i in range(d):
        if w[i] > 1e-14:
            for j in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[:, j] = np.sqrt(w[i]) * v[:, i]
                kraus.append(e)
    return KrausChannel(d, d, kraus)


def apply_channel(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim_in, channel.dim_in):
        raise ValueError("state dimension does not match the channel input")
    return sum(k @ rho @ k.conj().T for k in channel.kraus)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """outer . inner (inner acts first)."""
    if inner.dim_out != outer.dim_in:
        raise ValueError("channel dimensions do not compose")
    kraus = [a @ b for a in outer.kraus for b in inner.kraus]
    return KrausChannel(inner.dim_in, outer.dim_out, kraus)


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    kraus = [np.kron(x, y) for x in a.kraus for y in b.kraus]
    return KrausChannel(a.dim_in * b.dim_in, a.dim_out * b.dim_out, kraus)


def mixture(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    if abs(sum(weights) - 1.0) > 1e-12 or any(w < -1e-15 for w in weights):
        raise ValueError("weights must form a probability vector")
    dims = {(c.dim_in, c.dim_out) for c in channels}
    if len(dims) != 1:
        raise ValueError("mixture components must share dimensions")
    kraus = []
    for c, w in zip(channels, weights):
        kraus.extend(np.sqrt(w) * k for k in c.kraus)
    c0 = channels[0]
    return KrausChannel(c0.dim_in, c0.dim_out, kraus)


def _as_choi(x) -> ChoiMatrix:
    return x.choi() if isinstance(x, KrausChannel) else x


# ---------------------------------------------------------------------------
# fidelity and error measures
# ---------------------------------------------------------------------------

def assert_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace, psd within tol)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("a state must be a square matrix")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"state trace is {np.trace(rho)}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("state has a negative eigenvalue")
    return rho


def sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    if w.min() < -1e-8:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def trace_norm(h: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix."""
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("states must share a dimension")
    s = np.linalg.svd(sqrtm_psd(sigma) @ sqrtm_psd(rho), compute_uv=False)
    return float(min(1.0, s.sum() ** 2))


def entanglement_fidelity(a, b) -> float:
    """F_ent(A, B): Uhlmann fidelity of the Choi states."""
    ja, jb = _as_choi(a), _as_choi(b)
    if (ja.dim_in, ja.dim_out) != (jb.dim_in, jb.dim_out):
        raise ValueError("channels must share dimensions")
    return uhlmann_fidelity(ja.mat, jb.mat)


def entanglement_error(a, b) -> float:
    """eps_ent(A, B): half the trace distance of the Choi states."""
    ja, jb = _as_choi(a), _as_choi(b)
    if (ja.dim_in, ja.dim_out) != (jb.dim_in, jb.dim_out):
        raise ValueError("channels must share dimensions")
    return 0.5 * trace_norm(ja.mat - jb.mat)


# ---------------------------------------------------------------------------
# covariant d -> d channels
# ---------------------------------------------------------------------------

def covariant_choi(params: CovariantParams) -> ChoiMatrix:
    d = params.d
    phi = max_entangled_state(d)
    rho_perp = (np.eye(d * d) - phi) / (d * d - 1)
    return ChoiMatrix(d, d, (1 - params.a) * phi + params.a * rho_perp)


def covariant_params(choi: ChoiMatrix, tol: float = 1e-8) -> CovariantParams:
    """Parameters of a covariant d -> d channel; rejects non-covariant input."""
    if choi.dim_in != choi.dim_out:
        raise ValueError("covariant decomposition needs a d -> d channel")
    d = choi.dim_in
    phi = max_entangled_state(d)
    a = float(np.real(1.0 - np.trace(phi @ choi.mat)))
    params = CovariantParams(d, a)
    residual = float(np.max(np.abs(choi.mat - covariant_choi(params).mat)))
    if residual > tol:
        raise CovarianceViolationError(residual, tol)
    return params


def twirl_to_covariant(choi: ChoiMatrix) -> CovariantParams:
    """Parameters of the twirled channel int dU U . N . U^dag.

    The twirl projects the Choi state onto span{Phi+, rho_perp} and preserves
    the Phi+ overlap, so a = 1 - F_ent(N, I).
    """
    if choi.dim_in != choi.dim_out:
        raise ValueError("twirl needs a d -> d channel")
    d = choi.dim_in
    phi = max_entangled_state(d)
    a = float(np.real(1.0 - np.trace(phi @ choi.mat)))
    a = min(1.0, max(0.0, a))
    return CovariantParams(d, a)


def cov_fidelity_and_errors(pa: CovariantParams, pb: CovariantParams) -> tuple[float, float]:
    """Closed forms on the covariant family:
    F_ent = (sqrt((1-a)(1-b)) + sqrt(ab))^2, eps_ent = |a-b|."""
    if pa.d != pb.d:
        raise ValueError("parameters must share d")
    a, b = pa.a, pb.a
    f = (np.sqrt((1 - a) * (1 - b)) + np.sqrt(a * b)) ** 2
    return float(f), float(abs(a - b))


def lemma5_bound(pa: CovariantParams, f_ent_ab: float, d: int) -> float:
    """Upper bound 9d * max{eps_ent(A, I), 1 - F_ent(A, B)} on eps_wc(B, I).

    Valid only when eps_ent(A, B) <= 1/2; callers check the precondition and
    a trivial bound of 1 is returned when it fails.
    """
    if not 0.0 <= f_ent_ab <= 1.0 + 1e-12:
        raise ValueError("F_ent out of range")
    b_est = pa.a  # eps_ent(A, I) = a
    val = 9 * d * max(b_est, 1.0 - f_ent_ab)
    return float(min(val, 9 * d))


# ---------------------------------------------------------------------------
# SU(2) parametrization and Haar quadrature
# ---------------------------------------------------------------------------

def su2_from_euler(alpha, beta, gamma) -> np.ndarray:
    """U = e^{-i alpha sz/2} e^{-i beta sy/2} e^{-i gamma sz/2}; broadcasts."""
    alpha, beta, gamma = np.broadcast_arrays(*map(np.asarray, (alpha, beta, gamma)))
    cb = np.cos(beta / 2)
    sb = np.sin(beta / 2)
    u = np.empty(alpha.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-0.5j * (alpha + gamma)) * cb
    u[..., 0, 1] = -np.exp(-0.5j * (alpha - gamma)) * sb
    u[..., 1, 0] = np.exp(0.5j * (alpha - gamma)) * sb
    u[..., 1, 1] = np.exp(0.5j * (alpha + gamma)) * cb
    return u


def su2_eigenphase(u: np.ndarray) -> np.ndarray:
    """Rotation half-angle theta in [0, pi]: eigenvalues are e^{+-i theta}."""
    tr = np.real(u[..., 0, 0] + u[..., 1, 1]) / 2.0
    return np.arccos(np.clip(tr, -1.0, 1.0))


def haar_su2(rng: np.random.Generator, size: int) -> np.ndarray:
    """Batch of Haar-random SU(2) matrices via unit quaternions."""
    q = rng.standard_normal((size, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    u = np.empty((size, 2, 2), dtype=complex)
    u[:, 0, 0] = q[:, 0] + 1j * q[:, 3]
    u[:, 0, 1] = q[:, 2] + 1j * q[:, 1]
    u[:, 1, 0] = -q[:, 2] + 1j * q[:, 1]
    u[:, 1, 1] = q[:, 0] - 1j * q[:, 3]
    return u


@dataclass
class HaarQuadrature:
    """Product rule for Haar integration over SU(2).

    Gauss-Legendre in cos(beta) (`order` nodes) and uniform grids in alpha
    over [0, 2pi) and gamma over [0, 4pi) (2 * order nodes each; the 4pi
    range covers both sheets of SU(2), so half-integer-spin harmonics cancel
    exactly).  Weights sum to one.  Integrates any product of matrix
    coefficients with per-axis frequency at most order - 1 exactly, in
    particular every chi_lam chi_mu* with |lam|, |mu| <= order - 1.
    """
    order: int
    euler: np.ndarray = field(repr=False)  # (n_nodes, 3)
    weights: np.ndarray = field(repr=False)

    _matrices: np.ndarray | None = field(default=None, repr=False)

    def matrices(self) -> np.ndarray:
        if self._matrices is None:
            a, b, g = self.euler.T
            self._matrices = su2_from_euler(a, b, g)
        return self._matrices

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))


def haar_quadrature_su2(order: int) -> HaarQuadrature:
    if order < 2:
        raise ValueError("order must be at least 2")
    n_phase = 2 * order
    alphas = 2 * np.pi * np.arange(n_phase) / n_phase
    gammas = 4 * np.pi * np.arange(n_phase) / n_phase
    t, gl_w = np.polynomial.legendre.leggauss(order)
    betas = np.arccos(t)
    a, b, g = np.meshgrid(alphas, betas, gammas, indexing="ij")
    euler = np.stack([a.ravel(), b.ravel(), g.ravel()], axis=1)
    w = np.ones((n_phase, order, n_phase)) * (gl_w / 2.0)[None, :, None]
    weights = (w / n_phase**2).ravel()
    return HaarQuadrature(order, euler, weights)
