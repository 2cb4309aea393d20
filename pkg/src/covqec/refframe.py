"""Quantum reference frames for storing an unknown SU(d) rotation.

A reference frame state on 2m qudits is specified entirely by its weight
distribution {q_lam} over Young diagrams of m boxes: the state is the
direct sum over irreps of sqrt(q_lam) times a maximally entangled pair,
and the covariant measurement acts as the identity on every multiplicity
register, so no quantity computed here ever depends on anything but the
weights.  The outcome density of the covariant measurement for relative
rotation U is

    p(U) = | sum_lam sqrt(q_lam) chi_lam(U) |^2 ,

a conjugation-invariant probability density with respect to Haar measure.

Two families of weights are provided: the sine-squared product weights of
the weak erasure model, supported on an explicit viable set of diagrams,
and the Schur-Weyl weights describing s' jointly measured maximally
entangled pairs in the strong model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import pi, sin, cos

import numpy as np

from . import young
from .channels import haar_su2, su2_eigenphase

__all__ = [
    "RefFrameSpec",
    "RefFrameEnsemble",
    "WeakModelLayout",
    "ConfigurationError",
    "TotalReferenceLossError",
    "g_weight",
    "weak_spec",
    "strong_combined_spec",
    "outcome_density",
    "sample_outcome",
    "sample_relative_rotations",
    "survivor_ensembles",
    "interior_set",
    "min_overlap",
    "appendix_e_sum",
    "appendix_e_closed_form",
    "strong_fidelity_form",
    "f_strong",
    "cost_set",
]


class ConfigurationError(ValueError):
    """Raised for physically inconsistent reference-frame parameters."""


class TotalReferenceLossError(RuntimeError):
    """Every reference copy was erased; no rotation information survives."""


@dataclass(frozen=True)
class RefFrameSpec:
    """Weight distribution {q_lam} over diagrams of m boxes (d rows max)."""

    d: int
    m: int
    weights: dict = field(compare=False)

    def __post_init__(self) -> None:
        total = 0.0
        for lam, q in self.weights.items():
            if q < -1e-15:
                raise ValueError("negative weight")
            if not young.is_diagram(lam, self.d) or young.boxes(lam) != self.m:
                raise ValueError(f"diagram {lam} is not a valid label for m={self.m}, d={self.d}")
            total += q
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.weights, reverse=True)

    def gaps(self) -> np.ndarray:
        """SU(2) row gaps of the support, in support() order (d=2 only)."""
        if self.d != 2:
            raise ValueError("gaps() is a d=2 helper")
        return np.array([young.pad(l, 2)[0] - young.pad(l, 2)[1] for l in self.support()])


@dataclass(frozen=True)
class RefFrameEnsemble:
    spec: RefFrameSpec
    copies: int

    def __post_init__(self) -> None:
        if self.copies < 1:
            raise ValueError("need at least one reference copy")

    @property
    def n_r(self) -> int:
        return 2 * self.spec.m * self.copies


@dataclass(frozen=True)
class WeakModelLayout:
    d: int
    n: int
    n_p: int
    n_e: int
    m: int
    big_m: int
    m0: int
    mu_tilde: tuple[int, ...]
    labels: dict = field(compare=False)  # diagram -> coordinate tuple in {0..M}^(d-1)

    @property
    def n_r(self) -> int:
        return self.n - self.n_p

    @property
    def n_prime(self) -> int:
        return self.n_p + self.d - 1


# ---------------------------------------------------------------------------
# weight families
# ---------------------------------------------------------------------------

def g_weight(k: int, big_m: int) -> float:
    """Sine-squared lattice weight g_k = 2/(M+1) sin^2(pi(2k+1)/(2(M+1))).

    Indexed over {0, ..., M}: with M+1 points the weights sum to one
    exactly (the stated range [M] = {1..M} cannot be normalized).
    """
    if not 0 <= k <= big_m:
        raise ValueError(f"index {k} outside {{0..{big_m}}}")
    return 2.0 / (big_m + 1) * sin(pi * (2 * k + 1) / (2 * (big_m + 1))) ** 2


def weak_spec(d: int, m: int, n_p: int, n_e: int = 1) -> tuple[WeakModelLayout, RefFrameSpec]:
    """Weak-model reference frame on 2m qudits.

    The viable support is an affine lattice of diagrams indexed by
    coordinates lt in {0..M}^(d-1):

        lam_i = mu~_i + (2d - i - 1) M + (d - i) + lt_i   (i < d)
        lam_d = mu~_d + (d - 1) M - sum(lt)

    with M = floor((2m/(d(d-1)) - 1)/3), m0 = m - d(d-1)(3M+1)/2 and mu~
    the flattest diagram with m0 boxes.  Every coordinate in the box gives
    a valid partition of m; consecutive-row gaps are at least M+1 apart in
    their base values so shifted diagrams decode uniquely.  Weights are
    independent products of g-weights per coordinate.
    """
    if d < 2:
        raise ConfigurationError("the weak model needs d >= 2")
    big_m = (2 * m - d * (d - 1)) // (3 * d * (d - 1))
    if big_m < 1:
        m_min = 2 * d * (d - 1)
        raise ConfigurationError(
            f"m={m} is too small for the weak model at d={d}; need m >= {m_min} (M >= 1)"
        )
    m0 = m - d * (d - 1) * (3 * big_m + 1) // 2
    if m0 < 0:
        raise ConfigurationError("internal inconsistency: m0 < 0")
    q, r = divmod(m0, d)
    mu_tilde = tuple([q + 1] * r + [q] * (d - r))
    weights: dict = {}
    labels: dict = {}
    for lt in itertools.product(range(big_m + 1), repeat=d - 1):
        lam = [mu_tilde[i] + (2 * d - (i + 1) - 1) * big_m + (d - (i + 1)) + lt[i] for i in range(d - 1)]
        lam.append(mu_tilde[d - 1] + (d - 1) * big_m - sum(lt))
        lam_t = young.normalize(lam)
        if not young.is_diagram(lam_t, d) or young.boxes(lam_t) != m:
            raise ConfigurationError(f"viable-set construction produced invalid diagram {lam}")
        w = 1.0
        for i in range(d - 1):
            w *= g_weight(lt[i], big_m)
        weights[lam_t] = w
        labels[lam_t] = lt
    n_r = 2 * m * (n_e + 1)
    layout = WeakModelLayout(d, n_p + n_r, n_p, n_e, m, big_m, m0, mu_tilde, labels)
    return layout, RefFrameSpec(d, m, weights)


def strong_combined_spec(d: int, s_survivors: int) -> RefFrameSpec:
    """Joint spec of s' surviving maximally entangled pairs: Schur-Weyl weights."""
    if s_survivors < 1:
        raise ValueError("need at least one survivor")
    weights = {
        lam: float(young.schur_weyl_prob(lam, s_survivors, d))
        for lam in young.enumerate_diagrams(s_survivors, d)
    }
    return RefFrameSpec(d, s_survivors, weights)


def survivor_ensembles(ensemble: RefFrameEnsemble, erased_copies: set[int]) -> RefFrameSpec:
    """Spec of the joint measurement on the surviving copies.

    Maximally entangled single-pair copies combine into the Schur-Weyl
    spec of the survivor count.  Copies of any other state (the weak-model
    frames) are measured singly: one intact copy suffices and the paper's
    joint spec for non-product frames is not defined, so the per-copy spec
    is returned unchanged.
    """
    if any(i < 0 or i >= ensemble.copies for i in erased_copies):
        raise ValueError("erased copy index out of range")
    k = ensemble.copies - len(set(erased_copies))
    if k == 0:
        raise TotalReferenceLossError("all reference copies erased")
    spec = ensemble.spec
    is_single_pair = spec.m == 1 and abs(spec.weights.get((1,), 0.0) - 1.0) < 1e-12
    if is_single_pair:
        return strong_combined_spec(spec.d, k)
    return spec


# ---------------------------------------------------------------------------
# outcome distribution
# ---------------------------------------------------------------------------

def outcome_density(spec: RefFrameSpec, phases) -> float:
    """p(U) = |sum_lam sqrt(q_lam) chi_lam(U)|^2 at the given eigenphases."""
    amp = 0.0 + 0.0j
    for lam, q in spec.weights.items():
        amp += np.sqrt(q) * young.character(lam, phases)
    return float(abs(amp) ** 2)


def _density_su2(spec: RefFrameSpec, theta: np.ndarray) -> np.ndarray:
    """Vectorized SU(2) outcome density at rotation half-angles theta."""
    amps = np.sqrt(np.array([spec.weights[l] for l in spec.support()]))
    gaps = spec.gaps()
    # chi_lam carries a U(1) phase from the total box count, common to all
    # support diagrams (fixed m), so it cancels inside |.|^2
    acc = np.zeros_like(theta, dtype=float)
    for a, gap in zip(amps, gaps):
        acc = acc + a * young.su2_character(int(gap), theta)
    return acc**2


def sample_envelope(spec: RefFrameSpec) -> float:
    """Rejection envelope (sum_lam sqrt(q_lam) dim_lam)^2 >= sup p."""
    s = sum(np.sqrt(q) * young.weyl_dimension(lam, spec.d) for lam, q in spec.weights.items())
    return float(s**2)


def sample_relative_rotations(
    spec: RefFrameSpec, n_samples: int, rng: np.random.Generator, batch: int = 8192
) -> np.ndarray:
    """Draw U' ~ p(U'|I) for d=2 by rejection against the Haar proposal."""
    if spec.d != 2:
        raise NotImplementedError("outcome sampling is implemented for d=2 only")
    env = sample_envelope(spec)
    out = np.empty((n_samples, 2, 2), dtype=complex)
    got = 0
    while got < n_samples:
        us = haar_su2(rng, batch)
        theta = su2_eigenphase(us)
        dens = _density_su2(spec, theta)
        if dens.max() > env * (1 + 1e-9):
            raise RuntimeError("rejection envelope exceeded; density evaluation inconsistent")
        keep = rng.random(batch) * env < dens
        take = min(int(keep.sum()), n_samples - got)
        out[got:got + take] = us[keep][:take]
        got += take
    return out


def sample_outcome(spec: RefFrameSpec, true_rotation: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One covariant-measurement outcome U^ ~ p(U^|U) for d=2.

    Samples the relative rotation U' from the conjugation-invariant
    density p(U'|I) and returns U^ = U U'^dag.
    """
    u_rel = sample_relative_rotations(spec, 1, rng)[0]
    return np.asarray(true_rotation, dtype=complex) @ u_rel.conj().T


# ---------------------------------------------------------------------------
# overlap bound machinery
# ---------------------------------------------------------------------------

def interior_set(spec: RefFrameSpec, n_prime: int) -> set:
    """Support diagrams with every pairwise row gap at least 4 n'."""
    out = set()
    for lam in spec.weights:
        rows = young.pad(lam, spec.d)
        if all(
            abs(rows[i] - rows[j]) >= 4 * n_prime
            for i in range(spec.d)
            for j in range(i + 1, spec.d)
        ):
            out.add(lam)
    return out


def _shifts(d: int, n_prime: int):
    """All integer shift vectors with |delta_i| <= n' and zero sum."""
    for head in itertools.product(range(-n_prime, n_prime + 1), repeat=d - 1):
        last = -sum(head)
        if abs(last) <= n_prime:
            yield head + (last,)


def min_overlap(spec: RefFrameSpec, n_prime: int) -> float:
    """min over shifts of sum_{lam interior} sqrt(q_lam q_{lam+Delta}).

    Weights of shifted diagrams outside the support (or outside the
    partition cone) are zero.
    """
    interior = interior_set(spec, n_prime)
    best = None
    for delta in _shifts(spec.d, n_prime):
        total = 0.0
        for lam in interior:
            rows = young.pad(lam, spec.d)
            shifted = tuple(rows[i] + delta[i] for i in range(spec.d))
            if not young.is_diagram(shifted, spec.d):
                continue
            q2 = spec.weights.get(young.normalize(shifted), 0.0)
            if q2 > 0.0:
                total += np.sqrt(spec.weights[lam] * q2)
        best = total if best is None else min(best, total)
    return float(best if best is not None else 0.0)


def appendix_e_sum(big_m: int, delta: int, n_lo: int) -> float:
    """The g-overlap sum 2/(M+1) sum_{k=n}^{M-n} sin(t_k) sin(t_{k+delta}),
    with t_k = pi(2k+1)/(2(M+1)).

    Coincides with sum_k sqrt(g_k g_{k+delta}) whenever delta <= n_lo
    (all indices stay inside {0..M}, both sines positive), which covers
    every use in the error analysis.  Returns 0 on an empty range.
    """
    if n_lo > big_m - n_lo:
        return 0.0
    ks = np.arange(n_lo, big_m - n_lo + 1)
    t = pi / (2 * (big_m + 1))
    return float(
        2.0 / (big_m + 1) * np.sum(np.sin(t * (2 * ks + 1)) * np.sin(t * (2 * ks + 2 * delta + 1)))
    )


def appendix_e_closed_form(big_m: int, delta: int, n_lo: int) -> float:
    """Exact trigonometric closed form of appendix_e_sum:

        cos(pi delta/(M+1))/(M+1) * (M - 2n + 1 + sin(2 pi n/(M+1))/sin(pi/(M+1))).
    """
    if n_lo > big_m - n_lo:
        return 0.0
    th = pi / (big_m + 1)
    ratio = 0.0 if n_lo == 0 else sin(2 * n_lo * th) / sin(th)
    return cos(delta * th) / (big_m + 1) * (big_m - 2 * n_lo + 1 + ratio)


# ---------------------------------------------------------------------------
# strong-model fidelity
# ---------------------------------------------------------------------------

def cost_set(d: int, n_p: int) -> list[tuple[int, ...]]:
    """Distinct diagrams in the decomposition of U*_L (x) U_P^{(x) n_p}.

    All have d - 1 + n_p boxes; built by dualizing the fundamental and
    tensoring with n_p further fundamentals.
    """
    current = {young.dualize((1,), d)}
    for _ in range(n_p):
        nxt = set()
        for lam in current:
            nxt.update(young.tensor_decompose(lam, (1,), d))
        current = nxt
    return sorted(current, reverse=True)


def strong_fidelity_form(d: int, s_survivors: int, n_prime: int, cost_cap: int = 24):
    """Cost set and quadratic form Q with F(w) = w^T Q w for the strong model.

    Q_{mu mu'} = sum_nu T_mu(nu) T_mu'(nu) / (dim_mu dim_mu') with
    T_mu(nu) = sum_lam sqrt(p_lam) c^nu_{lam mu} and p the Schur-Weyl
    weights of s' survivors.
    """
    if d not in (2, 3):
        raise ValueError("the strong fidelity form is wired up for d = 2 or 3")
    n_p = n_prime - d + 1
    if n_p < 0:
        raise ValueError("n_prime must be at least d - 1")
    cost = cost_set(d, n_p)
    if len(cost) > cost_cap:
        raise ValueError(f"cost set of size {len(cost)} exceeds the cap {cost_cap}")
    p = {lam: float(young.schur_weyl_prob(lam, s_survivors, d)) for lam in young.enumerate_diagrams(s_survivors, d)}
    dims = np.array([young.weyl_dimension(mu, d) for mu in cost], dtype=float)
    nus = young.enumerate_diagrams(s_survivors + (d - 1) + n_p, d)
    t_mat = np.zeros((len(cost), len(nus)))
    for a, mu in enumerate(cost):
        for b, nu in enumerate(nus):
            acc = 0.0
            for lam, pl in p.items():
                c = young.lr_coefficient(lam, mu, nu)
                if c:
                    acc += np.sqrt(pl) * c
            t_mat[a, b] = acc
    q_mat = (t_mat / dims[:, None]) @ (t_mat / dims[:, None]).T
    return cost, q_mat


def f_strong(d: int, s_survivors: int, n_prime: int, cost_cap: int = 24) -> float:
    """Worst-case fidelity floor F_{s'} of the strong model (d = 2 or 3).

    The exact minimum over the probability simplex of the convex quadratic
    from strong_fidelity_form (active-set enumeration for small cost sets,
    projected gradient with restarts otherwise).
    """
    _, q_mat = strong_fidelity_form(d, s_survivors, n_prime, cost_cap)
    return _min_quadratic_on_simplex(q_mat)


def _min_quadratic_on_simplex(q_mat: np.ndarray, n_restarts: int = 50, tol: float = 1e-9) -> float:
    k = q_mat.shape[0]
    best = np.inf
    if k <= 3:
        # exact: enumerate active sets and solve the KKT system on each face
        for r in range(1, k + 1):
            for sub in itertools.combinations(range(k), r):
                qs = q_mat[np.ix_(sub, sub)]
                kkt = np.zeros((r + 1, r + 1))
                kkt[:r, :r] = 2 * qs
                kkt[:r, r] = 1.0
                kkt[r, :r] = 1.0
                rhs = np.zeros(r + 1)
                rhs[r] = 1.0
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
                w = sol[:r]
                if (w < -1e-9).any():
                    continue
                w = np.clip(w, 0.0, None)
                s = w.sum()
                if s <= 0:
                    continue
                w = w / s
                best = min(best, float(w @ qs @ w))
        return max(0.0, min(1.0, best))
    rng = np.random.default_rng(1234)
    for trial in range(n_restarts):
        w = np.full(k, 1.0 / k) if trial == 0 else rng.dirichlet(np.ones(k))
        step = 0.5
        f = float(w @ q_mat @ w)
        for _ in range(2000):
            g = 2 * q_mat @ w
            w_new = _project_simplex(w - step * g)
            f_new = float(w_new @ q_mat @ w_new)
            if f_new < f - 1e-15:
                w, f = w_new, f_new
            else:
                step *= 0.5
                if step < tol:
                    break
        best = min(best, f)
    return max(0.0, min(1.0, best))


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[cond][-1] / rho
    return np.clip(v - theta, 0.0, None)
