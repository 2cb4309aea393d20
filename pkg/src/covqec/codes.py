"""Small exact erasure-correcting codes and location-aware recovery.

Erasure is modelled literally: each erased qudit is traced out and
replaced by an orthogonal flag level, so the noise output lives on
(C^{d+1})^{(x) n} and erasure locations are readable from the flags.

Recovery for a known erasure pattern goes through the transpose (Petz)
channel of the erased-restriction map taken at the maximally mixed code
input.  For patterns below the code distance this inverts the noise
exactly; beyond the distance it degrades gracefully while staying trace
preserving (off-support weight is dumped to the maximally mixed logical
state).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel

__all__ = [
    "CodeSpec",
    "ErasurePattern",
    "five_qubit_code",
    "trivial_code",
    "erase",
    "erasure_recovery",
    "recovery_on_survivors",
    "recovery_parts",
    "erased_restriction_kraus",
    "code_error",
]

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class CodeSpec:
    d: int
    n_p: int
    encoder: np.ndarray = field(compare=False)  # d^n_p x d isometry
    name: str = "code"
    distance: int = 1

    def __post_init__(self) -> None:
        v = np.asarray(self.encoder, dtype=complex)
        if v.shape != (self.d**self.n_p, self.d):
            raise ValueError("encoder has the wrong shape")
        if np.max(np.abs(v.conj().T @ v - np.eye(self.d))) > 1e-10:
            raise ValueError("encoder is not an isometry")


@dataclass(frozen=True)
class ErasurePattern:
    erased: frozenset
    n_p: int
    n_r: int

    def __post_init__(self) -> None:
        if any(i < 0 or i >= self.n_p + self.n_r for i in self.erased):
            raise ValueError("erased index out of range")

    @property
    def physical(self) -> frozenset:
        return frozenset(i for i in self.erased if i < self.n_p)

    @property
    def reference(self) -> frozenset:
        return frozenset(i - self.n_p for i in self.erased if i >= self.n_p)


def _pauli_string(s: str) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for c in s:
        out = np.kron(out, _PAULI[c])
    return out


def five_qubit_code() -> CodeSpec:
    """The [[5, 1, 3]] stabilizer code; corrects any two erasures.

    Generators XZZXI, IXZZX, XIXZZ, ZXIXZ; logical operators are the
    transversal X and Z strings.
    """
    gens = ["xzzxi", "ixzzx", "xixzz", "zxixz"]
    proj = np.eye(32, dtype=complex)
    for g in gens:
        proj = proj @ (np.eye(32) + _pauli_string(g)) / 2
    zero = proj @ np.eye(32, dtype=complex)[:, 0]
    zero /= np.linalg.norm(zero)
    one = _pauli_string("xxxxx") @ zero
    encoder = np.stack([zero, one], axis=1)
    code = CodeSpec(2, 5, encoder, name="five_qubit", distance=3)
    for g in gens:
        assert np.max(np.abs(_pauli_string(g) @ encoder - encoder)) < 1e-12
    assert np.max(np.abs(_pauli_string("zzzzz") @ encoder - encoder @ _PAULI["z"])) < 1e-12
    return code


def trivial_code(d: int) -> CodeSpec:
    """Identity encoder on a single qudit (distance 1)."""
    return CodeSpec(d, 1, np.eye(d, dtype=complex), name="trivial", distance=1)


# ---------------------------------------------------------------------------
# erasure channel
# ---------------------------------------------------------------------------

def erase(n: int, d: int, pattern) -> KrausChannel:
    """Erasure of the qudits in `pattern`: (C^d)^n -> (C^{d+1})^n.

    Unerased qudits are embedded (data levels 0..d-1); erased ones are
    traced out and replaced by the flag level d.
    """
    erased = sorted(set(int(i) for i in pattern))
    if erased and (erased[0] < 0 or erased[-1] >= n):
        raise ValueError("pattern index out of range")
    embed = np.zeros((d + 1, d), dtype=complex)
    embed[:d, :] = np.eye(d)
    flag = np.zeros(d + 1, dtype=complex)
    flag[d] = 1.0
    kraus = []
    for basis in itertools.product(range(d), repeat=len(erased)):
        factors = []
        k = 0
        for site in range(n):
            if site in erased:
                bra = np.zeros(d, dtype=complex)
                bra[basis[k]] = 1.0
                factors.append(np.outer(flag, bra))
                k += 1
            else:
                factors.append(embed)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        kraus.append(op)
    return KrausChannel(d**n, (d + 1) ** n, kraus)


# ---------------------------------------------------------------------------
# recovery
# ---------------------------------------------------------------------------

def erased_restriction_kraus(code: CodeSpec, pattern) -> list[np.ndarray]:
    """Kraus operators of the logical -> survivors map after erasing `pattern`.

    M_b = (<b|_erased (x) I_survivors) V for each erased-slot basis vector b.
    """
    erased = sorted(set(int(i) for i in pattern))
    if erased and (erased[0] < 0 or erased[-1] >= code.n_p):
        raise ValueError("pattern must address physical qudits")
    d, n = code.d, code.n_p
    v = code.encoder.reshape((d,) * n + (d,))
    survivors = [i for i in range(n) if i not in erased]
    perm = erased + survivors + [n]
    v = np.transpose(v, perm).reshape(d ** len(erased), d ** len(survivors), d)
    return [np.array(v[b]) for b in range(d ** len(erased))]


def recovery_parts(code: CodeSpec, pattern) -> tuple[list[np.ndarray], np.ndarray]:
    """Data Kraus operators and the output-support projector of the
    survivor-space recovery.

    The data Kraus are the transpose channel of the erased restriction at
    the maximally mixed logical input, R_b = M_b^dag rho_out^{-1/2}/sqrt(d)
    on the support of rho_out; the recovery is completed off the support by
    dumping to the maximally mixed logical state (see recovery_on_survivors).
    """
    d = code.d
    ms = erased_restriction_kraus(code, pattern)
    rho_out = sum(m @ m.conj().T for m in ms) / d
    w, u = np.linalg.eigh(rho_out)
    keep = w > 1e-12
    inv_half = (u[:, keep] / np.sqrt(w[keep])) @ u[:, keep].conj().T
    support = (u[:, keep]) @ u[:, keep].conj().T
    kraus = [(m.conj().T @ inv_half) / np.sqrt(d) for m in ms]
    return kraus, support


def recovery_on_survivors(code: CodeSpec, pattern) -> list[np.ndarray]:
    """Kraus operators of the recovery map (C^d)^(survivors) -> logical.

    Exact inverse of the erasure whenever |pattern| < distance; beyond
    that a trace-preserving best effort.
    """
    d = code.d
    data, support = recovery_parts(code, pattern)
    dim_s = support.shape[0]
    kraus = list(data)
    comp = np.eye(dim_s) - support
    wc, uc = np.linalg.eigh(comp)
    for i in range(dim_s):
        if wc[i] > 1e-12:
            for out_level in range(d):
                k = np.zeros((d, dim_s), dtype=complex)
                k[out_level, :] = uc[:, i].conj() * np.sqrt(wc[i] / d)
                kraus.append(k)
    total = sum(k.conj().T @ k for k in kraus)
    assert np.max(np.abs(total - np.eye(dim_s))) < 1e-9
    return kraus


def erasure_recovery(code: CodeSpec, pattern) -> KrausChannel:
    """Location-aware recovery on the full post-erasure space.

    Composes a strip stage per qudit (erased slots traced out; survivor
    flag amplitude recycled to level 0) with the survivor-space transpose
    recovery, giving a trace-preserving map (C^{d+1})^n_p -> C^d.
    """
    d, n = code.d, code.n_p
    erased = sorted(set(int(i) for i in pattern))
    survivors = [i for i in range(n) if i not in erased]
    dim_full = (d + 1) ** n
    dim_s = d ** len(survivors)

    # per-slot strip operators
    keep_data = np.zeros((d, d + 1), dtype=complex)
    keep_data[:, :d] = np.eye(d)
    flag_to_zero = np.zeros((d, d + 1), dtype=complex)
    flag_to_zero[0, d] = 1.0
    trace_out = [np.zeros((1, d + 1), dtype=complex) for _ in range(d + 1)]
    for lvl in range(d + 1):
        trace_out[lvl][0, lvl] = 1.0

    strip_kraus = []
    slot_choices = []
    for site in range(n):
        if site in erased:
            slot_choices.append(trace_out)
        else:
            slot_choices.append([keep_data, flag_to_zero])
    for combo in itertools.product(*slot_choices):
        op = combo[0]
        for f in combo[1:]:
            op = np.kron(op, f)
        strip_kraus.append(op)
    strip = KrausChannel(dim_full, dim_s, strip_kraus)
    rec = KrausChannel(dim_s, d, recovery_on_survivors(code, erased))
    kraus = [a @ b for a in rec.kraus for b in strip.kraus]
    kraus = [k for k in kraus if np.max(np.abs(k)) > 1e-14]
    return KrausChannel(dim_full, d, kraus)


def code_error(code: CodeSpec, pattern, tol: float = 1e-8) -> float:
    """Worst-case error of recover . erase . encode against the identity.

    Below solver precision the certified bracket eps_wc <= d eps_ent gives
    a tighter answer than the diamond-norm program, so it is used there.
    """
    from . import sdp
    from .channels import compose, entanglement_error, identity_channel, unitary_channel

    noisy = compose(
        erasure_recovery(code, pattern),
        compose(erase(code.n_p, code.d, pattern), unitary_channel(code.encoder)),
    )
    ident = identity_channel(code.d)
    upper = code.d * entanglement_error(noisy, ident)
    if upper < tol:
        return upper
    return sdp.diamond_error(noisy.choi(), ident.choi(), tol=tol)
