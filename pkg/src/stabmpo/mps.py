"""Complex tensor-train engine for pure states.

Site tensors are order-3 arrays (left bond, physical, right bond) with
boundary bonds of size 1.  The physical dimension defaults to 2 but is
per-site, since the folded transfer-network reuses the same machinery
with four-dimensional sites.  Operations return new objects; tensors are
shared where untouched and treated as immutable by convention.

``log_norm`` is an external scale factor: the represented vector is
exp(log_norm) times the contracted network.  It stays at zero for unitary
qubit evolution and absorbs per-step scales in the non-unitary transfer
contractions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import ORACLE_CAP, SIGMA, OracleCapError, PauliString

ZERO_NORM_THRESHOLD = 1e-12


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond cap plus relative Schmidt-weight cutoff.

    The cap is applied first; afterwards singular values whose relative
    weight s_i^2 / sum_j s_j^2 falls below ``svd_cutoff`` are dropped.
    With ``renormalize`` the state is rescaled to unit norm and the scale
    folded into ``log_norm``.
    """

    chi_max: int
    svd_cutoff: float = 1e-12
    renormalize: bool = False

    def __post_init__(self) -> None:
        if self.chi_max < 1:
            raise ValueError("chi_max must be >= 1")
        if not 0.0 <= self.svd_cutoff < 1.0:
            raise ValueError("svd_cutoff must be in [0, 1)")


EXACT_POLICY = TruncationPolicy(chi_max=2**30, svd_cutoff=0.0)


def _truncate_spectrum(s: np.ndarray, policy: TruncationPolicy) -> tuple[int, float]:
    """Number of values to keep and the discarded relative weight."""
    total = float(np.sum(s**2))
    if total == 0.0:
        return 1, 0.0
    k = min(len(s), policy.chi_max)
    if policy.svd_cutoff > 0.0:
        weights = s**2 / total
        above = int(np.sum(weights >= policy.svd_cutoff))
        k = min(k, max(above, 1))
    k = max(k, 1)
    discarded = float(np.sum(s[k:] ** 2)) / total
    return k, discarded


class Mps:
    """Matrix product state with bond cap and truncation bookkeeping."""

    def __init__(
        self,
        tensors: list[np.ndarray],
        log_norm: float = 0.0,
        center: int | None = None,
        is_zero: bool = False,
    ) -> None:
        if not tensors:
            raise ValueError("empty tensor list")
        self.tensors = list(tensors)
        self.log_norm = float(log_norm)
        self.center = center
        self.is_zero = bool(is_zero)
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError("mismatched bond dimensions")

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------
    @classmethod
    def product_state(cls, bits) -> "Mps":
        """Computational basis product state |b_0 b_1 ...>."""
        tensors = []
        for b in bits:
            t = np.zeros((1, 2, 1), dtype=np.complex128)
            t[0, int(b), 0] = 1.0
            tensors.append(t)
        return cls(tensors, center=0)

    @classmethod
    def from_site_vectors(cls, vectors) -> "Mps":
        """Product state with one arbitrary (unnormalized) vector per site."""
        tensors = [
            np.asarray(v, dtype=np.complex128).reshape(1, -1, 1) for v in vectors
        ]
        return cls(tensors)

    # ------------------------------------------------------------------
    # descriptors
    # ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def phys_dims(self) -> tuple[int, ...]:
        return tuple(t.shape[1] for t in self.tensors)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        return tuple(t.shape[0] for t in self.tensors) + (1,)

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def copy(self) -> "Mps":
        return Mps(list(self.tensors), self.log_norm, self.center, self.is_zero)

    def raw_norm(self) -> float:
        """Two-norm of the tensor network, excluding the log_norm scale."""
        e = np.ones((1, 1), dtype=np.complex128)
        for t in self.tensors:
            tmp = np.tensordot(e, t, axes=(1, 0))  # (a, d, r)
            e = np.tensordot(t.conj(), tmp, axes=((0, 1), (0, 1)))  # (a', r)
        return float(np.sqrt(abs(e[0, 0].real)))

    def norm(self) -> float:
        return self.raw_norm() * float(np.exp(self.log_norm))

    # ------------------------------------------------------------------
    # canonical form
    # ------------------------------------------------------------------
    def _orth_left(self, tensors: list[np.ndarray], i: int) -> None:
        dl, d, dr = tensors[i].shape
        q, r = np.linalg.qr(tensors[i].reshape(dl * d, dr))
        tensors[i] = q.reshape(dl, d, -1)
        tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=(1, 0))

    def _orth_right(self, tensors: list[np.ndarray], i: int) -> None:
        dl, d, dr = tensors[i].shape
        q, r = np.linalg.qr(tensors[i].reshape(dl, d * dr).conj().T)
        tensors[i] = q.conj().T.reshape(-1, d, dr)
        tensors[i - 1] = np.tensordot(tensors[i - 1], r.conj().T, axes=(2, 0))

    def move_center(self, target: int) -> "Mps":
        """Return a copy with the orthogonality center at ``target``."""
        if not 0 <= target < self.n:
            raise ValueError("center out of range")
        tensors = list(self.tensors)
        if self.center is None:
            for i in range(target):
                self._orth_left(tensors, i)
            for i in range(self.n - 1, target, -1):
                self._orth_right(tensors, i)
        else:
            for i in range(self.center, target):
                self._orth_left(tensors, i)
            for i in range(self.center, target, -1):
                self._orth_right(tensors, i)
        return Mps(tensors, self.log_norm, target, self.is_zero)

    # ------------------------------------------------------------------
    # local operations
    # ------------------------------------------------------------------
    def apply_site_matrix(self, mat: np.ndarray, site: int) -> "Mps":
        """Contract an arbitrary d x d matrix into one site (no checks)."""
        t = self.tensors[site]
        new = np.tensordot(mat, t, axes=(1, 1)).transpose(1, 0, 2)
        tensors = list(self.tensors)
        tensors[site] = np.ascontiguousarray(new)
        # a non-unitary site matrix invalidates isometries elsewhere only
        # if it changes the norm; keep the center conservative
        center = self.center if _is_unitary(mat) else None
        return Mps(tensors, self.log_norm, center, self.is_zero)

    def apply_1q_gate(
        self, u: np.ndarray, site: int, check_unitary: bool = True
    ) -> "Mps":
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ValueError("1q gate must be 2x2")
        if check_unitary and not _is_unitary(u):
            raise ValueError("gate is not unitary to 1e-10")
        return self.apply_site_matrix(u, site)

    def apply_2q_gate(
        self,
        u: np.ndarray,
        site: int,
        policy: TruncationPolicy,
        check_unitary: bool = True,
    ) -> tuple["Mps", float]:
        """Apply a 4x4 gate on (site, site+1) with an SVD split.

        Returns the new state and the discarded relative Schmidt weight.
        With ``policy.renormalize`` the pre-gate norm is restored after a
        lossy split.
        """
        if not 0 <= site < self.n - 1:
            raise ValueError("gate site out of range")
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (4, 4):
            raise ValueError("2q gate must be 4x4")
        if check_unitary and not _is_unitary(u):
            raise ValueError("gate is not unitary to 1e-10")

        work = self.move_center(site)
        tensors = work.tensors
        a, b = tensors[site], tensors[site + 1]
        dl, d0, _ = a.shape
        _, d1, dr = b.shape
        theta = np.tensordot(a, b, axes=(2, 0))  # (dl d0)(d1 dr) -> (dl d0 d1 dr)
        u4 = u.reshape(2, 2, 2, 2)
        theta = np.tensordot(u4, theta, axes=((2, 3), (1, 2)))  # (o0 o1 dl dr)
        theta = theta.transpose(2, 0, 1, 3).reshape(dl * d0, d1 * dr)

        uu, s, vh = np.linalg.svd(theta, full_matrices=False)
        k, err = _truncate_spectrum(s, policy)
        keep = s[:k]
        if policy.renormalize and err > 0.0:
            keep = keep * (np.linalg.norm(s) / np.linalg.norm(keep))
        tensors[site] = uu[:, :k].reshape(dl, d0, k)
        tensors[site + 1] = (keep[:, None] * vh[:k]).reshape(k, d1, dr)
        return Mps(tensors, work.log_norm, site + 1, work.is_zero), err

    def apply_pauli_string(self, p: PauliString) -> "Mps":
        """Apply a Pauli string exactly (phase included); bond dims unchanged."""
        if p.n != self.n:
            raise ValueError("length mismatch")
        tensors = list(self.tensors)
        for j in range(self.n):
            mu = p.letter(j)
            if mu:
                t = np.tensordot(SIGMA[mu], tensors[j], axes=(1, 1))
                tensors[j] = np.ascontiguousarray(t.transpose(1, 0, 2))
        if p.phase != 1.0:
            tensors[0] = tensors[0] * p.phase
        return Mps(tensors, self.log_norm, self.center, self.is_zero)

    # ------------------------------------------------------------------
    # compression
    # ------------------------------------------------------------------
    def compress(self, policy: TruncationPolicy) -> tuple["Mps", float]:
        """Two-pass sweep: right-orthogonalize, then SVD-truncate left to right.

        Returns the compressed state and the total discarded relative
        Schmidt weight (sum over bonds).
        """
        tensors = list(self.tensors)
        for i in range(self.n - 1, 0, -1):
            self._orth_right(tensors, i)
        total_err = 0.0
        for i in range(self.n - 1):
            dl, d, dr = tensors[i].shape
            uu, s, vh = np.linalg.svd(
                tensors[i].reshape(dl * d, dr), full_matrices=False
            )
            k, err = _truncate_spectrum(s, policy)
            total_err += err
            tensors[i] = uu[:, :k].reshape(dl, d, k)
            carry = s[:k, None] * vh[:k]
            tensors[i + 1] = np.tensordot(carry, tensors[i + 1], axes=(1, 0))

        last = tensors[-1]
        nrm = float(np.linalg.norm(last))
        log_norm = self.log_norm
        is_zero = self.is_zero
        if nrm < ZERO_NORM_THRESHOLD:
            is_zero = True
        elif policy.renormalize:
            tensors[-1] = last / nrm
            log_norm += float(np.log(nrm))
        return Mps(tensors, log_norm, self.n - 1, is_zero), total_err

    # ------------------------------------------------------------------
    # measurements
    # ------------------------------------------------------------------
    def entanglement_entropy(self, cut: int) -> float:
        """Von Neumann entropy in bits across the bond left of site ``cut``."""
        spectrum = self.schmidt_spectrum(cut)
        if spectrum is None:
            return 0.0
        p = spectrum[spectrum > 1e-16]
        return float(-np.sum(p * np.log2(p))) + 0.0  # normalize -0.0

    def schmidt_spectrum(self, cut: int) -> np.ndarray | None:
        """Normalized squared Schmidt values at the cut, or None at the ends."""
        if cut <= 0 or cut >= self.n or self.is_zero:
            return None
        work = self.move_center(cut - 1)
        dl, d, dr = work.tensors[cut - 1].shape
        s = np.linalg.svd(
            work.tensors[cut - 1].reshape(dl * d, dr), compute_uv=False
        )
        total = float(np.sum(s**2))
        if total == 0.0:
            return None
        return s**2 / total

    def expect_pauli(self, p: PauliString) -> float:
        """<psi|P|psi> / <psi|psi>, real for a Hermitian string."""
        if p.n != self.n:
            raise ValueError("length mismatch")
        if self.is_zero:
            return 0.0
        num = np.ones((1, 1), dtype=np.complex128)
        den = np.ones((1, 1), dtype=np.complex128)
        for j in range(self.n):
            t = self.tensors[j]
            tmp = np.tensordot(num, t, axes=(1, 0))  # (a, d, r)
            mu = p.letter(j)
            if mu:
                tmp = np.tensordot(SIGMA[mu], tmp, axes=(1, 1)).transpose(1, 0, 2)
            num = np.tensordot(t.conj(), tmp, axes=((0, 1), (0, 1)))
            dt = np.tensordot(den, t, axes=(1, 0))
            den = np.tensordot(t.conj(), dt, axes=((0, 1), (0, 1)))
        value = p.phase * num[0, 0] / den[0, 0]
        if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
            raise ValueError(f"expectation has imaginary residual {value.imag}")
        return float(value.real)

    def to_dense(self, cap: int = ORACLE_CAP) -> np.ndarray:
        """Dense statevector (qubit 0 most significant); guarded by ``cap``."""
        dim = 1
        for d in self.phys_dims:
            dim *= d
        if dim > 2**cap:
            raise OracleCapError(f"dense vector of size {dim} exceeds oracle cap")
        v = np.ones((1, 1), dtype=np.complex128)
        for t in self.tensors:
            v = np.tensordot(v, t, axes=(1, 0))  # (prefix, d, r)
            v = v.reshape(v.shape[0] * v.shape[1], v.shape[2])
        return v[:, 0] * np.exp(self.log_norm)

    def select_components(self, indices) -> complex:
        """Contract fixing one physical index per site (product-basis element)."""
        v = np.ones((1,), dtype=np.complex128)
        for t, idx in zip(self.tensors, indices):
            v = v @ t[:, int(idx), :]
        return complex(v[0] * np.exp(self.log_norm))


def _is_unitary(mat: np.ndarray, tol: float = 1e-10) -> bool:
    d = mat.shape[0]
    return bool(
        mat.shape == (d, d)
        and np.max(np.abs(mat.conj().T @ mat - np.eye(d))) <= tol
    )


def inner(a: Mps, b: Mps) -> complex:
    """Overlap <a|b>, including both log_norm scales."""
    if a.phys_dims != b.phys_dims:
        raise ValueError("length mismatch")
    e = np.ones((1, 1), dtype=np.complex128)
    for ta, tb in zip(a.tensors, b.tensors):
        tmp = np.tensordot(e, tb, axes=(1, 0))  # (a, d, rb)
        e = np.tensordot(ta.conj(), tmp, axes=((0, 1), (0, 1)))  # (ra, rb)
    return complex(e[0, 0] * np.exp(a.log_norm + b.log_norm))


def add_many(terms, policy: TruncationPolicy) -> tuple[Mps, float]:
    """Compressed linear combination sum_i c_i |m_i>.

    Direct-sum construction (bond dimensions add) followed by a compress
    sweep.  Relative log_norm scales of the inputs are absorbed into the
    coefficients; a vanishing result sets the zero-state flag instead of
    being silently renormalized.
    """
    terms = [(complex(c), m) for c, m in terms]
    if not terms:
        raise ValueError("empty sum")
    first = terms[0][1]
    n = first.n
    dims = first.phys_dims
    for _, m in terms[1:]:
        if m.phys_dims != dims:
            raise ValueError("length mismatch in MPS sum")

    ref = max(m.log_norm for _, m in terms)
    coeffs = [c * np.exp(m.log_norm - ref) for c, m in terms]
    states = [m for _, m in terms]

    if n == 1:
        tot = sum(
            c * m.tensors[0] for c, m in zip(coeffs, states)
        )
        return Mps([tot], ref).compress(policy)

    tensors: list[np.ndarray] = []
    for j in range(n):
        blocks = [m.tensors[j] for m in states]
        if j == 0:
            row = [c * blk for c, blk in zip(coeffs, blocks)]
            tensors.append(np.concatenate(row, axis=2))
        elif j == n - 1:
            tensors.append(np.concatenate(blocks, axis=0))
        else:
            dl = sum(b.shape[0] for b in blocks)
            dr = sum(b.shape[2] for b in blocks)
            t = np.zeros((dl, dims[j], dr), dtype=np.complex128)
            lo = ro = 0
            for b in blocks:
                t[lo : lo + b.shape[0], :, ro : ro + b.shape[2]] = b
                lo += b.shape[0]
                ro += b.shape[2]
            tensors.append(t)
    return Mps(tensors, ref).compress(policy)


def add(
    a: Mps, b: Mps, ca: complex, cb: complex, policy: TruncationPolicy
) -> tuple[Mps, float]:
    """Compressed two-term combination ca|a> + cb|b>."""
    return add_many([(ca, a), (cb, b)], policy)
