"""Matrix-free Hamiltonian engine: assembly, spectra, and time evolution.

Hamiltonians are lists of weighted Pauli strings applied term by term, so a
matvec costs O(terms * dimension) with only vector-sized memory. The same
engine drives the full 2^N space and the plaquette-constrained sector, whose
basis states are enumerated explicitly. Small dimensions get a cached dense
eigendecomposition; larger ones are propagated with an adaptive Krylov
approximation of exp(-iHt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .lattice import LatticeGeometry
from .pauli import PauliOperator, pauli_x, pauli_z, single
from .stabilizer import FullBasis, StateVector
from .stabilizer import save_state as save_checkpoint  # noqa: F401
from .stabilizer import load_state as load_checkpoint  # noqa: F401

__all__ = [
    "HamiltonianSpec",
    "HamiltonianOperator",
    "SectorBasis",
    "build_hamiltonian",
    "build_sector",
    "full_spectrum",
    "lanczos_extremal",
    "evolve",
    "dump_spectrum",
    "save_checkpoint",
    "load_checkpoint",
]

FULL_SPECTRUM_CAP = 4096
LANCZOS_SEED = 20170831
_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

_FIELD_MODES = ("uniform_z", "split_HV")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Couplings and field layout for the toric code with a magnetic field.

    The base model is -U sum_p B_p - J sum_s A_s. ``uniform_z`` adds
    -h sigma^z on every spin; ``split_HV`` adds -h sigma^z on the
    horizontal sublattice and -kappa*h sigma^x on the vertical one.
    """

    geometry: LatticeGeometry
    U: float = 1.0
    J: float = 1.0
    h: float = 0.0
    kappa: float = 0.0
    field_mode: str = "uniform_z"

    def __post_init__(self):
        if self.field_mode not in _FIELD_MODES:
            raise ValueError(
                f"unknown field mode {self.field_mode!r}; expected one of {_FIELD_MODES}"
            )
        for name in ("U", "J", "h", "kappa"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"coupling {name} is not finite")

    def term_list(self) -> tuple[tuple[float, PauliOperator], ...]:
        """Deterministic weighted Pauli terms: plaquettes, stars, fields."""
        geo = self.geometry
        n = geo.n_spins
        terms: list[tuple[float, PauliOperator]] = []
        for sup in geo.plaquette_supports:
            terms.append((-self.U, pauli_z(n, sup)))
        for sup in geo.star_supports:
            terms.append((-self.J, pauli_x(n, sup)))
        if self.field_mode == "uniform_z":
            for j in range(n):
                terms.append((-self.h, single(n, "Z", j)))
        else:
            for j in geo.horizontal_spins:
                terms.append((-self.h, single(n, "Z", j)))
            for j in geo.vertical_spins:
                terms.append((-self.kappa * self.h, single(n, "X", j)))
        return tuple(terms)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Computational-basis states satisfying diagonal Pauli constraints."""

    n_spins: int
    constraint_ops: tuple[PauliOperator, ...]
    kept_indices: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.kept_indices.size)

    @classmethod
    def from_kept(cls, n_spins: int, kept) -> "SectorBasis":
        kept = np.sort(np.asarray(kept, dtype=np.int64))
        return cls(n_spins=n_spins, constraint_ops=(), kept_indices=kept)

    def positions(self, indices: np.ndarray) -> np.ndarray:
        """Sector positions of full-space indices (which must all belong)."""
        pos = np.searchsorted(self.kept_indices, indices)
        if pos.size and (
            pos.max() >= self.kept_indices.size
            or not np.array_equal(self.kept_indices[pos], indices)
        ):
            raise ValueError("index not in sector")
        return pos

    def project(self, state: StateVector, tol: float = 1e-10) -> StateVector:
        """Restrict a full-space state that lives in the sector."""
        if not isinstance(state.basis, FullBasis) or state.n_spins != self.n_spins:
            raise ValueError("can only project a full-basis state of matching size")
        amps = state.amplitudes[self.kept_indices]
        lost = 1.0 - float(np.sum(np.abs(amps) ** 2))
        if lost > tol:
            raise ValueError(f"state carries weight {lost:.3e} outside the sector")
        return StateVector(amps / np.linalg.norm(amps), self)

    def expand(self, state: StateVector) -> StateVector:
        """Embed a sector state back into the full 2^N basis."""
        if state.basis is not self:
            raise ValueError("state does not use this sector basis")
        full = np.zeros(1 << self.n_spins, dtype=np.complex128)
        full[self.kept_indices] = state.amplitudes
        return StateVector(full, FullBasis(self.n_spins))


def build_sector(geometry: LatticeGeometry, which: str = "all_plaquettes_plus") -> SectorBasis:
    """Enumerate the subspace with every plaquette eigenvalue +1.

    One plaquette is the product of all others, so the dimension is
    2^(N - (L1*L2 - 1)).
    """
    if which != "all_plaquettes_plus":
        raise ValueError(f"unknown sector {which!r}")
    n = geometry.n_spins
    idx = np.arange(1 << n, dtype=np.int64)
    keep = np.ones(idx.size, dtype=bool)
    ops = []
    for sup in geometry.plaquette_supports:
        op = pauli_z(n, sup)
        ops.append(op)
        keep &= (np.bitwise_count(idx & op.z_mask) & 1) == 0
    return SectorBasis(
        n_spins=n, constraint_ops=tuple(ops), kept_indices=idx[keep]
    )


class HamiltonianOperator:
    """Matrix-free Hermitian operator from weighted Pauli terms.

    Diagonal terms are folded into one vector; every off-diagonal term keeps
    a precomputed target permutation (plus per-state signs when it carries a
    Z part). Works on the full basis or on a SectorBasis, in which case each
    term must map the sector to itself.
    """

    def __init__(self, terms: Sequence[tuple[float, PauliOperator]], basis):
        self.basis = basis
        self.terms = tuple((float(c), op) for c, op in terms)
        dim = basis.dimension
        kept = getattr(basis, "kept_indices", None)
        if kept is None:
            idx = np.arange(dim, dtype=np.int64)
        else:
            idx = np.asarray(kept, dtype=np.int64)
        diag = np.zeros(dim, dtype=np.complex128)
        offdiag = []
        for coef, op in self.terms:
            if op.n_spins != basis.n_spins:
                raise ValueError("term size does not match basis")
            if not op.is_hermitian:
                raise ValueError(f"non-Hermitian term: {op}")
            if coef == 0.0:
                continue
            phase = _PHASES[op.phase_exp]
            if op.x_mask == 0:
                signs = 1.0 - 2.0 * (np.bitwise_count(idx & op.z_mask) & 1)
                diag += coef * phase * signs
                continue
            tgt = idx ^ op.x_mask
            if kept is None:
                perm = tgt
            else:
                pos = np.searchsorted(idx, tgt)
                bad = pos >= idx.size
                pos = np.minimum(pos, idx.size - 1)
                if bad.any() or not np.array_equal(idx[pos], tgt):
                    raise ValueError(
                        f"term {op} does not preserve the sector; "
                        "it fails to commute with a basis constraint"
                    )
                perm = pos
            if op.z_mask == 0:
                signs = None
                weight = coef * phase
            else:
                signs = 1.0 - 2.0 * (np.bitwise_count(idx & op.z_mask) & 1)
                weight = coef * phase
            offdiag.append((weight, perm, signs))
        imag_max = float(np.max(np.abs(diag.imag))) if dim else 0.0
        if imag_max > 1e-14:
            raise ValueError("diagonal part is not real")
        self._diag = diag.real.copy()
        self._offdiag = offdiag
        self._eig: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self._diag * v
        for weight, perm, signs in self._offdiag:
            if signs is None:
                out[perm] += weight * v
            else:
                out[perm] += weight * (signs * v)
        return out

    def expectation(self, v: np.ndarray) -> float:
        return float(np.vdot(v, self.matvec(v)).real)

    def dense(self) -> np.ndarray:
        dim = self.dimension
        mat = np.zeros((dim, dim), dtype=np.complex128)
        rows = np.arange(dim)
        mat[rows, rows] = self._diag
        for weight, perm, signs in self._offdiag:
            vals = weight if signs is None else weight * signs
            mat[perm, rows] += vals
        return mat

    def eigensystem(self, cap: int = FULL_SPECTRUM_CAP) -> tuple[np.ndarray, np.ndarray]:
        """Cached complete eigendecomposition; refuses above the cap."""
        if self.dimension > cap:
            raise ValueError(
                f"dimension {self.dimension} exceeds the dense cap {cap}"
            )
        if self._eig is None:
            w, vecs = np.linalg.eigh(self.dense())
            self._eig = (w, vecs)
        return self._eig


def build_hamiltonian(spec: HamiltonianSpec, basis=None) -> HamiltonianOperator:
    """Assemble the matrix-free operator for a coupling spec.

    ``basis`` defaults to the full 2^N space; pass a SectorBasis to restrict
    (only valid when every term commutes with the sector constraints, e.g.
    the uniform-z field).
    """
    if basis is None:
        basis = FullBasis(spec.geometry.n_spins)
    return HamiltonianOperator(spec.term_list(), basis)


def full_spectrum(
    op: HamiltonianOperator, cap: int = FULL_SPECTRUM_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """Complete eigendecomposition (ascending) for small dimensions."""
    w, vecs = op.eigensystem(cap)
    return w.copy(), vecs.copy()


def _orthogonalize(w: np.ndarray, against: list[np.ndarray]) -> np.ndarray:
    # Two Gram-Schmidt sweeps keep orthogonality near machine precision.
    for _ in range(2):
        for q in against:
            w = w - np.vdot(q, w) * q
    return w


def lanczos_extremal(
    op, k: int, tol: float = 1e-10, max_iter: int = 300, seed: int = LANCZOS_SEED
) -> list[tuple[float, np.ndarray]]:
    """Lowest k eigenpairs by Lanczos with full reorthogonalization.

    Degenerate levels are resolved by deflation: each converged eigenvector
    is projected out and the iteration restarts, so a four-fold ground
    manifold yields four orthonormal vectors. Start vectors come from a
    fixed seeded generator, making results deterministic. Every returned
    pair satisfies ||H v - lambda v|| <= tol, checked on the vector itself.

    Raises RuntimeError with the best achieved residual if any slot fails
    to converge within ``max_iter`` iterations.
    """
    matvec = op.matvec
    dim = op.dimension
    rng = np.random.default_rng(seed)
    found: list[tuple[float, np.ndarray]] = []
    deflate: list[np.ndarray] = []
    for slot in range(k):
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v0 = _orthogonalize(v0, deflate)
        nrm = float(np.linalg.norm(v0))
        if nrm < 1e-12:
            raise RuntimeError("start vector vanished after deflation")
        basis_vecs = [v0 / nrm]
        alphas: list[float] = []
        betas: list[float] = []
        best_residual = np.inf
        converged = False
        for it in range(1, max_iter + 1):
            w = matvec(basis_vecs[-1])
            w = _orthogonalize(w, deflate)
            alphas.append(float(np.vdot(basis_vecs[-1], w).real))
            w = _orthogonalize(w, basis_vecs)
            b = float(np.linalg.norm(w))
            T = np.diag(alphas)
            if betas:
                T = T + np.diag(betas, 1) + np.diag(betas, -1)
            evals, evecs = np.linalg.eigh(T)
            exhausted = b <= 1e-13 or it >= min(dim, max_iter)
            # The tridiagonal estimate is cheap; confirm on the Ritz vector
            # once it claims convergence (or nothing more can be gained).
            if abs(b * evecs[-1, 0]) <= 0.1 * tol or exhausted:
                vec = np.zeros_like(basis_vecs[0])
                for coef, q in zip(evecs[:, 0], basis_vecs):
                    vec += coef * q
                vec = _orthogonalize(vec, deflate)
                vec /= np.linalg.norm(vec)
                lam = float(np.vdot(vec, matvec(vec)).real)
                true_res = float(np.linalg.norm(matvec(vec) - lam * vec))
                best_residual = min(best_residual, true_res)
                if true_res <= tol:
                    found.append((lam, vec))
                    deflate.append(vec)
                    converged = True
                    break
            if exhausted:
                break
            betas.append(b)
            basis_vecs.append(w / b)
        if not converged:
            raise RuntimeError(
                f"Lanczos slot {slot} did not converge: best residual "
                f"{best_residual:.3e} after {it} iterations (tol {tol:.1e})"
            )
    found.sort(key=lambda pair: pair[0])
    return found


def _expm_krylov_step(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    dt: float,
    m_max: int = 30,
) -> tuple[np.ndarray, float]:
    """One Krylov approximation of exp(-i*H*dt) v with an error estimate."""
    basis_vecs = [v]
    alphas: list[float] = []
    betas: list[float] = []
    breakdown = False
    for _ in range(m_max):
        w = matvec(basis_vecs[-1])
        alphas.append(float(np.vdot(basis_vecs[-1], w).real))
        w = _orthogonalize(w, basis_vecs)
        b = float(np.linalg.norm(w))
        if b <= 1e-14:
            breakdown = True
            break
        betas.append(b)
        basis_vecs.append(w / b)
    m = len(alphas)
    T = np.diag(alphas)
    if m > 1:
        off = np.array(betas[: m - 1])
        T = T + np.diag(off, 1) + np.diag(off, -1)
    evals, evecs = np.linalg.eigh(T)
    u = evecs @ (np.exp(-1j * dt * evals) * evecs[0].conj())
    out = np.zeros_like(v)
    for coef, q in zip(u, basis_vecs[:m]):
        out += coef * q
    # Weight leaking past the subspace; zero on happy breakdown.
    err = 0.0 if breakdown else abs(betas[m - 1] * u[m - 1])
    return out, float(err)


def evolve(
    state: StateVector,
    op: HamiltonianOperator,
    t: float,
    tol: float = 1e-10,
    method: str = "auto",
) -> StateVector:
    """Propagate a state to exp(-iHt)|state>.

    ``method`` is "spectrum" (dense eigendecomposition, cached on the
    operator), "krylov" (adaptive substepping, subspace size <= 30), or
    "auto" (spectrum when the dimension is within the dense cap).
    Unitarity is inherited, not enforced: no renormalization happens.
    """
    if state.basis is not op.basis and state.basis.dimension != op.dimension:
        raise ValueError("state and operator dimensions differ")
    if method == "auto":
        method = "spectrum" if op.dimension <= FULL_SPECTRUM_CAP else "krylov"
    if method == "spectrum":
        w, vecs = op.eigensystem()
        coef = vecs.conj().T @ state.amplitudes
        amps = vecs @ (coef * np.exp(-1j * w * t))
        return StateVector(amps, state.basis)
    if method != "krylov":
        raise ValueError(f"unknown method {method!r}")
    if t == 0.0:
        return state.copy()
    v = state.amplitudes.copy()
    remaining = abs(t)
    sign = 1.0 if t >= 0 else -1.0
    dt = remaining
    budget = tol / max(1.0, remaining)
    steps = 0
    while remaining > 1e-15:
        dt = min(dt, remaining)
        out, err = _expm_krylov_step(op.matvec, v, sign * dt)
        if err > budget * dt and dt > 1e-12:
            dt *= 0.5
            steps += 1
            if steps > 10000:
                raise RuntimeError("Krylov step control failed to converge")
            continue
        v = out
        remaining -= dt
        if err < 0.01 * budget * dt:
            dt *= 1.5
        steps += 1
        if steps > 10000:
            raise RuntimeError("Krylov propagation exceeded the step limit")
    return StateVector(v, state.basis)


def dump_spectrum(path, eigenvalues: np.ndarray) -> None:
    """CSV spectrum dump: index, eigenvalue with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,eigenvalue\n")
        for i, lam in enumerate(eigenvalues):
            fh.write(f"{i},{lam:.17g}\n")
