"""Dark-state spatial modes: finite-difference eigenproblem and mode couplings."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .core import ComplexField, SpatialGrid
from .errors import GridMismatchError, NumericError, ParameterError


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    """``-(1/2m) d^2/dx^2 + u`` on the interior grid points (Dirichlet ends).

    ``diag`` and ``offdiag`` hold the symmetric tridiagonal matrix acting on
    the n-2 interior samples.
    """

    grid: SpatialGrid
    m_reduced: float
    u: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def build_hamiltonian(grid: SpatialGrid, m_reduced: float, u) -> TridiagonalHamiltonian:
    if not m_reduced > 0:
        raise ParameterError(f"eigenproblem needs a positive effective mass, got {m_reduced!r}")
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n,):
        raise GridMismatchError(f"potential has shape {u.shape}, grid has n={grid.n}")
    kin = 1.0 / (2.0 * m_reduced * grid.dx**2)
    diag = 2.0 * kin + u[1:-1]
    offdiag = np.full(grid.n - 3, -kin)
    return TridiagonalHamiltonian(grid, float(m_reduced), u, diag, offdiag)


@dataclass(frozen=True, eq=False)
class ModeCatalog:
    """Lowest eigenmodes of a synthetic potential, ascending in frequency.

    ``eigenvalues`` are the raw eigenvalues of the discretized operator.
    ``omega`` measures them from the bottom of the potential (``floor``), which
    is the convention used when quoting mode frequencies.  Mode indices in the
    public accessors start at 1 (the ground mode).
    """

    grid: SpatialGrid
    eigenvalues: np.ndarray
    psi: np.ndarray = field(repr=False)  # shape (k, n), real, zero at both ends
    floor: float = 0.0

    @property
    def k(self) -> int:
        return self.eigenvalues.size

    @property
    def omega(self) -> np.ndarray:
        return self.eigenvalues - self.floor

    def mode(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.k:
            raise ParameterError(f"mode index {n} outside 1..{self.k}")
        return self.psi[n - 1]

    def field(self, n: int) -> ComplexField:
        return ComplexField(self.grid, self.mode(n))

    def overlap_matrix(self) -> np.ndarray:
        return (self.psi * self.grid.weights) @ self.psi.T

    def derivative_matrix(self) -> np.ndarray:
        """``D[n-1, m-1] = integral psi_n d/dx psi_m dx`` with central differences."""
        dpsi = np.gradient(self.psi, self.grid.dx, axis=1)
        return (self.psi * self.grid.weights) @ dpsi.T

    def rabi_matrix(self, beta: float, omega_c: float, eta: float) -> np.ndarray:
        return beta * omega_c**2 / (2j * eta) * self.derivative_matrix()


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    # leftmost local extremum among samples above 1e-3 of the peak is made positive
    mag = np.abs(psi)
    big = mag > 1e-3 * mag.max()
    d = np.diff(psi)
    for i in range(1, psi.size - 1):
        if big[i] and d[i - 1] * d[i] <= 0 and mag[i] >= mag[i - 1] and mag[i] >= mag[i + 1]:
            return psi if psi[i] > 0 else -psi
    return psi if psi[np.argmax(mag)] > 0 else -psi


def solve_modes(H: TridiagonalHamiltonian, k: int, rtol: float = 1e-9) -> ModeCatalog:
    """Lowest ``k`` eigenpairs of ``H``, normalized to unit trapezoidal norm."""
    if not 1 <= k < H.size:
        raise ParameterError(f"k must lie in [1, {H.size - 1}], got {k}")
    try:
        w, v = eigh_tridiagonal(H.diag, H.offdiag, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise NumericError(f"tridiagonal eigensolver failed for k={k}, size={H.size}: {exc}") from exc
    grid = H.grid
    psi = np.zeros((k, grid.n))
    for i in range(k):
        res = np.linalg.norm(H.matvec(v[:, i]) - w[i] * v[:, i])
        if res > rtol * max(abs(w[i]), 1.0):
            raise NumericError(f"mode {i + 1}: residual {res:.3e} exceeds tolerance (eigenvalue {w[i]:.6e})")
        psi[i, 1:-1] = _fix_sign(v[:, i]) / np.sqrt(grid.dx)
    return ModeCatalog(grid, w, psi, float(H.u.min()))


def _check_grids(*fields: ComplexField) -> SpatialGrid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("fields live on different grids")
    return grid


def effective_rabi(beta: float, omega_c: float, eta: float, psi_n: ComplexField, psi_m: ComplexField) -> complex:
    """Effective driving Rabi frequency between two modes under a beta-modulated control pair."""
    grid = _check_grids(psi_n, psi_m)
    dpsi_m = np.gradient(psi_m.values, grid.dx)
    integral = grid.integrate(np.conj(psi_n.values) * dpsi_m)
    return complex(beta * omega_c**2 / (2j * eta) * integral)


def project(field: ComplexField, psi_n: ComplexField) -> complex:
    grid = _check_grids(field, psi_n)
    return complex(grid.integrate(np.conj(psi_n.values) * field.values))


def write_catalog(catalog: ModeCatalog, path) -> None:
    """Text catalog: a ``k n dx`` header, then one line per mode with omega and the samples."""
    path = Path(path)
    lines = [f"{catalog.k} {catalog.grid.n} {catalog.grid.dx!r}"]
    for w, p in zip(catalog.omega, catalog.psi):
        lines.append(" ".join([repr(float(w))] + [repr(float(s)) for s in p]))
    path.write_text("\n".join(lines) + "\n")


def read_catalog(path) -> tuple[np.ndarray, np.ndarray, float]:
    """Read back ``(omega, psi, dx)`` from :func:`write_catalog` output."""
    rows = Path(path).read_text().split("\n")
    k, n, dx = rows[0].split()
    k, n = int(k), int(n)
    data = np.array([[float(s) for s in r.split()] for r in rows[1 : k + 1]])
    if data.shape != (k, n + 1):
        raise ValueError(f"catalog body has shape {data.shape}, expected {(k, n + 1)}")
    return data[:, 0], data[:, 1:], float(dx)
