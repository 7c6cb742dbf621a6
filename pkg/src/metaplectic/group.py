"""The group C^n x| U(n) of isometric affine canonical transformations and
the algebra it generates.

A monomial coeff * T_z * R_g quantizes the affine map w -> g w + z; the
composition rule carries the Heisenberg phase

    T_{z1} T_{z2} = exp(-i Im(z1 . conj(z2)) / 2) T_{z1 + z2},
    R_g T_z R_g^{-1} = T_{g z}.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .clifford import _check_unitary, _unitary_eig
from .errors import DimensionMismatchError, ValidationError

__all__ = [
    "Monomial",
    "AlgebraElement",
    "FixedPointData",
    "compose",
    "inverse",
    "fixed_point_data",
    "affine_has_fixed_point",
    "epsilon_phase",
    "w_transform",
    "same_conjugacy_class",
]

#: |lambda - 1| below this classifies a unitary eigenvalue as 1
ANGLE_TOL = 1e-9
#: (z, g) pairs closer than this are merged inside AlgebraElement
MERGE_TOL = 1e-9


def _pairing(z1: np.ndarray, z2: np.ndarray) -> complex:
    """Hermitian pairing (z1, z2) = z1 . conj(z2)."""
    return complex(np.dot(z1, np.conj(z2)))


@dataclass(frozen=True)
class Monomial:
    """coeff * T_z * R_g with z in C^n and g in U(n)."""

    coeff: complex
    z: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        g = _check_unitary(self.g)
        if g.shape[0] != z.shape[0]:
            raise DimensionMismatchError(
                f"z has length {z.shape[0]} but g is {g.shape[0]}x{g.shape[0]}"
            )
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @staticmethod
    def identity(n: int) -> "Monomial":
        return Monomial(1.0, np.zeros(n, dtype=complex), np.eye(n, dtype=complex))

    @staticmethod
    def heisenberg(z) -> "Monomial":
        """T_z."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return Monomial(1.0, z, np.eye(z.shape[0], dtype=complex))

    @staticmethod
    def rotation(g) -> "Monomial":
        """R_g."""
        g = np.atleast_2d(np.asarray(g, dtype=complex))
        return Monomial(1.0, np.zeros(g.shape[0], dtype=complex), g)


def compose(m1: Monomial, m2: Monomial) -> Monomial:
    """Product of two monomials."""
    if m1.n != m2.n:
        raise DimensionMismatchError(f"mode counts differ: {m1.n} vs {m2.n}")
    gz2 = m1.g @ m2.z
    phase = cmath.exp(-0.5j * _pairing(m1.z, gz2).imag)
    return Monomial(m1.coeff * m2.coeff * phase, m1.z + gz2, m1.g @ m2.g)


def inverse(m: Monomial) -> Monomial:
    """Inverse monomial; compose(m, inverse(m)) is the identity."""
    ginv = m.g.conj().T
    return Monomial(1.0 / m.coeff, -(ginv @ m.z), ginv)


class AlgebraElement:
    """Finite sum of monomials, canonicalized by merging close (z, g)."""

    def __init__(self, n: int, monomials=()):
        self.n = n
        self.monomials: list[Monomial] = []
        for m in monomials:
            self._absorb(m)

    def _absorb(self, m: Monomial) -> None:
        if m.n != self.n:
            raise DimensionMismatchError(
                f"monomial over n={m.n} added to element over n={self.n}"
            )
        for i, known in enumerate(self.monomials):
            if (
                np.linalg.norm(known.z - m.z) < MERGE_TOL
                and np.max(np.abs(known.g - m.g)) < MERGE_TOL
            ):
                merged = Monomial(known.coeff + m.coeff, known.z, known.g)
                if abs(merged.coeff) < 1e-15:
                    del self.monomials[i]
                else:
                    self.monomials[i] = merged
                return
        if abs(m.coeff) >= 1e-15:
            self.monomials.append(m)

    @staticmethod
    def from_monomial(m: Monomial) -> "AlgebraElement":
        return AlgebraElement(m.n, [m])

    @staticmethod
    def identity(n: int) -> "AlgebraElement":
        return AlgebraElement.from_monomial(Monomial.identity(n))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.n, self.monomials + other.monomials)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __rmul__(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(
            self.n, [Monomial(c * m.coeff, m.z, m.g) for m in self.monomials]
        )

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return other * self
        return AlgebraElement(
            self.n,
            [compose(a, b) for a in self.monomials for b in other.monomials],
        )

    def adjoint(self) -> "AlgebraElement":
        """Operator adjoint: (c T_z R_g)^* = conj(c) T_{-g^{-1}z} R_{g^{-1}}."""
        out = []
        for m in self.monomials:
            ginv = m.g.conj().T
            out.append(Monomial(np.conj(m.coeff), -(ginv @ m.z), ginv))
        return AlgebraElement(self.n, out)

    def __len__(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True)
class FixedPointData:
    """Eigenstructure of g in U(n) split at eigenvalue 1.

    angles: the m angles in (0, 2pi) of eigenvalues != 1;
    eigenvectors: n x m, orthonormal, matching the angles;
    fixed_basis: n x (n - m) orthonormal basis of ker(g - 1).
    """

    angles: np.ndarray
    eigenvectors: np.ndarray
    fixed_basis: np.ndarray

    @property
    def m(self) -> int:
        return self.angles.shape[0]

    @property
    def dim_fixed(self) -> int:
        return self.fixed_basis.shape[1]


def fixed_point_data(g, tol: float = ANGLE_TOL) -> FixedPointData:
    """Orthonormal eigendecomposition of a unitary, split at eigenvalue 1."""
    g = _check_unitary(g)
    eigvals, q = _unitary_eig(g)
    moving = [j for j in range(len(eigvals)) if abs(eigvals[j] - 1.0) >= tol]
    fixed = [j for j in range(len(eigvals)) if abs(eigvals[j] - 1.0) < tol]
    angles = np.array([np.angle(eigvals[j]) % (2 * np.pi) for j in moving])
    return FixedPointData(
        angles=angles,
        eigenvectors=q[:, moving].copy(),
        fixed_basis=q[:, fixed].copy(),
    )


def affine_has_fixed_point(z, g, tol: float = ANGLE_TOL) -> bool:
    """Whether w -> g w + z has a fixed point.

    Equivalent to z being orthogonal to the fixed subspace of g.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    fpd = fixed_point_data(g, tol)
    if fpd.dim_fixed == 0:
        return True
    proj = fpd.fixed_basis.conj().T @ z
    return float(np.linalg.norm(proj)) < tol * (1.0 + float(np.linalg.norm(z)))


def _epsilon_raw(ws) -> float:
    """Accumulated Heisenberg phase of T_{w_0} ... T_{w_r} T_z^{-1}, z = sum w.

    Computed by folding the product formula, no modular reduction.
    """
    total = 0.0
    acc = None
    for w in ws:
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        if acc is None:
            acc = w.copy()
        else:
            total += -0.5 * _pairing(acc, w).imag
            acc = acc + w
    return total


def epsilon_phase(ws) -> float:
    """Phase angle in (-pi, pi] with exp(i eps) Id = T_{w_0}...T_{w_r} T_z^{-1}."""
    raw = _epsilon_raw(ws)
    reduced = (raw + np.pi) % (2 * np.pi) - np.pi
    if reduced == -np.pi:
        reduced = np.pi
    return float(reduced)


def w_transform(z_list, g_list):
    """Rotate translation parameters through the accumulated rotations.

    Returns (w_0..w_r, z, g) with w_j = (g_0 ... g_{j-1}) z_j, z = sum w_j
    and g = g_0 g_1 ... g_r.
    """
    if len(z_list) != len(g_list):
        raise DimensionMismatchError("z and g lists differ in length")
    zs = [np.atleast_1d(np.asarray(z, dtype=complex)) for z in z_list]
    gs = [_check_unitary(g) for g in g_list]
    n = zs[0].shape[0]
    for z, g in zip(zs, gs):
        if z.shape[0] != n or g.shape[0] != n:
            raise DimensionMismatchError("mixed mode counts in w_transform")
    ws = []
    acc = np.eye(n, dtype=complex)
    for z, g in zip(zs, gs):
        ws.append(acc @ z)
        acc = acc @ g
    return ws, sum(ws), acc


def _sorted_eigenangles(g, tol: float) -> np.ndarray:
    eigvals, _ = _unitary_eig(g)
    angles = []
    for lam in eigvals:
        if abs(lam - 1.0) < tol:
            angles.append(0.0)
        else:
            angles.append(float(np.angle(lam) % (2 * np.pi)))
    return np.sort(np.array(angles))


def same_conjugacy_class(m1, m2, tol: float = 1e-8) -> bool:
    """Whether (z1, g1) and (z2, g2) are conjugate in C^n x| U(n).

    Conjugation by (w, h) sends (z, g) to (h z + (1 - h g h^{-1}) w,
    h g h^{-1}).  Over all valid intertwiners h the affine equation is
    solvable iff the eigenvalue multisets agree and || P_fix z || matches,
    where P_fix projects onto ker(g - 1): the translation can be absorbed
    up to range(1 - g), and h rotates the fixed component freely.
    """
    z1, g1 = m1
    z2, g2 = m2
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(z2, dtype=complex))
    if z1.shape != z2.shape:
        return False
    a1 = _sorted_eigenangles(g1, ANGLE_TOL)
    a2 = _sorted_eigenangles(g2, ANGLE_TOL)
    if np.max(np.abs(a1 - a2), initial=0.0) >= tol:
        return False
    f1 = fixed_point_data(g1)
    f2 = fixed_point_data(g2)
    if f1.dim_fixed != f2.dim_fixed:
        return False
    r1 = np.linalg.norm(f1.fixed_basis.conj().T @ z1) if f1.dim_fixed else 0.0
    r2 = np.linalg.norm(f2.fixed_basis.conj().T @ z2) if f2.dim_fixed else 0.0
    scale = 1.0 + max(float(np.linalg.norm(z1)), float(np.linalg.norm(z2)))
    return abs(float(r1) - float(r2)) < tol * scale
