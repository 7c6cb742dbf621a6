"""Square and triangular lattices with a finite rotation group, in exact
integer arithmetic.

Order 4: square lattice generated by k and ik, rotation by i.
Order 6: triangular lattice generated by k and eps*k (eps = exp(i pi/3)),
rotation by eps.

Lattice points are integer coordinate pairs; the rotation acts by an
integer 2x2 matrix, and Heisenberg phases of lattice monomials are exact
integer multiples of theta/2 where theta is the torus commutation angle
(-k^2 for order 4, -(sqrt 3 / 2) k^2 for order 6).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .group import AlgebraElement, Monomial

__all__ = [
    "OrbifoldSpec",
    "LatticeMonomial",
    "ConjugacyClass",
    "compose_lattice",
    "lattice_inverse",
    "enumerate_classes",
    "orbifold_trace",
    "class_table_rows",
]

Coords = tuple[int, int]


@dataclass(frozen=True)
class OrbifoldSpec:
    """Lattice length scale and rotation order (4 or 6)."""

    order: int
    k: float

    def __post_init__(self):
        if self.order not in (4, 6):
            raise ValidationError(f"rotation order must be 4 or 6, got {self.order}")
        if self.k <= 0:
            raise ValidationError("length scale k must be positive")

    @property
    def tau(self) -> complex:
        """Second lattice generator divided by k."""
        return 1j if self.order == 4 else cmath.exp(1j * np.pi / 3)

    @property
    def rotation_coords(self) -> np.ndarray:
        """Integer matrix of multiplication by the primitive rotation."""
        if self.order == 4:
            return np.array([[0, -1], [1, 0]], dtype=np.int64)
        return np.array([[0, -1], [1, 1]], dtype=np.int64)

    @property
    def theta(self) -> float:
        """Torus commutation angle: V U = exp(i theta) U V."""
        if self.order == 4:
            return -self.k**2
        return -(np.sqrt(3.0) / 2.0) * self.k**2

    def to_complex(self, coords: Coords) -> complex:
        return self.k * (coords[0] + coords[1] * self.tau)

    def norm2_int(self, coords: Coords) -> int:
        """|z|^2 in units of k^2, an exact integer on both lattices."""
        n1, n2 = coords
        if self.order == 4:
            return n1 * n1 + n2 * n2
        return n1 * n1 + n2 * n2 + n1 * n2

    def rotate(self, coords: Coords, beta: int = 1) -> Coords:
        m = np.linalg.matrix_power(self.rotation_coords, beta % self.order)
        v = m @ np.array(coords, dtype=np.int64)
        return int(v[0]), int(v[1])

    def coords_of(self, z: complex, tol: float = 1e-9) -> Coords:
        """Integer coordinates of a complex lattice point."""
        w = complex(z) / self.k
        n2 = w.imag / self.tau.imag
        n1 = w.real - n2 * self.tau.real
        c = (round(n1), round(n2))
        if abs(self.to_complex(c) - z) >= tol * (1.0 + abs(z)):
            raise ValidationError(f"{z} is not on the lattice")
        return c

    def rotation_index_of(self, g, tol: float = 1e-9) -> int:
        g = np.atleast_2d(np.asarray(g, dtype=complex))
        if g.shape != (1, 1):
            raise ValidationError("orbifold monomials live over n=1")
        lam = g[0, 0]
        alpha = round((np.angle(lam) % (2 * np.pi)) / (2 * np.pi / self.order))
        alpha %= self.order
        root = cmath.exp(2j * np.pi * alpha / self.order)
        if abs(lam - root) >= tol:
            raise ValidationError(f"{lam} is not a power of the order-{self.order} rotation")
        return alpha


@dataclass(frozen=True)
class LatticeMonomial:
    """Exact monomial exp(i nu theta / 2) T_z R^alpha on the lattice."""

    nu: int
    coords: Coords
    alpha: int

    def to_monomial(self, spec: OrbifoldSpec) -> Monomial:
        g = np.array([[cmath.exp(2j * np.pi * self.alpha / spec.order)]])
        coeff = cmath.exp(0.5j * self.nu * spec.theta)
        return Monomial(coeff, np.array([spec.to_complex(self.coords)]), g)


def compose_lattice(
    spec: OrbifoldSpec, m1: LatticeMonomial, m2: LatticeMonomial
) -> LatticeMonomial:
    """Exact product; the Heisenberg phase is an integer multiple of theta/2.

    For z = (a1 + b1 tau) k and z' = (a2 + b2 tau) k one has
    -Im(z conj(z'))/2 = (b1 a2 - a1 b2) theta / 2 on both lattices.
    """
    a1, b1 = m1.coords
    a2, b2 = spec.rotate(m2.coords, m1.alpha)
    cross = b1 * a2 - a1 * b2
    return LatticeMonomial(
        nu=m1.nu + m2.nu + cross,
        coords=(a1 + a2, b1 + b2),
        alpha=(m1.alpha + m2.alpha) % spec.order,
    )


def lattice_inverse(spec: OrbifoldSpec, m: LatticeMonomial) -> LatticeMonomial:
    c = spec.rotate(m.coords, -m.alpha)
    return LatticeMonomial(nu=-m.nu, coords=(-c[0], -c[1]), alpha=(-m.alpha) % spec.order)


def _sublattice_matrix(spec: OrbifoldSpec, alpha: int) -> np.ndarray:
    """Integer matrix of multiplication by (1 - eps^alpha) in lattice coords."""
    m = np.linalg.matrix_power(spec.rotation_coords, alpha % spec.order)
    return np.eye(2, dtype=np.int64) - m


def _in_sublattice(s: np.ndarray, w: Coords) -> bool:
    """Whether integer vector w lies in s * Z^2, solved by the adjugate."""
    det = int(s[0, 0]) * int(s[1, 1]) - int(s[0, 1]) * int(s[1, 0])
    if det == 0:
        return w[0] == 0 and w[1] == 0
    adj = np.array([[s[1, 1], -s[0, 1]], [-s[1, 0], s[0, 0]]], dtype=np.int64)
    v = adj @ np.array(w, dtype=np.int64)
    return int(v[0]) % det == 0 and int(v[1]) % det == 0


@dataclass(frozen=True)
class ConjugacyClass:
    """Conjugacy class (eps^Z z + (1 - eps^alpha) L) x {eps^alpha}.

    For alpha = 0 only the origin gives a class with fixed points.
    """

    spec: OrbifoldSpec
    alpha: int
    representative: Coords
    offsets: tuple[Coords, ...]

    def contains(self, coords: Coords, alpha: int | None = None) -> bool:
        if alpha is not None and alpha % self.spec.order != self.alpha:
            return False
        s = _sublattice_matrix(self.spec, self.alpha)
        rep = self.representative
        for beta in range(self.spec.order):
            r = self.spec.rotate(rep, beta)
            if _in_sublattice(s, (coords[0] - r[0], coords[1] - r[1])):
                return True
        return False

    def sublattice_index(self) -> int:
        s = _sublattice_matrix(self.spec, self.alpha)
        det = int(round(abs(np.linalg.det(s.astype(float)))))
        return det

    def trace_weight(self, coords: Coords) -> complex:
        """exp((i/4) |z'|^2 cot(pi alpha / order)); 1 for the identity class."""
        if self.alpha == 0:
            return 1.0 + 0j
        cot = 1.0 / np.tan(np.pi * self.alpha / self.spec.order)
        return cmath.exp(0.25j * self.spec.norm2_int(coords) * self.spec.k**2 * cot)


def _canonical_key(spec: OrbifoldSpec, coords: Coords):
    """Smallest |z|, then smallest argument in [0, 2pi), then coordinates."""
    z = spec.to_complex(coords)
    angle = float(np.angle(z)) % (2 * np.pi) if coords != (0, 0) else 0.0
    return (spec.norm2_int(coords), angle, coords[0], coords[1])


def enumerate_classes(spec: OrbifoldSpec, radius: int = 3) -> list[ConjugacyClass]:
    """All conjugacy classes with nontrivial fixed-point set that meet the
    window |z| <= radius * k, ordered by (alpha, canonical representative).

    At alpha = 0 the affine map w -> w + z only has fixed points for z = 0;
    for alpha != 0 the map always does.
    """
    classes: list[ConjugacyClass] = [
        ConjugacyClass(spec, 0, (0, 0), ((0, 0),))
    ]
    window = [
        (n1, n2)
        for n1 in range(-3 * radius, 3 * radius + 1)
        for n2 in range(-3 * radius, 3 * radius + 1)
        if spec.norm2_int((n1, n2)) <= radius * radius
    ]
    for alpha in range(1, spec.order):
        found: list[list[Coords]] = []
        s = _sublattice_matrix(spec, alpha)
        for coords in window:
            member_of = None
            for group in found:
                rep = group[0]
                probe = ConjugacyClass(spec, alpha, rep, ())
                if probe.contains(coords):
                    member_of = group
                    break
            if member_of is None:
                found.append([coords])
            else:
                member_of.append(coords)
        for group in found:
            rep = min(group, key=lambda c: _canonical_key(spec, c))
            offsets = _coset_offsets(spec, alpha, rep, s)
            classes.append(ConjugacyClass(spec, alpha, rep, offsets))
    classes.sort(key=lambda c: (c.alpha, _canonical_key(spec, c.representative)))
    return classes


def _coset_offsets(
    spec: OrbifoldSpec, alpha: int, rep: Coords, s: np.ndarray
) -> tuple[Coords, ...]:
    """Distinct cosets eps^beta rep + (1 - eps^alpha) L, smallest reps."""
    orbit = [spec.rotate(rep, beta) for beta in range(spec.order)]
    cosets: list[Coords] = []
    for point in orbit:
        distinct = True
        for seen in cosets:
            if _in_sublattice(s, (point[0] - seen[0], point[1] - seen[1])):
                distinct = False
                break
        if distinct:
            cosets.append(point)
    reduced = []
    for c in cosets:
        best = c
        for n1 in range(-2, 3):
            for n2 in range(-2, 3):
                shift = s @ np.array([n1, n2])
                cand = (c[0] + int(shift[0]), c[1] + int(shift[1]))
                if _canonical_key(spec, cand) < _canonical_key(spec, best):
                    best = cand
        reduced.append(best)
    reduced.sort(key=lambda c: _canonical_key(spec, c))
    return tuple(reduced)


def lattice_support(spec: OrbifoldSpec, f: AlgebraElement, tol: float = 1e-9):
    """Decompose an algebra element into (coeff, coords, alpha) triples."""
    out = []
    for m in f.monomials:
        coords = spec.coords_of(complex(m.z[0]), tol)
        alpha = spec.rotation_index_of(m.g, tol)
        out.append((m.coeff, coords, alpha))
    return out


def orbifold_trace(
    spec: OrbifoldSpec, cls: ConjugacyClass, f: AlgebraElement
) -> complex:
    """Localized trace of a finitely supported lattice element.

    Sums coeff * exp((i/4)|z'|^2 cot(pi alpha / order)) over the support
    points lying in the class; for alpha = 0 only the origin contributes
    with weight 1.
    """
    total = 0j
    for coeff, coords, alpha in lattice_support(spec, f):
        if alpha != cls.alpha:
            continue
        if cls.alpha == 0:
            if coords != (0, 0):
                continue
        elif not cls.contains(coords):
            continue
        total += coeff * cls.trace_weight(coords)
    return total


def class_table_rows(spec: OrbifoldSpec, radius: int = 3) -> list[dict]:
    """CSV-ready class table.

    Set-difference rows of the published tables are marked by
    complement_flag: at a given alpha with exactly two classes, the one
    holding more cosets is the complement of its sibling.
    """
    classes = enumerate_classes(spec, radius)
    by_alpha: dict[int, list[ConjugacyClass]] = {}
    for c in classes:
        by_alpha.setdefault(c.alpha, []).append(c)
    rows = []
    for c in classes:
        siblings = by_alpha[c.alpha]
        complement = (
            len(siblings) == 2
            and len(c.offsets) > min(len(s.offsets) for s in siblings)
        )
        s = _sublattice_matrix(spec, c.alpha)
        rows.append(
            {
                "z_repr_lattice_coords": f"({c.representative[0]},{c.representative[1]})",
                "alpha": c.alpha,
                "sublattice_gen1": f"({int(s[0, 0])},{int(s[1, 0])})",
                "sublattice_gen2": f"({int(s[0, 1])},{int(s[1, 1])})",
                "offsets": ";".join(f"({a},{b})" for a, b in c.offsets),
                "complement_flag": complement,
            }
        )
    return rows
