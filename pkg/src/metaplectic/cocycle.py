"""Noncommutative differential forms, localized closed graded traces, and
the even cocycle components of the index pairing.

A form is a finite sum of u T_z R_g with u in Lambda(R^{2n}).  The
differential is d(u T_z R_g) = (-1)^{deg u} u sigma(z) T_z R_g, the
localized trace at a conjugacy class integrates the form part over the
fixed subspace against exp(-omega) with cotangent weights, and the cocycle
component of degree 2k per monomial tuple reads

    (i^{-k} / (2k)!) e^{i eps} prod_j exp((i/4)|<z, e_j>|^2 cot(phi_j/2))
        * Berezin_{fix(g)}( sigma(w_1) ^ ... ^ sigma(w_2k) ^ e^{-omega} )

whenever the affine map w -> g w + z has fixed points and k does not
exceed the complex dimension of the fixed subspace, and 0 otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .group import (
    AlgebraElement,
    Monomial,
    _epsilon_raw,
    _pairing,
    affine_has_fixed_point,
    fixed_point_data,
    same_conjugacy_class,
    w_transform,
)
from .multivector import (
    GrassmannElement,
    berezin,
    exp_neg_omega,
    restrict,
    sigma_one_form,
    substitute_generators,
    wedge,
)

__all__ = [
    "NCForm",
    "ProjectionMatrix",
    "form_pullback",
    "differential",
    "tau_localized",
    "phi_cocycle",
    "psi",
    "psi_1d_closed_form",
    "pair_with_projection",
    "torus_psi",
]

VANISH_TOL = 1e-9


def form_pullback(g, u: GrassmannElement) -> GrassmannElement:
    """Pullback (g^*)^{-1} on Lambda(R^{2n}) for g = B + iA in U(n):

        dx_l -> sum_k B_kl dx_k - A_kl dp_k
        dp_l -> sum_k A_kl dx_k + B_kl dp_k
    """
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    n = g.shape[0]
    if u.n != n:
        raise DimensionMismatchError(f"form over n={u.n}, matrix over n={n}")
    B = g.real
    A = g.imag
    images: list[GrassmannElement] = []
    for l in range(n):
        dx_img: dict[int, complex] = {}
        dp_img: dict[int, complex] = {}
        for k in range(n):
            if B[k, l]:
                dx_img[1 << (2 * k)] = complex(B[k, l])
                dp_img[1 << (2 * k + 1)] = complex(B[k, l])
            if A[k, l]:
                dx_img[1 << (2 * k + 1)] = dx_img.get(1 << (2 * k + 1), 0j) - A[k, l]
                dp_img[1 << (2 * k)] = dp_img.get(1 << (2 * k), 0j) + A[k, l]
        images.append(GrassmannElement(n, dx_img))
        images.append(GrassmannElement(n, dp_img))
    # swap: images list is ordered dx_1, dp_1, dx_2, ... by construction
    ordered = []
    for l in range(n):
        ordered.append(images[2 * l])
        ordered.append(images[2 * l + 1])
    return substitute_generators(u, ordered, n)


class NCForm:
    """Finite sum of (u, z, g) monomial forms with canonical merging."""

    def __init__(self, n: int, terms=()):
        self.n = n
        self.terms: list[tuple[GrassmannElement, np.ndarray, np.ndarray]] = []
        for u, z, g in terms:
            self._absorb(u, z, g)

    def _absorb(self, u: GrassmannElement, z, g) -> None:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g = np.atleast_2d(np.asarray(g, dtype=complex))
        if u.n != self.n or z.shape[0] != self.n or g.shape[0] != self.n:
            raise DimensionMismatchError("mixed mode counts in NCForm")
        if u.is_zero():
            return
        for i, (known_u, known_z, known_g) in enumerate(self.terms):
            if (
                np.linalg.norm(known_z - z) < 1e-9
                and np.max(np.abs(known_g - g)) < 1e-9
            ):
                merged = known_u + u
                if merged.is_zero():
                    del self.terms[i]
                else:
                    self.terms[i] = (merged, known_z, known_g)
                return
        self.terms.append((u, z, g))

    @staticmethod
    def from_algebra_element(a: AlgebraElement) -> "NCForm":
        return NCForm(
            a.n,
            [
                (GrassmannElement.scalar(a.n, m.coeff), m.z, m.g)
                for m in a.monomials
            ],
        )

    @staticmethod
    def from_monomial(m: Monomial) -> "NCForm":
        return NCForm.from_algebra_element(AlgebraElement.from_monomial(m))

    def degrees(self) -> set[int]:
        out: set[int] = set()
        for u, _, _ in self.terms:
            out |= u.degrees()
        return out

    def __add__(self, other: "NCForm") -> "NCForm":
        return NCForm(self.n, self.terms + other.terms)

    def __rmul__(self, c: complex) -> "NCForm":
        return NCForm(self.n, [(c * u, z, g) for u, z, g in self.terms])

    def __mul__(self, other: "NCForm") -> "NCForm":
        """Monomial rule with the Heisenberg phase:

        (u1, z1, g1)(u2, z2, g2)
            = e^{-i Im(z1, g1 z2)/2} (u1 ^ pullback(g1) u2, z1 + g1 z2, g1 g2).
        """
        if not isinstance(other, NCForm):
            return NotImplemented
        if self.n != other.n:
            raise DimensionMismatchError("mode counts differ in NCForm product")
        out = NCForm(self.n)
        for u1, z1, g1 in self.terms:
            for u2, z2, g2 in other.terms:
                gz2 = g1 @ z2
                phase = cmath.exp(-0.5j * _pairing(z1, gz2).imag)
                out._absorb(
                    phase * wedge(u1, form_pullback(g1, u2)), z1 + gz2, g1 @ g2
                )
        return out


def differential(a) -> NCForm:
    """d(u T_z R_g) = (-1)^{deg u} u sigma(z) T_z R_g, extended linearly
    over homogeneous components."""
    a = _as_ncform(a)
    out = NCForm(a.n)
    for u, z, g in a.terms:
        sig = sigma_one_form(z)
        for deg in u.degrees():
            part = u.degree_part(deg)
            sign = -1.0 if deg & 1 else 1.0
            out._absorb(sign * wedge(part, sig), z, g)
    return out


def _cot_weight(z: np.ndarray, fpd) -> complex:
    w = 1.0 + 0j
    for j in range(fpd.m):
        comp = _pairing(z, fpd.eigenvectors[:, j])
        w *= cmath.exp(0.25j * abs(comp) ** 2 / math.tan(fpd.angles[j] / 2))
    return w


def tau_localized(anchor, a: NCForm, tol: float = 1e-8) -> complex:
    """Closed graded trace localized at the conjugacy class of the anchor.

    For each stored monomial in the class, integrates u ^ e^{-omega} over
    the fixed subspace of its g with the cotangent weights.  The anchor
    must define an affine map with fixed points.
    """
    z0, g0 = anchor
    if not affine_has_fixed_point(z0, g0):
        raise ValidationError("anchor has an empty affine fixed-point set")
    total = 0j
    emo = exp_neg_omega(a.n)
    for u, z, g in a.terms:
        if not same_conjugacy_class((z, g), (z0, g0), tol):
            continue
        fpd = fixed_point_data(g)
        integrand = restrict(wedge(u, emo), fpd.fixed_basis.T)
        total += _cot_weight(z, fpd) * berezin(integrand)
    return total


def _as_ncform(a) -> NCForm:
    if isinstance(a, NCForm):
        return a
    if isinstance(a, AlgebraElement):
        return NCForm.from_algebra_element(a)
    if isinstance(a, Monomial):
        return NCForm.from_monomial(a)
    raise TypeError(f"cannot interpret {type(a)} as a form")


def phi_cocycle(anchor, k: int, args, tol: float = 1e-8) -> complex:
    """Cyclic cocycle of degree k: tau_anchor(a_0 da_1 ... da_k)."""
    if len(args) != k + 1:
        raise ValueError(f"degree-{k} cocycle needs {k + 1} arguments")
    forms = [_as_ncform(a) for a in args]
    prod = forms[0]
    for a in forms[1:]:
        prod = prod * differential(a)
    return tau_localized(anchor, prod, tol)


def _psi_monomials(k: int, monos: list[Monomial]) -> complex:
    ws, z, g = w_transform([m.z for m in monos], [m.g for m in monos])
    if not affine_has_fixed_point(z, g):
        return 0j
    fpd = fixed_point_data(g)
    if k > fpd.dim_fixed:
        return 0j
    coeff = 1.0 + 0j
    for m in monos:
        coeff *= m.coeff
    integrand = exp_neg_omega(monos[0].n)
    for w in reversed(ws[1:]):
        integrand = wedge(sigma_one_form(w), integrand)
    factor = berezin(restrict(integrand, fpd.fixed_basis.T))
    eps = _epsilon_raw(ws)
    scale = (1j) ** (-k) / math.factorial(2 * k)
    return scale * coeff * cmath.exp(1j * eps) * _cot_weight(z, fpd) * factor


def psi(k: int, args) -> complex:
    """Degree-2k cocycle component on 2k+1 algebra elements.

    Evaluated monomial tuple by monomial tuple and summed.
    """
    if len(args) != 2 * k + 1:
        raise ValueError(f"psi_{2 * k} needs {2 * k + 1} arguments")
    elements = [
        a if isinstance(a, AlgebraElement) else AlgebraElement.from_monomial(a)
        for a in args
    ]
    n = elements[0].n
    if k < 0 or k > n:
        raise ValueError(f"k={k} out of range for n={n}")
    total = 0j
    stack = [[]]
    for a in elements:
        stack = [t + [m] for t in stack for m in a.monomials]
    for tup in stack:
        total += _psi_monomials(k, tup)
    return total


def psi_contributions(k: int, args):
    """Per-tuple contributions with their conjugacy data, for reporting."""
    elements = [
        a if isinstance(a, AlgebraElement) else AlgebraElement.from_monomial(a)
        for a in args
    ]
    stack = [[]]
    for a in elements:
        stack = [t + [m] for t in stack for m in a.monomials]
    out = []
    for tup in stack:
        val = _psi_monomials(k, tup)
        if abs(val) < 1e-15:
            continue
        ws, z, g = w_transform([m.z for m in tup], [m.g for m in tup])
        fpd = fixed_point_data(g)
        out.append(
            {
                "value": val,
                "z": z,
                "angles": fpd.angles,
                "dim_fixed": fpd.dim_fixed,
            }
        )
    return out


def psi_1d_closed_form(k: int, monomials) -> complex:
    """Closed forms of the n = 1 cocycle components.

    k = 0:  0 for phi = 0, z != 0; 1 for phi = 0, z = 0;
            exp((i/4)|z|^2 cot(phi/2)) for phi != 0.
    k = 1:  0 unless phi_0 + phi_1 + phi_2 = 0 (mod 2pi) and
            z_0 + e^{i phi_0} z_1 + e^{i(phi_0 + phi_1)} z_2 = 0, else
            (e^{i eps}/4)(z_1 conj(z_2) e^{-i phi_1}
                          - conj(z_1) z_2 e^{i phi_1}),
    with eps the phase of T_{w_0} T_{w_1} T_{w_2}.
    """
    monos = list(monomials)
    for m in monos:
        if m.n != 1:
            raise DimensionMismatchError("closed form is for n=1 only")
    coeff = 1.0 + 0j
    for m in monos:
        coeff *= m.coeff
    zs = [complex(m.z[0]) for m in monos]
    lams = [complex(m.g[0, 0]) for m in monos]
    if k == 0:
        (z,), (lam,) = zs, lams
        if abs(lam - 1.0) < VANISH_TOL:
            return coeff if abs(z) < VANISH_TOL else 0j
        phi = np.angle(lam) % (2 * np.pi)
        return coeff * cmath.exp(0.25j * abs(z) ** 2 / math.tan(phi / 2))
    if k == 1:
        z0, z1, z2 = zs
        l0, l1, l2 = lams
        if abs(l0 * l1 * l2 - 1.0) >= VANISH_TOL:
            return 0j
        w = z0 + l0 * z1 + l0 * l1 * z2
        scale = 1.0 + abs(z0) + abs(z1) + abs(z2)
        if abs(w) >= VANISH_TOL * scale:
            return 0j
        eps = _epsilon_raw(
            [np.array([z0]), np.array([l0 * z1]), np.array([l0 * l1 * z2])]
        )
        val = (z1 * np.conj(z2) / l1 - np.conj(z1) * z2 * l1) / 4.0
        return coeff * cmath.exp(1j * eps) * val
    raise ValueError("closed forms exist for k in {0, 1}")


@dataclass
class ProjectionMatrix:
    """Matrix over the algebra, validated as a self-adjoint idempotent."""

    entries: list[list[AlgebraElement]]

    def __post_init__(self):
        N = len(self.entries)
        for row in self.entries:
            if len(row) != N:
                raise ValidationError("projection matrix must be square")
        self.N = N
        self.n = self.entries[0][0].n
        if self._defect() >= 1e-8:
            raise ValidationError("matrix is not a projection within 1e-8")

    def _defect(self) -> float:
        worst = 0.0
        for i in range(self.N):
            for j in range(self.N):
                acc = AlgebraElement(self.n)
                for l in range(self.N):
                    acc = acc + self.entries[i][l] * self.entries[l][j]
                diff = acc - self.entries[i][j]
                for m in diff.monomials:
                    worst = max(worst, abs(m.coeff))
                star = self.entries[j][i].adjoint() - self.entries[i][j]
                for m in star.monomials:
                    worst = max(worst, abs(m.coeff))
        return worst


def pair_with_projection(p: ProjectionMatrix, max_k: int | None = None) -> complex:
    """Index pairing of the cocycle with a projection:

    <Psi, p> = (Psi_0 # Tr)(p)
               + sum_{k>=1} (-1)^k (2k)!/k! (Psi_2k # Tr)(p - 1/2, p, ..., p),

    expanding the matrix trace over index cycles.
    """
    n = p.n
    if max_k is None:
        max_k = n
    half = AlgebraElement.from_monomial(
        Monomial(0.5, np.zeros(n), np.eye(n, dtype=complex))
    )
    total = 0j
    for i in range(p.N):
        total += psi(0, [p.entries[i][i]])
    for k in range(1, max_k + 1):
        pref = (-1) ** k * math.factorial(2 * k) / math.factorial(k)
        acc = 0j
        for cycle in _index_cycles(p.N, 2 * k + 1):
            args = []
            for pos in range(2 * k + 1):
                entry = p.entries[cycle[pos]][cycle[(pos + 1) % (2 * k + 1)]]
                if pos == 0:
                    entry = entry - half if cycle[0] == cycle[1] else entry
                args.append(entry)
            acc += psi(k, args)
        total += pref * acc
    return total


def _index_cycles(N: int, length: int):
    idx = [0] * length
    while True:
        yield tuple(idx)
        pos = length - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < N:
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            return


def torus_psi(k: int, args, tol: float = VANISH_TOL) -> complex:
    """Degree-2k cocycle on a lattice-supported subalgebra with no
    rotation part: extract the translation-free component of
    a_0 da_1 ... da_2k, wedge with e^{-omega} and integrate over all of
    C^n."""
    if len(args) != 2 * k + 1:
        raise ValueError(f"torus cocycle of degree {2 * k} needs {2 * k + 1} args")
    forms = [_as_ncform(a) for a in args]
    n = forms[0].n
    eye = np.eye(n)
    for f in forms:
        for _, _, g in f.terms:
            if np.max(np.abs(g - eye)) >= tol:
                raise ValidationError("torus cocycle requires trivial rotations")
    if k > n:
        return 0j
    prod = forms[0]
    for a in forms[1:]:
        prod = prod * differential(a)
    emo = exp_neg_omega(n)
    total = 0j
    for u, z, _ in prod.terms:
        if float(np.linalg.norm(z)) < tol:
            total += berezin(wedge(u, emo))
    return (1j) ** (-k) / math.factorial(2 * k) * total
