"""Complex exterior algebra over R^{2n} with subspace restriction and the
Berezin integral.

The 2n real generators are ordered dx_1, dp_1, dx_2, dp_2, ... and a basis
monomial is a subset of generators encoded as a bitmask (bit 2j for dx_{j+1},
bit 2j+1 for dp_{j+1}).  Elements are sparse bitmask -> complex maps.

The Berezin integral returns the coefficient of the volume form
dp_1 ^ dx_1 ^ ... ^ dp_k ^ dx_k, i.e. p-before-x within each pair; the sign
relative to the stored dx-before-p order is handled here, never by callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, ValidationError

__all__ = [
    "GrassmannElement",
    "wedge",
    "sigma_one_form",
    "exp_neg_omega",
    "restrict",
    "berezin",
    "substitute_generators",
]

#: coefficients below this magnitude are dropped after every operation
PRUNE_THRESHOLD = 1e-14


def reorder_sign(a: int, b: int) -> int:
    """Sign of merging two ascending generator lists given as bitmasks.

    Counts pairs (i in a, j in b) with i > j; each such pair is one
    transposition when the concatenation a+b is sorted.
    """
    s = 0
    a >>= 1
    while a:
        s += (a & b).bit_count()
        a >>= 1
    return -1 if s & 1 else 1


def _pruned(terms: dict[int, complex]) -> dict[int, complex]:
    return {m: c for m, c in terms.items() if abs(c) > PRUNE_THRESHOLD}


@dataclass(frozen=True)
class GrassmannElement:
    """Element of Lambda(R^{2n}) with complex coefficients.

    Treated as immutable; all arithmetic returns new elements.
    """

    n: int
    terms: dict[int, complex] = field(default_factory=dict)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "GrassmannElement":
        return GrassmannElement(n, {})

    @staticmethod
    def scalar(n: int, c: complex) -> "GrassmannElement":
        return GrassmannElement(n, _pruned({0: complex(c)}))

    @staticmethod
    def one(n: int) -> "GrassmannElement":
        return GrassmannElement.scalar(n, 1.0)

    @staticmethod
    def dx(n: int, j: int) -> "GrassmannElement":
        """Generator dx_j, 1-based j <= n."""
        if not 1 <= j <= n:
            raise ValueError(f"dx index {j} out of range for n={n}")
        return GrassmannElement(n, {1 << (2 * (j - 1)): 1.0 + 0j})

    @staticmethod
    def dp(n: int, j: int) -> "GrassmannElement":
        """Generator dp_j, 1-based j <= n."""
        if not 1 <= j <= n:
            raise ValueError(f"dp index {j} out of range for n={n}")
        return GrassmannElement(n, {1 << (2 * (j - 1) + 1): 1.0 + 0j})

    # -- queries -----------------------------------------------------------

    def coeff(self, mask: int) -> complex:
        return self.terms.get(mask, 0j)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {m.bit_count() for m in self.terms}

    def degree_part(self, d: int) -> "GrassmannElement":
        return GrassmannElement(
            self.n, {m: c for m, c in self.terms.items() if m.bit_count() == d}
        )

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "GrassmannElement") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(
                f"mode counts differ: {self.n} vs {other.n}"
            )

    def __add__(self, other: "GrassmannElement") -> "GrassmannElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) + c
        return GrassmannElement(self.n, _pruned(out))

    def __sub__(self, other: "GrassmannElement") -> "GrassmannElement":
        return self + (-1.0) * other

    def __neg__(self) -> "GrassmannElement":
        return (-1.0) * self

    def __rmul__(self, c: complex) -> "GrassmannElement":
        return GrassmannElement(
            self.n, _pruned({m: c * v for m, v in self.terms.items()})
        )

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return wedge(self, other)
        return GrassmannElement(
            self.n, _pruned({m: v * other for m, v in self.terms.items()})
        )

    def __xor__(self, other: "GrassmannElement") -> "GrassmannElement":
        return wedge(self, other)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if not self.terms:
            return "0"
        names = []
        for m in sorted(self.terms):
            gens = []
            for b in range(2 * self.n):
                if m >> b & 1:
                    j = b // 2 + 1
                    gens.append(f"d{'x' if b % 2 == 0 else 'p'}{j}")
            mono = "^".join(gens) if gens else "1"
            names.append(f"({self.terms[m]:.6g})*{mono}")
        return " + ".join(names)


def wedge(u: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    """Exterior product; sign from the generator transposition count."""
    u._check(v)
    out: dict[int, complex] = {}
    for ma, ca in u.terms.items():
        for mb, cb in v.terms.items():
            if ma & mb:
                continue
            m = ma | mb
            out[m] = out.get(m, 0j) + reorder_sign(ma, mb) * ca * cb
    return GrassmannElement(u.n, _pruned(out))


def sigma_one_form(z) -> GrassmannElement:
    """Symbol one-form of a phase-space translation parameter z = a - ik.

    Returns sum_j (Im z_j * dx_j + Re z_j * dp_j), so that z = a - ik maps
    to -k dx + a dp.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.shape[0]
    terms: dict[int, complex] = {}
    for j in range(n):
        if z[j].imag != 0.0:
            terms[1 << (2 * j)] = complex(z[j].imag)
        if z[j].real != 0.0:
            terms[1 << (2 * j + 1)] = complex(z[j].real)
    return GrassmannElement(n, _pruned(terms))


def symplectic_form(n: int) -> GrassmannElement:
    """omega = sum_j dx_j ^ dp_j."""
    return GrassmannElement(
        n, {0b11 << (2 * j): 1.0 + 0j for j in range(n)}
    )


def exp_neg_omega(n: int) -> GrassmannElement:
    """exp(-omega) as the finite product prod_j (1 - dx_j ^ dp_j).

    Equals the terminating series sum_{k<=n} (-omega)^k / k!; the product
    form keeps every coefficient exactly +-1.
    """
    out = GrassmannElement.one(n)
    for j in range(n):
        factor = GrassmannElement(
            n, {0: 1.0 + 0j, 0b11 << (2 * j): -1.0 + 0j}
        )
        out = wedge(out, factor)
    return out


def substitute_generators(
    u: GrassmannElement, images: list[GrassmannElement], n_out: int
) -> GrassmannElement:
    """Extend a linear map on generators multiplicatively to all of Lambda.

    ``images[b]`` is the image (degree <= 1) of the generator with bit
    index b; terms are expanded in ascending generator order.
    """
    if len(images) != 2 * u.n:
        raise ValueError("need one image per generator")
    out = GrassmannElement.zero(n_out)
    for mask, c in u.terms.items():
        term = GrassmannElement.scalar(n_out, c)
        b = 0
        m = mask
        while m:
            if m & 1:
                term = wedge(term, images[b])
                if term.is_zero():
                    break
            m >>= 1
            b += 1
        out = out + term
    return out


def restrict(u: GrassmannElement, basis) -> GrassmannElement:
    """Pull back along the inclusion of a complex subspace L of C^n.

    ``basis`` holds orthonormal rows b_1, ..., b_k spanning L.  Writing
    z = sum_l zeta_l b_l with zeta_l = p'_l + i x'_l, the covectors
    transform as

        dx_j -> sum_l  Re(b_lj) dx'_l + Im(b_lj) dp'_l
        dp_j -> sum_l -Im(b_lj) dx'_l + Re(b_lj) dp'_l

    and components orthogonal to L drop out.  Returns an element over
    R^{2k}.
    """
    basis = np.asarray(basis, dtype=complex)
    if basis.size == 0:
        basis = basis.reshape(0, u.n)
    if basis.ndim != 2 or basis.shape[1] != u.n:
        raise DimensionMismatchError(
            f"basis shape {basis.shape} does not match n={u.n}"
        )
    k = basis.shape[0]
    gram = basis @ basis.conj().T
    if not np.allclose(gram, np.eye(k), atol=1e-8):
        raise ValidationError("subspace basis is not orthonormal")

    images: list[GrassmannElement] = []
    for j in range(u.n):
        col = basis[:, j]
        dx_img: dict[int, complex] = {}
        dp_img: dict[int, complex] = {}
        for l in range(k):
            re, im = col[l].real, col[l].imag
            if re:
                dx_img[1 << (2 * l)] = dx_img.get(1 << (2 * l), 0j) + re
                dp_img[1 << (2 * l + 1)] = dp_img.get(1 << (2 * l + 1), 0j) + re
            if im:
                dx_img[1 << (2 * l + 1)] = dx_img.get(1 << (2 * l + 1), 0j) + im
                dp_img[1 << (2 * l)] = dp_img.get(1 << (2 * l), 0j) - im
        images.append(GrassmannElement(k, _pruned(dx_img)))
        images.append(GrassmannElement(k, _pruned(dp_img)))
    return substitute_generators(u, images, k)


def berezin(u: GrassmannElement) -> complex:
    """Coefficient of dp_1 ^ dx_1 ^ ... ^ dp_k ^ dx_k (k = u.n).

    Lower-degree parts contribute nothing; for k = 0 this is the scalar
    part.  The stored order is dx-before-p, hence the (-1)^k conversion.
    """
    if u.n == 0:
        return u.coeff(0)
    full = (1 << (2 * u.n)) - 1
    sign = -1 if u.n & 1 else 1
    return sign * u.coeff(full)
