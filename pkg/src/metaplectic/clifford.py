"""Real Clifford algebra Cl(2n) and its spinor representation on Lambda(C^n).

Generators e_1, ..., e_{2n} satisfy e_j^2 = 1 and anticommute; the mode-j
pair is e_{2j-1} = i*u_j, e_{2j} = u_j with u_j the j-th standard basis
vector of C^n.  The spinor space Lambda(C^n) is spanned by subsets of
{1..n} in bitmask order, and c(z) = conj(z) (exterior) + z (contraction)
with the usual fermionic signs.

The symbol map sends e_{2j-1} -> dx_j and e_{2j} -> dp_j, so a canonically
ordered blade maps to the Grassmann monomial with the same bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, ValidationError
from .multivector import GrassmannElement, _pruned, reorder_sign

__all__ = [
    "CliffordElement",
    "SpinorOperator",
    "c_vector",
    "c_clifford",
    "supertrace",
    "symbol",
    "fermion_number",
    "fermion_heat",
    "pullback_operator",
    "multiplicative_extension",
]


@dataclass(frozen=True)
class CliffordElement:
    """Sparse Cl(2n) element: bitmask over e_1..e_{2n} -> coefficient."""

    n: int
    terms: dict[int, complex] = field(default_factory=dict)

    @staticmethod
    def zero(n: int) -> "CliffordElement":
        return CliffordElement(n, {})

    @staticmethod
    def scalar(n: int, c: complex) -> "CliffordElement":
        return CliffordElement(n, _pruned({0: complex(c)}))

    @staticmethod
    def generator(n: int, j: int) -> "CliffordElement":
        """e_j, 1-based j <= 2n."""
        if not 1 <= j <= 2 * n:
            raise ValueError(f"generator index {j} out of range for n={n}")
        return CliffordElement(n, {1 << (j - 1): 1.0 + 0j})

    def coeff(self, mask: int) -> complex:
        return self.terms.get(mask, 0j)

    def _check(self, other: "CliffordElement") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(
                f"mode counts differ: {self.n} vs {other.n}"
            )

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) + c
        return CliffordElement(self.n, _pruned(out))

    def __rmul__(self, c: complex) -> "CliffordElement":
        return CliffordElement(
            self.n, _pruned({m: c * v for m, v in self.terms.items()})
        )

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            return CliffordElement(
                self.n, _pruned({m: v * other for m, v in self.terms.items()})
            )
        self._check(other)
        # blade product in Euclidean signature: repeated generators square
        # to +1, so the result mask is the XOR and the sign is the
        # transposition count of the merge.
        out: dict[int, complex] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = ma ^ mb
                out[m] = out.get(m, 0j) + reorder_sign(ma, mb) * ca * cb
        return CliffordElement(self.n, _pruned(out))


def symbol(a: CliffordElement) -> GrassmannElement:
    """Symbol map Cl(2n) -> Lambda(R^{2n}).

    Canonically ordered blades map to the wedge of generator symbols,
    which is the Grassmann monomial with the same bitmask.
    """
    return GrassmannElement(a.n, dict(a.terms))


# -- spinor representation -------------------------------------------------


@lru_cache(maxsize=None)
def _fermion_ops(n: int) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
    """Creation/annihilation matrices on the subset basis of Lambda(C^n)."""
    dim = 1 << n
    create = []
    annihilate = []
    for j in range(n):
        cr = np.zeros((dim, dim), dtype=complex)
        an = np.zeros((dim, dim), dtype=complex)
        bit = 1 << j
        below = bit - 1
        for s in range(dim):
            sign = -1.0 if (s & below).bit_count() & 1 else 1.0
            if not s & bit:
                cr[s | bit, s] = sign
            else:
                an[s ^ bit, s] = sign
        create.append(cr)
        annihilate.append(an)
    return tuple(create), tuple(annihilate)


@dataclass(frozen=True)
class SpinorOperator:
    """Dense 2^n x 2^n operator on Lambda(C^n) in the subset basis."""

    n: int
    mat: np.ndarray

    @staticmethod
    def identity(n: int) -> "SpinorOperator":
        return SpinorOperator(n, np.eye(1 << n, dtype=complex))

    def _check(self, other: "SpinorOperator") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(
                f"mode counts differ: {self.n} vs {other.n}"
            )

    def __matmul__(self, other: "SpinorOperator") -> "SpinorOperator":
        self._check(other)
        return SpinorOperator(self.n, self.mat @ other.mat)

    def __add__(self, other: "SpinorOperator") -> "SpinorOperator":
        self._check(other)
        return SpinorOperator(self.n, self.mat + other.mat)

    def __rmul__(self, c: complex) -> "SpinorOperator":
        return SpinorOperator(self.n, c * self.mat)


def c_vector(z) -> SpinorOperator:
    """Clifford multiplication c(z) = sum_j conj(z_j) f_j^+ + z_j f_j."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = z.shape[0]
    create, annihilate = _fermion_ops(n)
    mat = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(n):
        mat += np.conj(z[j]) * create[j] + z[j] * annihilate[j]
    return SpinorOperator(n, mat)


@lru_cache(maxsize=None)
def _generator_matrices(n: int) -> tuple[np.ndarray, ...]:
    mats = []
    for j in range(1, 2 * n + 1):
        vec = np.zeros(n, dtype=complex)
        vec[(j - 1) // 2] = 1j if j % 2 == 1 else 1.0
        mats.append(c_vector(vec).mat)
    return tuple(mats)


def c_clifford(a: CliffordElement) -> SpinorOperator:
    """Algebra homomorphism c: Cl(2n) -> End(Lambda(C^n))."""
    gens = _generator_matrices(a.n)
    dim = 1 << a.n
    out = np.zeros((dim, dim), dtype=complex)
    for mask, coeff in a.terms.items():
        blade = np.eye(dim, dtype=complex)
        for b in range(2 * a.n):
            if mask >> b & 1:
                blade = blade @ gens[b]
        out += coeff * blade
    return SpinorOperator(a.n, out)


def parity_signs(n: int) -> np.ndarray:
    """(-1)^{|S|} over the subset basis."""
    return np.array([-1.0 if s.bit_count() & 1 else 1.0 for s in range(1 << n)])


def supertrace(a: SpinorOperator) -> complex:
    """Trace weighted by (-1)^{form degree}."""
    return complex(np.sum(parity_signs(a.n) * np.diag(a.mat)))


def fermion_number(n: int) -> SpinorOperator:
    """Degree operator shifted by n/2: diagonal |S| - n/2."""
    diag = np.array([s.bit_count() - n / 2 for s in range(1 << n)])
    return SpinorOperator(n, np.diag(diag.astype(complex)))


def fermion_heat(n: int, t: float) -> SpinorOperator:
    """exp(-t * fermion_number(n)), diagonal."""
    diag = np.array([np.exp(-t * (s.bit_count() - n / 2)) for s in range(1 << n)])
    return SpinorOperator(n, np.diag(diag.astype(complex)))


def multiplicative_extension(a: np.ndarray) -> np.ndarray:
    """Extension of a linear map on generators to Lambda(C^n).

    Entry [S, T] is the minor det a[S, T]; empty sets give 1.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    subsets_by_size: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    for size in range(n + 1):
        entries = []
        for combo in combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            entries.append((mask, combo))
        subsets_by_size[size] = entries
    for size, entries in subsets_by_size.items():
        for s_mask, s_idx in entries:
            for t_mask, t_idx in entries:
                if size == 0:
                    out[s_mask, t_mask] = 1.0
                else:
                    out[s_mask, t_mask] = np.linalg.det(
                        a[np.ix_(s_idx, t_idx)]
                    )
    return out


def _check_unitary(g: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    n = g.shape[0]
    if g.shape != (n, n):
        raise DimensionMismatchError(f"matrix shape {g.shape} is not square")
    if np.max(np.abs(g.conj().T @ g - np.eye(n))) >= tol:
        raise ValidationError("matrix is not unitary within tolerance")
    return g


def pullback_operator(g, tol: float = 1e-9) -> SpinorOperator:
    """Matrix of the induced action of g^{-1} pullback on Lambda(C^n).

    Computed by unitary diagonalization g = h g0 h^{-1}: the diagonal part
    is the product over nontrivial eigenvalue angles of

        (cos(phi/2) + sin(phi/2) c(e_{2j-1} e_{2j})) exp(-i phi/2),

    which per mode is diag(1, exp(-i phi)); the change of basis on
    Lambda(C^n) is the multiplicative extension of conj(h).  Angles are
    taken in (0, 2pi) and |lambda - 1| < tol classifies an eigenvalue as 1.
    """
    g = _check_unitary(g)
    n = g.shape[0]
    eigvals, h = _unitary_eig(g)
    dim = 1 << n
    diag_op = np.eye(dim, dtype=complex)
    gens = _generator_matrices(n)
    for j in range(n):
        lam = eigvals[j]
        if abs(lam - 1.0) < tol:
            continue
        phi = np.angle(lam) % (2 * np.pi)
        pair = gens[2 * j] @ gens[2 * j + 1]
        factor = (
            np.cos(phi / 2) * np.eye(dim) + np.sin(phi / 2) * pair
        ) * np.exp(-1j * phi / 2)
        diag_op = diag_op @ factor
    basis_change = multiplicative_extension(np.conj(h))
    return SpinorOperator(n, basis_change @ diag_op @ basis_change.conj().T)


def _unitary_eig(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and an orthonormal eigenbasis of a unitary matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors are orthonormal eigenvectors.
    """
    t, q = scipy.linalg.schur(g, output="complex")
    return np.diag(t).copy(), q
