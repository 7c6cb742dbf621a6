"""Truncated multimode oscillator (Fock) oracle.

Everything here is an independent numeric cross-check of the algebraic
formulas: operators become dense matrices on the level-truncated
oscillator basis (tensored with the 2^n spinor space when the Euler
operator is involved), heat traces are evaluated on a small-t grid, and
asymptotic coefficients are extracted by least-squares power fits.

Heat semigroups use the exact spectrum level + degree of the Euler
square, which is diagonal in this basis; truncation only cuts off the
trace sums, with error suppressed by exp(-t * cutoff).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .clifford import _fermion_ops, parity_signs, pullback_operator
from .errors import DimensionMismatchError, SizingError, ValidationError
from .group import AlgebraElement, Monomial

__all__ = [
    "FockSpace",
    "FockOperator",
    "heat_trace",
    "heat_supertrace",
    "commutator_with_euler",
    "dsq_commutator",
    "geometric_grid",
    "fit_asymptotics",
    "FitResult",
    "cocycle_oracle",
    "OracleResult",
    "getzler_vanishing_check",
    "GetzlerReport",
    "residue_from_heat",
    "ResidueResult",
    "mehler_closed_form",
    "mehler_closed_form_multi",
    "oscillator_zeta",
    "spectral_residue_estimate",
]

#: per-mode cutoff limits keeping dense matrices at desk scale
ENVELOPE = {1: 512, 2: 48}

DEFAULT_T_RANGE = (0.05, 0.8)
DEFAULT_T_POINTS = 12


@dataclass(frozen=True)
class FockSpace:
    """n oscillator modes truncated at level `cutoff` per mode."""

    n: int
    cutoff: int

    def __post_init__(self):
        if self.n not in ENVELOPE:
            raise SizingError(f"supported mode counts are {sorted(ENVELOPE)}")
        if not 2 <= self.cutoff <= ENVELOPE[self.n]:
            raise SizingError(
                f"cutoff {self.cutoff} outside envelope "
                f"(2..{ENVELOPE[self.n]} for n={self.n})"
            )

    @property
    def mode_dim(self) -> int:
        return self.cutoff + 1

    @property
    def fock_dim(self) -> int:
        return self.mode_dim**self.n

    @property
    def spinor_dim(self) -> int:
        return 1 << self.n

    @property
    def full_dim(self) -> int:
        return self.spinor_dim * self.fock_dim

    @cached_property
    def lowering(self) -> np.ndarray:
        """Single-mode lowering operator with sqrt(m) entries."""
        return np.diag(np.sqrt(np.arange(1, self.mode_dim)), 1).astype(complex)

    def mode_operator(self, j: int, op: np.ndarray) -> np.ndarray:
        """Embed a single-mode operator into mode j (0-based) of the
        Fock factor."""
        out = np.ones((1, 1), dtype=complex)
        eye = np.eye(self.mode_dim, dtype=complex)
        for i in range(self.n):
            out = np.kron(out, op if i == j else eye)
        return out

    @cached_property
    def levels(self) -> np.ndarray:
        """Total oscillator level of each Fock basis state."""
        lv = np.zeros(1, dtype=float)
        single = np.arange(self.mode_dim, dtype=float)
        for _ in range(self.n):
            lv = (lv[:, None] + single[None, :]).ravel()
        return lv

    @cached_property
    def h_diag(self) -> np.ndarray:
        """Oscillator Hamiltonian spectrum: level + n/2."""
        return self.levels + self.n / 2.0

    @cached_property
    def degree_diag(self) -> np.ndarray:
        """Form degree of each spinor basis state."""
        return np.array([s.bit_count() for s in range(self.spinor_dim)], dtype=float)

    @cached_property
    def dsq_diag(self) -> np.ndarray:
        """Spectrum of the Euler square on spinor (x) Fock: level + degree."""
        return (
            self.degree_diag[:, None] + self.levels[None, :]
        ).ravel()

    @cached_property
    def parity_full(self) -> np.ndarray:
        return np.repeat(parity_signs(self.n), self.fock_dim)

    # -- operators ---------------------------------------------------------

    def displacement(self, z) -> "FockOperator":
        """T_z = exp(i (k.x - a.p)) for z = a - ik, one expm per mode."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z.shape[0] != self.n:
            raise DimensionMismatchError(f"z has {z.shape[0]} modes, space has {self.n}")
        a_op = self.lowering
        x_op = (a_op + a_op.conj().T) / np.sqrt(2)
        p_op = 1j * (a_op.conj().T - a_op) / np.sqrt(2)
        mat = np.ones((1, 1), dtype=complex)
        for j in range(self.n):
            alpha, kappa = z[j].real, -z[j].imag
            gen = kappa * x_op - alpha * p_op
            mat = np.kron(mat, scipy.linalg.expm(1j * gen))
        return FockOperator(self, mat, spinor=False)

    def rotation(self, phis) -> "FockOperator":
        """Metaplectic operator of a diagonal rotation: exp(-i m phi) per
        mode on level m."""
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        if phis.shape[0] != self.n:
            raise DimensionMismatchError("one angle per mode required")
        diag = np.ones(1, dtype=complex)
        m = np.arange(self.mode_dim)
        for j in range(self.n):
            diag = np.kron(diag, np.exp(-1j * m * phis[j]))
        return FockOperator(self, np.diag(diag), spinor=False)

    def euler_operator(self) -> "FockOperator":
        """D = sum_j f_j^+ (x) a_j + f_j (x) a_j^+ on spinor (x) Fock."""
        create, annihilate = _fermion_ops(self.n)
        mat = np.zeros((self.full_dim, self.full_dim), dtype=complex)
        for j in range(self.n):
            aj = self.mode_operator(j, self.lowering)
            mat += np.kron(create[j], aj)
            mat += np.kron(annihilate[j], aj.conj().T)
        return FockOperator(self, mat, spinor=True)

    def monomial_operator(self, m: Monomial, tol: float = 1e-10) -> "FockOperator":
        """coeff T_z R_g with the induced spinor action; g must be diagonal
        (callers pre-rotate general g as the reduction to the diagonal
        case suggests)."""
        if m.n != self.n:
            raise DimensionMismatchError("monomial mode count mismatch")
        off = m.g - np.diag(np.diag(m.g))
        if np.max(np.abs(off)) >= tol:
            raise ValidationError(
                "oracle supports diagonal rotations natively; conjugate z instead"
            )
        phis = np.angle(np.diag(m.g)) % (2 * np.pi)
        boson = (self.displacement(m.z) @ self.rotation(phis)).mat
        spin = pullback_operator(m.g).mat
        return FockOperator(self, m.coeff * np.kron(spin, boson), spinor=True)

    def algebra_operator(self, a) -> "FockOperator":
        """Operator of an algebra element (sum of monomial operators)."""
        if isinstance(a, Monomial):
            a = AlgebraElement.from_monomial(a)
        mat = np.zeros((self.full_dim, self.full_dim), dtype=complex)
        for m in a.monomials:
            mat += self.monomial_operator(m).mat
        return FockOperator(self, mat, spinor=True)

    def heat_vector(self, t: float, spinor: bool) -> np.ndarray:
        if t <= 0:
            raise ValidationError("heat time must be positive")
        return np.exp(-t * (self.dsq_diag if spinor else self.h_diag))


@dataclass(frozen=True)
class FockOperator:
    """Dense matrix on the Fock factor alone or on spinor (x) Fock."""

    space: FockSpace
    mat: np.ndarray
    spinor: bool

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if self.space != other.space or self.spinor != other.spinor:
            raise DimensionMismatchError("operators live on different spaces")
        return FockOperator(self.space, self.mat @ other.mat, self.spinor)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        if self.space != other.space or self.spinor != other.spinor:
            raise DimensionMismatchError("operators live on different spaces")
        return FockOperator(self.space, self.mat + other.mat, self.spinor)

    def __rmul__(self, c: complex) -> "FockOperator":
        return FockOperator(self.space, c * self.mat, self.spinor)

    def unitarity_defect(self) -> float:
        d = self.mat.conj().T @ self.mat - np.eye(self.mat.shape[0])
        return float(np.max(np.abs(d)))


def commutator_with_euler(space: FockSpace, op: FockOperator) -> FockOperator:
    d = space.euler_operator().mat
    return FockOperator(space, d @ op.mat - op.mat @ d, spinor=True)


def dsq_commutator(space: FockSpace, op: FockOperator, times: int = 1) -> FockOperator:
    """Iterated commutator with the (diagonal, exact) Euler square."""
    diag = space.dsq_diag
    mat = op.mat
    for _ in range(times):
        mat = diag[:, None] * mat - mat * diag[None, :]
    return FockOperator(space, mat, spinor=True)


def _product_diag(ops) -> np.ndarray:
    mats = [op.mat for op in ops]
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    return np.diag(prod)


def heat_trace(space: FockSpace, ops, t: float) -> complex:
    """tr(prod(ops) e^{-tH}) (bosonic) or tr(prod e^{-tD^2}) (full)."""
    ops = list(np.atleast_1d(ops))
    diag = _product_diag(ops)
    return complex(diag @ space.heat_vector(t, ops[0].spinor))


def heat_supertrace(space: FockSpace, ops, t: float) -> complex:
    """Supertrace against e^{-tD^2}, grading by spinor parity."""
    ops = list(np.atleast_1d(ops))
    if not ops[0].spinor:
        raise ValidationError("supertrace requires operators on spinor (x) Fock")
    diag = _product_diag(ops)
    return complex((diag * space.parity_full) @ space.heat_vector(t, True))


def _supertrace_samples(space: FockSpace, ops, ts) -> np.ndarray:
    diag = _product_diag(list(ops)) * space.parity_full
    return np.array([diag @ space.heat_vector(t, True) for t in ts])


def _trace_samples(space: FockSpace, ops, ts) -> np.ndarray:
    ops = list(ops)
    diag = _product_diag(ops)
    return np.array([diag @ space.heat_vector(t, ops[0].spinor) for t in ts])


def geometric_grid(
    t_min: float = DEFAULT_T_RANGE[0],
    t_max: float = DEFAULT_T_RANGE[1],
    points: int = DEFAULT_T_POINTS,
) -> np.ndarray:
    return np.geomspace(t_min, t_max, points)


@dataclass(frozen=True)
class FitResult:
    powers: tuple[float, ...]
    coeffs: np.ndarray
    residual: float
    cond: float
    conditioning_warning: bool

    def coeff_of(self, power: float) -> complex:
        for p, c in zip(self.powers, self.coeffs):
            if p == power:
                return complex(c)
        raise KeyError(f"power {power} not in fit")


def fit_asymptotics(ts, values, powers, refine: bool = True) -> FitResult:
    """Least-squares fit of sum_m c_m t^{p_m} through (t, value) samples.

    With `refine`, a second pass redoes the nonpositive powers on the
    small-t half of a geometric grid after subtracting the fitted positive
    powers; model error from omitted higher-order terms lives at large t,
    so this sharpens the singular and constant coefficients.
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=complex)
    powers = sorted(float(p) for p in powers)
    if len(ts) < len(powers) + 2:
        raise ValidationError("need at least len(powers)+2 samples")
    if len(set(ts.tolist())) != len(ts):
        raise ValidationError("t values must be distinct")
    design = np.stack([ts**p for p in powers], axis=1)
    coeffs, _, _, _ = np.linalg.lstsq(design, values, rcond=None)
    cond = float(np.linalg.cond(design))
    if refine:
        low = ts <= np.median(ts)
        high_powers = [p for p in powers if p > 0]
        low_powers = [p for p in powers if p <= 0]
        if low_powers and high_powers and low.sum() >= len(low_powers) + 1:
            fitted_high = sum(
                coeffs[powers.index(p)] * ts[low] ** p for p in high_powers
            )
            design_low = np.stack([ts[low] ** p for p in low_powers], axis=1)
            low_coeffs, _, _, _ = np.linalg.lstsq(
                design_low, values[low] - fitted_high, rcond=None
            )
            for p, c in zip(low_powers, low_coeffs):
                coeffs[powers.index(p)] = c
    residual = float(np.linalg.norm(design @ coeffs - values))
    return FitResult(
        powers=tuple(powers),
        coeffs=coeffs,
        residual=residual,
        cond=cond,
        conditioning_warning=cond > 1e8,
    )


@dataclass(frozen=True)
class OracleResult:
    value: complex
    ts: np.ndarray
    samples: np.ndarray
    fit: FitResult
    probe_deviation: float | None


def _operator_chain(space: FockSpace, k: int, elements) -> list[FockOperator]:
    if len(elements) != 2 * k + 1:
        raise ValidationError(f"degree-2k oracle needs {2 * k + 1} elements")
    ops = [space.algebra_operator(elements[0])]
    for a in elements[1:]:
        ops.append(commutator_with_euler(space, space.algebra_operator(a)))
    return ops


def cocycle_oracle(
    space: FockSpace,
    k: int,
    elements,
    t_grid=None,
    powers=None,
    check_cutoff: bool | None = None,
) -> OracleResult:
    """Cocycle component via heat asymptotics:

    1/(2k)! times the t^{-k} coefficient of
    tr_s(a_0 [D,a_1] ... [D,a_2k] e^{-tD^2}).
    """
    if not 0 <= k <= space.n:
        raise ValidationError(f"k={k} out of range for n={space.n}")
    ts = geometric_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if powers is None:
        # through t^4: the omitted-order model error at the default grid
        # otherwise dominates the constant-term extraction
        powers = list(range(-space.n, 5))

    def run(sp: FockSpace):
        ops = _operator_chain(sp, k, elements)
        samples = _supertrace_samples(sp, ops, ts)
        fit = fit_asymptotics(ts, samples, powers)
        return fit.coeff_of(-k) / math.factorial(2 * k), samples, fit

    value, samples, fit = run(space)

    if check_cutoff is None:
        check_cutoff = space.n == 1
    probe_dev = None
    probe_cutoff = 2 * space.cutoff
    if check_cutoff and probe_cutoff <= ENVELOPE[space.n]:
        big_value, _, _ = run(FockSpace(space.n, probe_cutoff))
        probe_dev = abs(big_value - value) / max(abs(big_value), abs(value), 1e-3)
        if probe_dev > 1e-3:
            raise SizingError(
                f"cutoff {space.cutoff} too small: probe deviation {probe_dev:.2e}"
            )
    return OracleResult(value, ts, samples, fit, probe_dev)


@dataclass(frozen=True)
class GetzlerReport:
    fitted_exponent: float
    exact_zero: bool
    ts: np.ndarray
    samples: np.ndarray


def getzler_vanishing_check(
    space: FockSpace, k: int, alpha, elements, t_grid=None
) -> GetzlerReport:
    """Decay-rate probe of t^{k+|alpha|} tr_s(a_0 [D,a_1]^{[a1]} ... e^{-tD^2}).

    The fitted log-log slope should stay above |alpha|/2 (up to fitting
    slack) whenever alpha != 0.
    """
    alpha = [int(x) for x in np.atleast_1d(alpha)]
    if len(alpha) != 2 * k:
        raise ValidationError("need one commutator order per argument slot")
    ts = (
        np.geomspace(0.06, 0.5, 10) if t_grid is None else np.asarray(t_grid, float)
    )
    ops = [space.algebra_operator(elements[0])]
    for a, aj in zip(elements[1:], alpha):
        base = commutator_with_euler(space, space.algebra_operator(a))
        ops.append(dsq_commutator(space, base, aj) if aj else base)
    raw = _supertrace_samples(space, ops, ts)
    total = k + sum(alpha)
    f = ts**total * raw
    scale = float(np.max(np.abs(raw))) if np.max(np.abs(raw)) > 0 else 1.0
    if np.all(np.abs(f) < 1e-13 * max(scale, 1.0)):
        return GetzlerReport(math.inf, True, ts, f)
    slope = np.polyfit(np.log(ts), np.log(np.abs(f)), 1)[0]
    return GetzlerReport(float(slope), False, ts, f)


@dataclass(frozen=True)
class ResidueResult:
    residue: complex
    fit: FitResult
    kernel_projected: bool


def residue_from_heat(
    space: FockSpace,
    op: FockOperator,
    m: float,
    t_grid=None,
    powers=None,
) -> ResidueResult:
    """Residue extraction through the Mellin relation:

    Res_{z=0} tr(B |D|^{-2(m+z)}) = a_{-m} / Gamma(m) for m > 0, where
    a_* are the small-t heat coefficients; for m = 0 the zeta-side value
    is the constant heat coefficient with the kernel projected out.
    """
    if m < 0:
        raise ValidationError("m must be nonnegative")
    ts = geometric_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if powers is None:
        powers = sorted({-float(space.n), float(-m), 0.0, 1.0, 2.0, 3.0})
    samples = _trace_samples(space, [op], ts)
    kernel_projected = False
    if m == 0 and op.spinor:
        # one zero mode: spinor vacuum (x) Fock vacuum sits at index 0
        samples = samples - op.mat[0, 0]
        kernel_projected = True
    fit = fit_asymptotics(ts, samples, powers)
    if m == 0:
        return ResidueResult(fit.coeff_of(0.0), fit, kernel_projected)
    return ResidueResult(
        fit.coeff_of(-float(m)) / math.gamma(m), fit, kernel_projected
    )


# -- closed forms and spectral probes ---------------------------------------


def mehler_closed_form(z: complex, phi: float, t: float) -> complex:
    """Closed form of tr(T_z R_phi e^{-tH}) for one mode.

    Equals e^{i phi/2} exp(-(|z|^2/4) coth(w/2)) / (2 sinh(w/2)) at
    w = t + i phi, the analytic continuation of the phi = 0 Mehler trace
    with the branch sqrt(cosh w - 1) = sqrt(2) sinh(w/2).
    """
    w = t + 1j * phi
    half = w / 2.0
    return cmath.exp(0.5j * phi) * cmath.exp(
        -abs(z) ** 2 / 4.0 / cmath.tanh(half)
    ) / (2.0 * cmath.sinh(half))


def mehler_closed_form_multi(zs, phis, t: float) -> complex:
    """Product of one-mode closed forms for diagonal rotations."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    out = 1.0 + 0j
    for z, phi in zip(zs, phis):
        out *= mehler_closed_form(complex(z), float(phi), t)
    return out


def oscillator_zeta(s: complex, terms: int = 200_000) -> complex:
    """sum_{m>=0} (m + 1/2)^{-s} by direct summation with an
    Euler-Maclaurin tail, valid for Re s > 1."""
    m = np.arange(terms)
    head = np.sum((m + 0.5) ** (-s))
    edge = terms + 0.5
    tail = edge ** (1 - s) / (s - 1) + 0.5 * edge ** (-s) + s / 12.0 * edge ** (-s - 1)
    return complex(head + tail)


def spectral_residue_estimate(z_points=(0.4, 0.2, 0.1)) -> float:
    """Residue of tr(H^{-(1+z)}) at z=0 for one mode, extrapolating
    z * zeta(1+z) quadratically to z = 0 from the convergence region."""
    zs = np.asarray(z_points, dtype=float)
    vals = np.array([z * oscillator_zeta(1.0 + z).real for z in zs])
    poly = np.polyfit(zs, vals, 2)
    return float(np.polyval(poly, 0.0))
