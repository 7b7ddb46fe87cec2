"""Spin elements over superspace: formal products of exponentials of extended
superbivectors, their induced superrotations, the compact/symmetric/nilpotent
generator split, the Stirling-number oscillator exponentials, kernel signs of
the double cover, and the fractional Fourier correspondence.

Spin elements stay formal (factor lists); everything quantitative routes
through the matrix representation or through degree-capped Clifford series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import schur

from .clifford import (
    DEFAULT_CAP,
    CliffordElement,
    ExtendedSuperbivector,
    bivector_to_matrix,
    clifford_exp,
    matrix_to_bivector,
)
from .exceptions import CapExceededError, MembershipError, ShapeMismatchError
from .grassmann import DEFAULT_TOL, GrassmannNumber
from .orthosymplectic import (
    check_so0,
    decompose_rotation,
    to_unitary,
)
from .supermatrix import Supermatrix, expm


class SpinElement:
    """Formal product exp(B_1)...exp(B_k); the empty product is the identity."""

    __slots__ = ("m", "n", "order", "factors")

    def __init__(self, m: int, n: int, order: int,
                 factors: Sequence[ExtendedSuperbivector] = ()):
        for f in factors:
            if (f.m, f.n, f.order) != (m, n, order):
                raise ShapeMismatchError("factor signature mismatch")
        self.m = m
        self.n = n
        self.order = order
        self.factors = tuple(factors)

    @classmethod
    def identity(cls, m: int, n: int, order: int) -> "SpinElement":
        return cls(m, n, order)

    def __mul__(self, other: "SpinElement") -> "SpinElement":
        if (self.m, self.n, self.order) != (other.m, other.n, other.order):
            raise ShapeMismatchError("cannot concatenate spin elements")
        return SpinElement(self.m, self.n, self.order,
                           self.factors + other.factors)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "N": self.order,
            "factors": [f.to_dict() for f in self.factors],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SpinElement":
        factors = [ExtendedSuperbivector.from_dict(f)
                   for f in data.get("factors", [])]
        return cls(int(data["m"]), int(data["n"]), int(data["N"]), factors)

    def __repr__(self):
        return (f"SpinElement(m={self.m}, n={self.n}, N={self.order}, "
                f"factors={len(self.factors)})")


def action_matrix(s: SpinElement, tol: float = 1e-8) -> Supermatrix:
    """Superrotation induced by a spin element: the product of the factor
    exponentials in the matrix representation (checked to land in the group)."""
    result = Supermatrix.eye(s.m, 2 * s.n, s.order)
    for factor in s.factors:
        result = result @ expm(bivector_to_matrix(factor))
    if not check_so0(result, tol).ok:
        raise MembershipError("spin action left the superrotation group")
    return result


# -- compact / symmetric / nilpotent split -------------------------------------


@dataclass(frozen=True)
class BivectorSplit:
    """Direct-sum split of an extended superbivector.

    compact: generators of the compact subgroup (bosonic rotations plus the
    antisymmetric fermionic combinations); symmetric: the symmetric fermionic
    combinations driving the polar stretch; nilpotent: everything with
    nilpotent or odd coefficients.
    """

    compact: ExtendedSuperbivector
    symmetric: ExtendedSuperbivector
    nilpotent: ExtendedSuperbivector

    def total(self) -> ExtendedSuperbivector:
        return self.compact + self.symmetric + self.nilpotent


def split_bivector(biv: ExtendedSuperbivector) -> BivectorSplit:
    """Exact three-way split; the pieces sum back to the input."""
    m, n, order = biv.m, biv.n, biv.order

    def scal(value: complex) -> GrassmannNumber:
        return GrassmannNumber.scalar(order, value)

    b1: dict[tuple[int, int], GrassmannNumber] = {}
    b3: dict[tuple[int, int], GrassmannNumber] = {}
    for key, g in biv.b.items():
        if g.body != 0:
            b1[key] = scal(g.body)
        nil = g.nilpotent()
        if nil.terms:
            b3[key] = nil
    bq3 = dict(biv.bq)
    bb1: dict[tuple[int, int], GrassmannNumber] = {}
    bb2: dict[tuple[int, int], GrassmannNumber] = {}
    bb3: dict[tuple[int, int], GrassmannNumber] = {}
    for key, g in biv.bb.items():
        nil = g.nilpotent()
        if nil.terms:
            bb3[key] = nil

    def body_of(u: int, v: int) -> complex:
        g = biv.bb.get((u, v))
        return g.body if g is not None else 0.0

    def put(target, key, value):
        if value != 0:
            target[key] = target.get(key, scal(0.0)) + scal(value)

    for plane_j in range(1, n + 1):
        for plane_k in range(plane_j, n + 1):
            uo, ue = 2 * plane_j - 1, 2 * plane_j
            vo, ve = 2 * plane_k - 1, 2 * plane_k
            beta_oo = body_of(uo, vo)
            beta_ee = body_of(ue, ve)
            half_sum = 0.5 * (beta_oo + beta_ee)
            half_diff = 0.5 * (beta_oo - beta_ee)
            put(bb1, (uo, vo), half_sum)
            put(bb1, (ue, ve), half_sum)
            put(bb2, (uo, vo), half_diff)
            put(bb2, (ue, ve), -half_diff)
            if plane_j == plane_k:
                # the in-plane mixed term is itself a symmetric generator
                put(bb2, (uo, ue), body_of(uo, ue))
            else:
                beta_oe = body_of(uo, ve)
                beta_eo = body_of(ue, vo)
                anti = 0.5 * (beta_oe - beta_eo)
                sym = 0.5 * (beta_oe + beta_eo)
                put(bb1, (uo, ve), anti)
                put(bb1, (ue, vo), -anti)
                put(bb2, (uo, ve), sym)
                put(bb2, (ue, vo), sym)
    empty: dict = {}
    return BivectorSplit(
        ExtendedSuperbivector(m, n, order, b1, empty, bb1),
        ExtendedSuperbivector(m, n, order, empty, empty, bb2),
        ExtendedSuperbivector(m, n, order, b3, bq3, bb3),
    )


def lift_rotation(mat: Supermatrix, tol: float = DEFAULT_TOL) -> SpinElement:
    """Three-factor spin element covering the given superrotation."""
    dec = decompose_rotation(mat, tol)
    factors = [
        matrix_to_bivector(dec.compact, tol),
        matrix_to_bivector(dec.symmetric, tol),
        matrix_to_bivector(dec.nilpotent, tol),
    ]
    return SpinElement(mat.p, mat.q // 2, mat.order, factors)


# -- oscillator exponentials ------------------------------------------------------


def stirling2(k: int, j: int) -> int:
    """Stirling number of the second kind."""
    if j < 0 or j > k:
        return 0
    if k == 0:
        return 1 if j == 0 else 0
    table = [[0] * (k + 1) for _ in range(k + 1)]
    table[0][0] = 1
    for kk in range(1, k + 1):
        for jj in range(1, kk + 1):
            table[kk][jj] = table[kk - 1][jj - 1] + jj * table[kk - 1][jj]
    return table[k][j]


def ladder_pair(m: int, n: int, order: int, plane: int,
                cap: int = DEFAULT_CAP) -> tuple[CliffordElement, CliffordElement]:
    """The plane's ladder combinations a = e'_{2p-1} - i e'_{2p} and
    b = e'_{2p-1} + i e'_{2p}, whose commutator [a, b] = 2i is central."""
    if not 1 <= plane <= n:
        raise ShapeMismatchError(f"plane {plane} out of range 1..{n}")
    odd1 = CliffordElement.basis_eprime(m, n, order, 2 * plane - 1, cap)
    odd2 = CliffordElement.basis_eprime(m, n, order, 2 * plane, cap)
    return odd1 - odd2 * 1j, odd1 + odd2 * 1j


def oscillator_power(k: int, plane: int, m: int, n: int, order: int,
                     cap: int = DEFAULT_CAP) -> CliffordElement:
    """(ab)^k in normal order via Stirling numbers of the second kind:
    (ab)^k = sum_j (-2i)^{k-j} S(k,j) a^j b^j."""
    if k < 1:
        raise ShapeMismatchError("power must be at least 1")
    if 2 * k > cap:
        raise CapExceededError(f"(ab)^{k} has degree {2 * k} > cap {cap}")
    a, b = ladder_pair(m, n, order, plane, cap)
    a_pow = {1: a}
    b_pow = {1: b}
    for j in range(2, k + 1):
        a_pow[j] = a_pow[j - 1].multiply(a, strict=True)
        b_pow[j] = b_pow[j - 1].multiply(b, strict=True)
    total = CliffordElement.zero(m, n, order, cap)
    minus_two_i = complex(0.0, -2.0)
    for j in range(1, k + 1):
        coeff = (minus_two_i ** (k - j)) * stirling2(k, j)
        total = total + a_pow[j].multiply(b_pow[j], strict=True) * coeff
    return total


@dataclass(frozen=True)
class OscillatorExpansion:
    """Normal-ordered oscillator exponential with its truncation certificate."""

    element: CliffordElement
    truncation_bound: float


def oscillator_exp(theta: float, plane: int, m: int, n: int, order: int,
                   cap: int = DEFAULT_CAP) -> OscillatorExpansion:
    """exp(theta (e'_{2p-1}^2 + e'_{2p}^2)) in normal order.

    Equal to e^{-i theta} (1 + sum_{j>=1} (-2i)^{-j} (e^{-2i theta}-1)^j / j!
    a^j b^j).  At integer multiples of pi the series telescopes to (+-1)
    exactly with zero truncation error; otherwise it is truncated at the cap
    with a reported coefficient-tail bound.
    """
    ratio = theta / math.pi
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-12:
        value = -1.0 if nearest % 2 else 1.0
        return OscillatorExpansion(
            CliffordElement.scalar(m, n, order, value, cap), 0.0
        )
    phase = cmath.exp(-2j * theta) - 1.0
    prefactor = cmath.exp(-1j * theta)
    jmax = cap // 2
    total = CliffordElement.scalar(m, n, order, 1.0, cap)
    a, b = ladder_pair(m, n, order, plane, cap)
    a_j, b_j = a, b
    minus_two_i = complex(0.0, -2.0)
    for j in range(1, jmax + 1):
        if j > 1:
            a_j = a_j.multiply(a, strict=True)
            b_j = b_j.multiply(b, strict=True)
        coeff = (minus_two_i ** (-j)) * (phase ** j) / math.factorial(j)
        total = total + a_j.multiply(b_j, strict=True) * coeff
    bound = (abs(phase) ** (jmax + 1)
             / math.factorial(jmax + 1) / 2.0 ** (jmax + 1))
    return OscillatorExpansion(total * prefactor, bound)


# -- double cover ------------------------------------------------------------------


def _compact_membership(biv: ExtendedSuperbivector, tol: float) -> None:
    split = split_bivector(biv)
    scale = max(1.0, biv.norm())
    if split.symmetric.norm() > tol * scale or split.nilpotent.norm() > tol * scale:
        raise MembershipError("kernel sign is defined on compact generators only")


def _bosonic_exponential(biv: ExtendedSuperbivector) -> CliffordElement:
    """exp of the bosonic bivector part inside the finite algebra on the e_j."""
    m, order = biv.m, biv.order
    element = CliffordElement.zero(m, 0, order, cap=0)
    for (j, k), g in biv.b.items():
        blade = CliffordElement(m, 0, order, 0,
                                {((1 << (j - 1)) | (1 << (k - 1)), ()): g})
        element = element + blade
    return clifford_exp(element)


def kernel_sign(biv: ExtendedSuperbivector, tol: float = 1e-8) -> int | None:
    """Sign of exp(B) for a compact generator whose rotation is the identity.

    Returns +1 or -1 for kernel members, None when the induced rotation is
    not the identity; the bosonic factor is evaluated in the finite Clifford
    algebra, the symplectic factor through the telescoping oscillator
    exponentials at the angles of its block diagonalization.
    """
    _compact_membership(biv, tol)
    m, n, order = biv.m, biv.n, biv.order
    rotation = expm(bivector_to_matrix(biv))
    eye = Supermatrix.eye(m, 2 * n, order)
    if (rotation - eye).norm() > tol * max(1.0, rotation.norm()):
        return None
    sign = 1
    if biv.b:
        bos = _bosonic_exponential(biv)
        scalar = bos.scalar_part().body
        residue = (bos - CliffordElement.scalar(m, 0, order, scalar, 0)).norm()
        if residue > tol * max(1.0, bos.norm()) or abs(abs(scalar) - 1.0) > tol:
            raise MembershipError("bosonic factor did not reduce to a sign")
        if scalar.real < 0:
            sign = -sign
    if n and biv.bb:
        d_block = bivector_to_matrix(biv).body_matrix()[m:, m:].real
        u = to_unitary(d_block)
        eigenvalues = np.diag(schur(u, output="complex")[0])
        for lam in eigenvalues:
            angle = -lam.imag  # eigenvalue -i*theta per block angle theta
            winding = angle / (2.0 * math.pi)
            k = round(winding)
            if abs(winding - k) > tol:
                raise MembershipError("symplectic angles are not 2 pi multiples")
            factor = oscillator_exp(k * math.pi, 1, m, n, order)
            sign *= int(factor.element.scalar_part().body.real)
    return sign


# -- fractional Fourier transforms ---------------------------------------------------


def fractional_fourier(thetas: Sequence[float], m: int, order: int) -> SpinElement:
    """One-factor spin element of the fractional Fourier transform per plane.

    The generator is sum_j (theta_j / 2) pi (e'_{2j-1}^2 + e'_{2j}^2); its
    rotation acts as the block rotation by angle pi*theta_j in plane j.  Under
    the operator identifications e'_{2j-1} ~ e^{i pi/4} d/da_j and
    e'_{2j} ~ e^{-i pi/4} a_j this is the order-2*theta_j fractional Fourier
    transform in the j-th variable (up to the phase e^{-i theta_j pi / 2}).
    """
    n = len(thetas)
    bb = {}
    for j, theta in enumerate(thetas, start=1):
        coeff = GrassmannNumber.scalar(order, theta * math.pi / 2.0)
        if coeff.terms:
            bb[(2 * j - 1, 2 * j - 1)] = coeff
            bb[(2 * j, 2 * j)] = coeff
    factor = ExtendedSuperbivector(m, n, order, {}, {}, bb)
    return SpinElement(m, n, order, [factor])
