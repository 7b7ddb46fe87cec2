"""Normal-ordered arithmetic in the tensor product of Lambda_N with the
Clifford-Weyl algebra on m orthogonal and 2n symplectic generators.

Generators: e_1..e_m square to -1 and anticommute; e'_1..e'_2n obey the Weyl
relations e'_u e'_v - e'_v e'_u = g_{uv} with the symplectic pairing g; the
two families anticommute with each other; Grassmann coefficients commute with
all of them.  Elements are kept in normal order: ascending e-blade first,
then e'_1^{a_1}...e'_{2n}^{a_{2n}}, with total fermionic degree capped.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

import numpy as np

from .exceptions import (
    AlgebraError,
    CapExceededError,
    MembershipError,
    OrderMismatchError,
    ParityError,
    ShapeMismatchError,
)
from .grassmann import DEFAULT_TOL, GrassmannNumber, random_grassmann, reorder_sign
from .supermatrix import GrassmannMatrix, Supermatrix, symplectic_form

DEFAULT_CAP = 8

# Tolerance for discarding non-vector residue when extracting supervectors.
EXTRACT_TOL = 1e-10


def symplectic_pairing(u: int, v: int) -> int:
    """g_{uv} for 1-based fermionic indices: +1 on (2j-1, 2j), -1 swapped."""
    if u == v + 1 and u % 2 == 0:
        return -1
    if v == u + 1 and v % 2 == 0:
        return 1
    return 0


def _blade_mul(mask_a: int, mask_b: int) -> tuple[int, int]:
    """Product of e-blades with e_j^2 = -1: (sign, result mask)."""
    sign = reorder_sign(mask_a, mask_b)
    if (mask_a & mask_b).bit_count() & 1:
        sign = -sign
    return sign, mask_a ^ mask_b


def _plane_reorder(p1: int, q1: int, p2: int, q2: int) -> list[tuple[int, int, float]]:
    """Normal-order x^p1 y^q1 x^p2 y^q2 within one symplectic plane.

    With [x, y] = 1 one has y^q x^p = sum_k (-1)^k k! C(p,k) C(q,k)
    x^{p-k} y^{q-k}; returns (x exponent, y exponent, coefficient) triples.
    """
    out = []
    for k in range(min(q1, p2) + 1):
        coeff = ((-1.0) ** k) * math.factorial(k) * math.comb(p2, k) * math.comb(q1, k)
        out.append((p1 + p2 - k, q1 + q2 - k, coeff))
    return out


class CliffordElement:
    """Degree-capped normal-ordered element of Lambda_N (x) C_{m,2n}."""

    __slots__ = ("m", "n", "order", "cap", "terms", "truncated")

    def __init__(self, m: int, n: int, order: int, cap: int = DEFAULT_CAP,
                 terms: Mapping[tuple[int, tuple[int, ...]], GrassmannNumber] | None = None,
                 truncated: bool = False):
        self.m = m
        self.n = n
        self.order = order
        self.cap = cap
        self.truncated = truncated
        data: dict[tuple[int, tuple[int, ...]], GrassmannNumber] = {}
        if terms:
            for (emask, alpha), coeff in terms.items():
                alpha = tuple(alpha)
                if emask >> m:
                    raise ShapeMismatchError(f"e-blade mask {emask} out of range for m={m}")
                if len(alpha) != 2 * n:
                    raise ShapeMismatchError("fermionic multi-index length must be 2n")
                if sum(alpha) > cap:
                    raise CapExceededError(
                        f"term degree {sum(alpha)} exceeds cap {cap}"
                    )
                if coeff.order != order:
                    raise OrderMismatchError("coefficient order mismatch")
                if coeff.terms:
                    key = (emask, alpha)
                    data[key] = data[key] + coeff if key in data else coeff
        self.terms = {k: v for k, v in data.items() if v.terms}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, m, n, order, cap=DEFAULT_CAP):
        return cls(m, n, order, cap)

    @classmethod
    def scalar(cls, m, n, order, value, cap=DEFAULT_CAP):
        coeff = value if isinstance(value, GrassmannNumber) else \
            GrassmannNumber.scalar(order, value)
        return cls(m, n, order, cap, {(0, (0,) * (2 * n)): coeff})

    @classmethod
    def basis_e(cls, m, n, order, j, cap=DEFAULT_CAP):
        """The bosonic generator e_j, 1-based."""
        if not 1 <= j <= m:
            raise ShapeMismatchError(f"e index {j} out of range 1..{m}")
        return cls(m, n, order, cap,
                   {(1 << (j - 1), (0,) * (2 * n)): GrassmannNumber.one(order)})

    @classmethod
    def basis_eprime(cls, m, n, order, u, cap=DEFAULT_CAP):
        """The fermionic generator e'_u, 1-based."""
        if not 1 <= u <= 2 * n:
            raise ShapeMismatchError(f"e' index {u} out of range 1..{2 * n}")
        alpha = [0] * (2 * n)
        alpha[u - 1] = 1
        return cls(m, n, order, cap, {(0, tuple(alpha)): GrassmannNumber.one(order)})

    def _like(self, terms, truncated=False):
        return CliffordElement(self.m, self.n, self.order, self.cap, terms,
                               truncated=self.truncated or truncated)

    # -- arithmetic --------------------------------------------------------

    def _require_compatible(self, other: "CliffordElement") -> None:
        if (self.m, self.n, self.order) != (other.m, other.n, other.order):
            raise ShapeMismatchError("incompatible Clifford algebra signatures")

    def __add__(self, other):
        if isinstance(other, CliffordElement):
            self._require_compatible(other)
            out = dict(self.terms)
            for key, coeff in other.terms.items():
                out[key] = out[key] + coeff if key in out else coeff
            result = CliffordElement(self.m, self.n, self.order,
                                     max(self.cap, other.cap), out)
            result.truncated = self.truncated or other.truncated
            return result
        if isinstance(other, (int, float, complex, GrassmannNumber)):
            return self + CliffordElement.scalar(self.m, self.n, self.order,
                                                 other, self.cap)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def scale(self, factor) -> "CliffordElement":
        """Right-multiply every coefficient by a complex or Grassmann scalar."""
        return self._like({k: v * factor for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            return self.multiply(other, strict=False)
        if isinstance(other, (int, float, complex, GrassmannNumber)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, GrassmannNumber)):
            return self.scale(other)
        return NotImplemented

    def multiply(self, other: "CliffordElement", strict: bool = False) -> "CliffordElement":
        """Normal-ordered product; over-cap terms raise in strict mode."""
        self._require_compatible(other)
        cap = max(self.cap, other.cap)
        out: dict[tuple[int, tuple[int, ...]], GrassmannNumber] = {}
        truncated = False
        for (ea, aa), ca in self.terms.items():
            deg_a = sum(aa)
            for (eb, ab), cb in other.terms.items():
                coeff = ca * cb
                if not coeff.terms:
                    continue
                sign = 1
                # e-generators of the right factor step over the left
                # fermionic monomial; both families anticommute.
                if (deg_a & 1) and (eb.bit_count() & 1):
                    sign = -sign
                bsign, emask = _blade_mul(ea, eb)
                sign *= bsign
                # per-plane Weyl reordering, planes commute with each other
                plane_options = [
                    _plane_reorder(aa[2 * t], aa[2 * t + 1], ab[2 * t], ab[2 * t + 1])
                    for t in range(self.n)
                ]
                for combo in itertools.product(*plane_options):
                    alpha = []
                    weight = float(sign)
                    for (px, qy, w) in combo:
                        alpha.append(px)
                        alpha.append(qy)
                        weight *= w
                    if weight == 0.0:
                        continue
                    if sum(alpha) > cap:
                        if strict:
                            raise CapExceededError(
                                f"product degree {sum(alpha)} exceeds cap {cap}"
                            )
                        truncated = True
                        continue
                    key = (emask, tuple(alpha))
                    term = coeff * weight
                    out[key] = out[key] + term if key in out else term
        result = CliffordElement(self.m, self.n, self.order, cap, out)
        result.truncated = self.truncated or other.truncated or truncated
        return result

    # -- structure ---------------------------------------------------------

    def scalar_part(self) -> GrassmannNumber:
        return self.terms.get((0, (0,) * (2 * self.n)),
                              GrassmannNumber.zero(self.order))

    def fermionic_degree(self) -> int:
        return max((sum(a) for (_, a) in self.terms), default=0)

    def norm(self) -> float:
        return sum(c.norm() for c in self.terms.values())

    def isclose(self, other: "CliffordElement", tol: float = DEFAULT_TOL) -> bool:
        self._require_compatible(other)
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    def as_supervector(self, tol: float = EXTRACT_TOL) -> "Supervector":
        """Extract a supervector; residue above tol * norm is an error."""
        even = [GrassmannNumber.zero(self.order) for _ in range(self.m)]
        odd = [GrassmannNumber.zero(self.order) for _ in range(2 * self.n)]
        residue = 0.0
        for (emask, alpha), coeff in self.terms.items():
            deg = sum(alpha)
            if emask.bit_count() == 1 and deg == 0:
                even[emask.bit_length() - 1] = coeff
            elif emask == 0 and deg == 1:
                odd[alpha.index(1)] = coeff
            else:
                residue += coeff.norm()
        if residue > tol * max(1.0, self.norm()):
            raise AlgebraError(
                f"element is not a supervector (residue norm {residue:.3e})"
            )
        return Supervector(self.m, self.n, self.order, even, odd)

    def as_superbivector(self, tol: float = EXTRACT_TOL) -> "ExtendedSuperbivector":
        """Extract an extended superbivector from the normal-ordered form.

        The symmetrized fermionic products contribute a scalar shift
        (e'_u (.) e'_v = e'_u e'_v - g_{uv}/2 for u < v); the actual scalar
        part must match the shift implied by the extracted coefficients.
        """
        b: dict[tuple[int, int], GrassmannNumber] = {}
        bq: dict[tuple[int, int], GrassmannNumber] = {}
        bb: dict[tuple[int, int], GrassmannNumber] = {}
        scalar = GrassmannNumber.zero(self.order)
        residue = 0.0
        for (emask, alpha), coeff in self.terms.items():
            k = emask.bit_count()
            deg = sum(alpha)
            if k == 2 and deg == 0:
                lo = (emask & -emask).bit_length()
                hi = emask.bit_length()
                b[(lo, hi)] = coeff
            elif k == 1 and deg == 1:
                bq[(emask.bit_length(), alpha.index(1) + 1)] = coeff
            elif k == 0 and deg == 2:
                support = [i + 1 for i, a in enumerate(alpha) if a]
                if len(support) == 1:
                    bb[(support[0], support[0])] = coeff
                else:
                    bb[(support[0], support[1])] = coeff
            elif k == 0 and deg == 0:
                scalar = coeff
            else:
                residue += coeff.norm()
        if residue > tol * max(1.0, self.norm()):
            raise AlgebraError(
                f"element is not an extended superbivector (residue {residue:.3e})"
            )
        expected = GrassmannNumber.zero(self.order)
        for (u, v), coeff in bb.items():
            if u != v:
                expected = expected - coeff * (0.5 * symplectic_pairing(u, v))
        if (scalar - expected).norm() > tol * max(1.0, self.norm()):
            raise AlgebraError("scalar part inconsistent with symmetrized products")
        return ExtendedSuperbivector(self.m, self.n, self.order, b, bq, bb)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        items = sorted(self.terms.items())
        return {
            "m": self.m,
            "n": self.n,
            "N": self.order,
            "cap": self.cap,
            "truncated": self.truncated,
            "terms": [
                {"emask": emask, "alpha": list(alpha), "coeff": coeff.to_dict()}
                for (emask, alpha), coeff in items
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CliffordElement":
        terms = {
            (int(t["emask"]), tuple(int(a) for a in t["alpha"])):
                GrassmannNumber.from_dict(t["coeff"])
            for t in data.get("terms", [])
        }
        return cls(int(data["m"]), int(data["n"]), int(data["N"]),
                   int(data.get("cap", DEFAULT_CAP)), terms,
                   truncated=bool(data.get("truncated", False)))

    def __repr__(self):
        return (f"CliffordElement(m={self.m}, n={self.n}, N={self.order}, "
                f"terms={len(self.terms)}, cap={self.cap})")


class Supervector:
    """Element of R^{m,2n}(Lambda_N): m even and 2n odd Grassmann coordinates."""

    __slots__ = ("m", "n", "order", "even", "odd")

    def __init__(self, m: int, n: int, order: int,
                 even: Sequence[GrassmannNumber], odd: Sequence[GrassmannNumber]):
        if len(even) != m or len(odd) != 2 * n:
            raise ShapeMismatchError("coordinate counts must be m and 2n")
        for g in (*even, *odd):
            if g.order != order:
                raise OrderMismatchError("coordinate order mismatch")
        for g in even:
            if g.parity() not in ("even",):
                raise ParityError("bosonic coordinates must be even")
        for g in odd:
            if g.terms and g.parity() != "odd":
                raise ParityError("fermionic coordinates must be odd")
        self.m = m
        self.n = n
        self.order = order
        self.even = tuple(even)
        self.odd = tuple(odd)

    @classmethod
    def zero(cls, m, n, order):
        z = GrassmannNumber.zero(order)
        return cls(m, n, order, [z] * m, [z] * (2 * n))

    @classmethod
    def unit(cls, m, n, order, index: int, fermionic: bool = False):
        """Unit vector along e_index or e'_index (1-based)."""
        vec = cls.zero(m, n, order)
        one = GrassmannNumber.one(order)
        even = list(vec.even)
        odd = list(vec.odd)
        if fermionic:
            odd[index - 1] = one
        else:
            even[index - 1] = one
        return cls(m, n, order, even, odd)

    @classmethod
    def from_coefficients(cls, m, n, order, even, odd):
        conv = [
            g if isinstance(g, GrassmannNumber) else GrassmannNumber.scalar(order, g)
            for g in even
        ]
        conv_odd = [
            g if isinstance(g, GrassmannNumber) else GrassmannNumber.scalar(order, g)
            for g in odd
        ]
        return cls(m, n, order, conv, conv_odd)

    def _require_compatible(self, other: "Supervector") -> None:
        if (self.m, self.n, self.order) != (other.m, other.n, other.order):
            raise ShapeMismatchError("incompatible supervector shapes")

    def __add__(self, other: "Supervector") -> "Supervector":
        self._require_compatible(other)
        return Supervector(
            self.m, self.n, self.order,
            [a + b for a, b in zip(self.even, other.even)],
            [a + b for a, b in zip(self.odd, other.odd)],
        )

    def __sub__(self, other: "Supervector") -> "Supervector":
        self._require_compatible(other)
        return Supervector(
            self.m, self.n, self.order,
            [a - b for a, b in zip(self.even, other.even)],
            [a - b for a, b in zip(self.odd, other.odd)],
        )

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, factor) -> "Supervector":
        """Scale by a complex number or an even Grassmann number."""
        if isinstance(factor, GrassmannNumber) and not factor.is_even():
            raise ParityError("supervector scaling factor must be even")
        return Supervector(
            self.m, self.n, self.order,
            [g * factor for g in self.even],
            [g * factor for g in self.odd],
        )

    def norm(self) -> float:
        return sum(g.norm() for g in (*self.even, *self.odd))

    def isclose(self, other: "Supervector", tol: float = DEFAULT_TOL) -> bool:
        self._require_compatible(other)
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    def to_clifford(self, cap: int = DEFAULT_CAP) -> CliffordElement:
        terms: dict[tuple[int, tuple[int, ...]], GrassmannNumber] = {}
        zeros = (0,) * (2 * self.n)
        for j, g in enumerate(self.even):
            if g.terms:
                terms[(1 << j, zeros)] = g
        for u, g in enumerate(self.odd):
            if g.terms:
                alpha = list(zeros)
                alpha[u] = 1
                terms[(0, tuple(alpha))] = g
        return CliffordElement(self.m, self.n, self.order, cap, terms)

    def to_column(self) -> GrassmannMatrix:
        entries = [[g] for g in (*self.even, *self.odd)]
        return GrassmannMatrix.from_entries(entries, self.order)

    @classmethod
    def from_column(cls, m: int, n: int, col: GrassmannMatrix) -> "Supervector":
        if col.cols != 1 or col.rows != m + 2 * n:
            raise ShapeMismatchError("column shape does not match (m, n)")
        entries = [col.entry(i, 0) for i in range(col.rows)]
        return cls(m, n, col.order, entries[:m], entries[m:])

    def square(self) -> GrassmannNumber:
        """w^2 = -<w, w> as a central even Grassmann number."""
        return -inner(self, self)

    def body_vector(self) -> np.ndarray:
        return np.array([g.body for g in self.even])

    def on_supersphere(self, tol: float = DEFAULT_TOL, nil_tol: float = 1e-12) -> bool:
        """w^2 = -1: exact nilpotent cancellation plus a unit-sphere body."""
        dev = self.square() + 1.0
        return dev.nilpotent().norm() <= nil_tol and abs(dev.body) <= tol

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "N": self.order,
            "even": [g.to_dict() for g in self.even],
            "odd": [g.to_dict() for g in self.odd],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Supervector":
        m, n, order = int(data["m"]), int(data["n"]), int(data["N"])
        even = [GrassmannNumber.from_dict(g) for g in data.get("even", [])]
        odd = [GrassmannNumber.from_dict(g) for g in data.get("odd", [])]
        return cls(m, n, order, even, odd)

    def __repr__(self):
        return f"Supervector(m={self.m}, n={self.n}, N={self.order})"


class ExtendedSuperbivector:
    """Coefficients of a degree-2 element: orthogonal, mixed and symplectic
    families, the last allowed a non-nilpotent (even) coefficient."""

    __slots__ = ("m", "n", "order", "b", "bq", "bb")

    def __init__(self, m: int, n: int, order: int,
                 b: Mapping[tuple[int, int], GrassmannNumber] | None = None,
                 bq: Mapping[tuple[int, int], GrassmannNumber] | None = None,
                 bb: Mapping[tuple[int, int], GrassmannNumber] | None = None):
        self.m = m
        self.n = n
        self.order = order
        self.b = {}
        self.bq = {}
        self.bb = {}
        for (j, k), g in (b or {}).items():
            if not 1 <= j < k <= m:
                raise ShapeMismatchError(f"bosonic pair ({j},{k}) needs 1<=j<k<=m")
            self._store(self.b, (j, k), g, "even")
        for (j, u), g in (bq or {}).items():
            if not (1 <= j <= m and 1 <= u <= 2 * n):
                raise ShapeMismatchError(f"mixed pair ({j},{u}) out of range")
            self._store(self.bq, (j, u), g, "odd")
        for (u, v), g in (bb or {}).items():
            if not 1 <= u <= v <= 2 * n:
                raise ShapeMismatchError(f"symplectic pair ({u},{v}) needs 1<=u<=v<=2n")
            self._store(self.bb, (u, v), g, "even")

    def _store(self, target, key, g, parity):
        if g.order != self.order:
            raise OrderMismatchError("coefficient order mismatch")
        if g.terms and g.parity() != parity:
            raise ParityError(f"coefficient at {key} must be {parity}")
        if g.terms:
            target[key] = g

    @classmethod
    def zero(cls, m, n, order):
        return cls(m, n, order)

    def _families(self):
        return (("b", self.b), ("bq", self.bq), ("bb", self.bb))

    def _require_compatible(self, other: "ExtendedSuperbivector") -> None:
        if (self.m, self.n, self.order) != (other.m, other.n, other.order):
            raise ShapeMismatchError("incompatible superbivector shapes")

    def __add__(self, other: "ExtendedSuperbivector") -> "ExtendedSuperbivector":
        self._require_compatible(other)
        fams = []
        for (_, mine), (_, theirs) in zip(self._families(), other._families()):
            out = dict(mine)
            for key, g in theirs.items():
                out[key] = out[key] + g if key in out else g
            fams.append(out)
        return ExtendedSuperbivector(self.m, self.n, self.order, *fams)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, factor) -> "ExtendedSuperbivector":
        fams = []
        for _, fam in self._families():
            fams.append({key: g * factor for key, g in fam.items()})
        return ExtendedSuperbivector(self.m, self.n, self.order, *fams)

    def norm(self) -> float:
        return sum(g.norm() for _, fam in self._families() for g in fam.values())

    def isclose(self, other: "ExtendedSuperbivector", tol: float = DEFAULT_TOL) -> bool:
        self._require_compatible(other)
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    def is_strict(self, tol: float = 0.0) -> bool:
        """True when every symplectic coefficient is nilpotent (zero body)."""
        return all(abs(g.body) <= tol for g in self.bb.values())

    def to_clifford(self, cap: int = DEFAULT_CAP) -> CliffordElement:
        n2 = 2 * self.n
        zeros = (0,) * n2
        terms: dict[tuple[int, tuple[int, ...]], GrassmannNumber] = {}

        def _add(key, g):
            terms[key] = terms[key] + g if key in terms else g

        for (j, k), g in self.b.items():
            _add(((1 << (j - 1)) | (1 << (k - 1)), zeros), g)
        for (j, u), g in self.bq.items():
            alpha = [0] * n2
            alpha[u - 1] = 1
            _add(((1 << (j - 1)), tuple(alpha)), g)
        for (u, v), g in self.bb.items():
            alpha = [0] * n2
            alpha[u - 1] += 1
            alpha[v - 1] += 1
            _add((0, tuple(alpha)), g)
            if u != v:
                pairing = symplectic_pairing(u, v)
                if pairing:
                    _add((0, zeros), g * (-0.5 * pairing))
        return CliffordElement(self.m, self.n, self.order, cap, terms)

    def to_dict(self) -> dict:
        def fam(d):
            return [
                {"j": j, "k": k, "coeff": d[(j, k)].to_dict()}
                for (j, k) in sorted(d)
            ]
        return {
            "m": self.m,
            "n": self.n,
            "N": self.order,
            "b": fam(self.b),
            "bq": fam(self.bq),
            "B": fam(self.bb),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExtendedSuperbivector":
        def fam(items):
            out = {}
            for it in items:
                key = (int(it["j"]), int(it["k"]))
                g = GrassmannNumber.from_dict(it["coeff"])
                out[key] = out[key] + g if key in out else g
            return out
        return cls(int(data["m"]), int(data["n"]), int(data["N"]),
                   fam(data.get("b", [])), fam(data.get("bq", [])),
                   fam(data.get("B", [])))

    def __repr__(self):
        sizes = {name: len(fam) for name, fam in self._families()}
        return (f"ExtendedSuperbivector(m={self.m}, n={self.n}, N={self.order}, "
                f"coeffs={sizes})")


def clifford_exp(x: CliffordElement, max_terms: int = 200) -> CliffordElement:
    """Power-series exponential inside the degree-capped algebra.

    Exact (finite) for nilpotent-coefficient input; absolutely convergent for
    purely bosonic input; for general capped elements the truncated flag of
    the result reports any degree loss.
    """
    result = CliffordElement.scalar(x.m, x.n, x.order, 1.0, x.cap)
    term = result
    for k in range(1, max_terms + 1):
        term = term.multiply(x) * (1.0 / k)
        if not term.terms:
            break
        result = result + term
        if term.norm() <= 1e-16 * max(1.0, result.norm()):
            break
    return result


# -- inner product and wedge --------------------------------------------------


def inner(x: Supervector, y: Supervector) -> GrassmannNumber:
    """Generalized inner product, equal to -{x,y}/2 and to x^T Q y."""
    x._require_compatible(y)
    total = GrassmannNumber.zero(x.order)
    for a, b in zip(x.even, y.even):
        total = total + a * b
    for j in range(x.n):
        total = total - (x.odd[2 * j] * y.odd[2 * j + 1]
                         - x.odd[2 * j + 1] * y.odd[2 * j]) * 0.5
    return total


def wedge(x: Supervector, y: Supervector) -> ExtendedSuperbivector:
    """Wedge product of supervectors; its symplectic part is nilpotent."""
    x._require_compatible(y)
    b = {}
    for j in range(1, x.m + 1):
        for k in range(j + 1, x.m + 1):
            b[(j, k)] = x.even[j - 1] * y.even[k - 1] - x.even[k - 1] * y.even[j - 1]
    bq = {}
    for j in range(1, x.m + 1):
        for u in range(1, 2 * x.n + 1):
            bq[(j, u)] = x.even[j - 1] * y.odd[u - 1] - x.odd[u - 1] * y.even[j - 1]
    bb = {}
    for u in range(1, 2 * x.n + 1):
        for v in range(u, 2 * x.n + 1):
            bb[(u, v)] = x.odd[u - 1] * y.odd[v - 1] + x.odd[v - 1] * y.odd[u - 1]
    return ExtendedSuperbivector(x.m, x.n, x.order, b, bq, bb)


# -- the linear action of a superbivector -------------------------------------


def bivector_to_matrix(biv: ExtendedSuperbivector) -> Supermatrix:
    """Supermatrix of the commutator action x -> [B, x]; lands in so_0."""
    m, n, order = biv.m, biv.n, biv.order
    size = m + 2 * n
    blades: dict[int, np.ndarray] = {}

    def _add(mask, i, j, value):
        if mask not in blades:
            blades[mask] = np.zeros((size, size), dtype=complex)
        blades[mask][i, j] += value

    def _spread(g, i, j, factor):
        for mask, c in g.terms.items():
            _add(mask, i, j, c * factor)

    for (j, k), g in biv.b.items():
        # A block: 2 b (E_{k,j} - E_{j,k})
        _spread(g, k - 1, j - 1, 2.0)
        _spread(g, j - 1, k - 1, -2.0)
    for (j, u), g in biv.bq.items():
        row = m + u - 1
        if u % 2 == 1:
            # e_j e'_{2k-1}: B gains E_{j,2k}, C gains 2 E_{2k-1,j}
            _spread(g, j - 1, m + u, 1.0)
            _spread(g, row, j - 1, 2.0)
        else:
            # e_j e'_{2k}: B gains -E_{j,2k-1}, C gains 2 E_{2k,j}
            _spread(g, j - 1, m + u - 2, -1.0)
            _spread(g, row, j - 1, 2.0)
    for (u, v), g in biv.bb.items():
        uo, vo = u % 2 == 1, v % 2 == 1
        if uo and vo:
            # e'_{2j-1} (.) e'_{2k-1} -> E_{2j-1,2k} + E_{2k-1,2j}
            _spread(g, m + u - 1, m + v, 1.0)
            _spread(g, m + v - 1, m + u, 1.0)
        elif not uo and not vo:
            # e'_{2j} (.) e'_{2k} -> -(E_{2j,2k-1} + E_{2k,2j-1})
            _spread(g, m + u - 1, m + v - 2, -1.0)
            _spread(g, m + v - 1, m + u - 2, -1.0)
        elif uo and not vo:
            # e'_{2j-1} (.) e'_{2k} -> E_{2k,2j} - E_{2j-1,2k-1}
            _spread(g, m + v - 1, m + u, 1.0)
            _spread(g, m + u - 1, m + v - 2, -1.0)
        else:
            # e'_{2j} (.) e'_{2k-1} with j < k: E_{2j,2k} - E_{2k-1,2j-1}
            _spread(g, m + u - 1, m + v, 1.0)
            _spread(g, m + v - 1, m + u - 2, -1.0)
    mat = GrassmannMatrix(size, size, order, blades)
    return Supermatrix(m, 2 * n, mat, validate=False)


def matrix_to_bivector(x: Supermatrix, tol: float = DEFAULT_TOL) -> ExtendedSuperbivector:
    """Inverse of the commutator-action map on so_0 supermatrices."""
    from .orthosymplectic import check_so0_algebra

    report = check_so0_algebra(x, tol)
    if not report.ok:
        raise MembershipError(
            f"matrix is not in so_0 (residual {report.residual:.3e})"
        )
    m = x.p
    n = x.q // 2
    a = x.block_a()
    c = x.block_c()
    d = x.block_d()
    b: dict[tuple[int, int], GrassmannNumber] = {}
    bq: dict[tuple[int, int], GrassmannNumber] = {}
    bb: dict[tuple[int, int], GrassmannNumber] = {}
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            g = a.entry(k - 1, j - 1) * 0.5
            if g.terms:
                b[(j, k)] = g
    for j in range(1, m + 1):
        for u in range(1, 2 * n + 1):
            g = c.entry(u - 1, j - 1) * 0.5
            if g.terms:
                bq[(j, u)] = g
    for u in range(1, 2 * n + 1):
        for v in range(u, 2 * n + 1):
            uo, vo = u % 2 == 1, v % 2 == 1
            if uo and vo:
                g = d.entry(u - 1, v) * (0.5 if u == v else 1.0)
            elif not uo and not vo:
                g = d.entry(u - 1, v - 2) * (-0.5 if u == v else -1.0)
            elif uo and not vo:
                # same plane (u = v - 1) reads the even-even diagonal entry
                g = d.entry(v - 1, u)
            else:
                g = d.entry(u - 1, v)
            if g.terms:
                bb[(u, v)] = g
    return ExtendedSuperbivector(m, n, x.order, b, bq, bb)


def commutator_action(biv: ExtendedSuperbivector, x: Supervector) -> Supervector:
    """[B, x] evaluated coordinatewise; agrees with the matrix action."""
    if (biv.m, biv.n, biv.order) != (x.m, x.n, x.order):
        raise ShapeMismatchError("bivector and supervector shapes differ")
    even = [GrassmannNumber.zero(x.order) for _ in range(x.m)]
    odd = [GrassmannNumber.zero(x.order) for _ in range(2 * x.n)]
    for (j, k), g in biv.b.items():
        even[k - 1] = even[k - 1] + g * x.even[j - 1] * 2.0
        even[j - 1] = even[j - 1] - g * x.even[k - 1] * 2.0
    for (j, u), g in biv.bq.items():
        odd[u - 1] = odd[u - 1] + g * x.even[j - 1] * 2.0
        if u % 2 == 1:
            even[j - 1] = even[j - 1] + g * x.odd[u]
        else:
            even[j - 1] = even[j - 1] - g * x.odd[u - 2]
    for (u, v), g in biv.bb.items():
        uo, vo = u % 2 == 1, v % 2 == 1
        if uo and vo:
            odd[v - 1] = odd[v - 1] + g * x.odd[u]
            odd[u - 1] = odd[u - 1] + g * x.odd[v]
        elif not uo and not vo:
            odd[v - 1] = odd[v - 1] - g * x.odd[u - 2]
            odd[u - 1] = odd[u - 1] - g * x.odd[v - 2]
        elif uo and not vo:
            odd[v - 1] = odd[v - 1] + g * x.odd[u]
            odd[u - 1] = odd[u - 1] - g * x.odd[v - 2]
        else:
            odd[v - 1] = odd[v - 1] - g * x.odd[u - 2]
            odd[u - 1] = odd[u - 1] + g * x.odd[v]
    return Supervector(x.m, x.n, x.order, even, odd)


def apply_matrix(mat: Supermatrix, x: Supervector) -> Supervector:
    """Supermatrix action on a supervector via the column representation."""
    if mat.p != x.m or mat.q != 2 * x.n or mat.order != x.order:
        raise ShapeMismatchError("matrix and vector shapes differ")
    col = mat.mat @ x.to_column()
    return Supervector.from_column(x.m, x.n, col)


# -- supervector reflections ---------------------------------------------------


def _diag(values: Sequence[GrassmannNumber], order: int) -> GrassmannMatrix:
    size = len(values)
    zero = GrassmannNumber.zero(order)
    grid = [[values[i] if i == j else zero for j in range(size)] for i in range(size)]
    return GrassmannMatrix.from_entries(grid, order) if size else \
        GrassmannMatrix.zeros(0, 0, order)


def reflection_matrix(w: Supervector) -> Supermatrix:
    """Supermatrix of x -> w x w for w on the supersphere; sdet is -1."""
    if not w.on_supersphere():
        raise MembershipError("reflection axis must satisfy w^2 = -1")
    m, n, order = w.m, w.n, w.order
    two_n = 2 * n
    dw = _diag(w.even, order)
    dwp = _diag(w.odd, order)
    ones_mm = GrassmannMatrix.from_body(np.ones((m, m)), order)
    ones_m2n = GrassmannMatrix.from_body(np.ones((m, two_n)), order)
    ones_2nm = GrassmannMatrix.from_body(np.ones((two_n, m)), order)
    ones_2n2n = GrassmannMatrix.from_body(np.ones((two_n, two_n)), order)
    omega = GrassmannMatrix.from_body(symplectic_form(n), order)
    block_a = GrassmannMatrix.eye(m, order) - (dw @ ones_mm @ dw).scale(2.0)
    block_b = dw @ ones_m2n @ dwp @ omega
    block_c = -(dwp @ ones_2nm @ dw).scale(2.0)
    block_d = GrassmannMatrix.eye(two_n, order) + dwp @ ones_2n2n @ dwp @ omega
    return Supermatrix.from_blocks(block_a, block_b, block_c, block_d)


def reflect(w: Supervector, x: Supervector, tol: float = 1e-9) -> Supervector:
    """w x w computed by Clifford multiplication, checked against the matrix."""
    w._require_compatible(x)
    cap = 4
    wc = w.to_clifford(cap)
    product = wc * x.to_clifford(cap) * wc
    via_clifford = product.as_supervector()
    via_matrix = apply_matrix(reflection_matrix(w), x)
    if not via_clifford.isclose(via_matrix, tol):
        raise AlgebraError("reflection routes disagree beyond tolerance")
    return via_clifford


def random_supervector(m: int, n: int, order: int, seed: int,
                       scale: float = 0.5) -> Supervector:
    """Seeded random supervector with real coefficients of correct parity."""
    rng = np.random.default_rng(seed)
    even = [random_grassmann(rng, order, parity="even", scale=scale)
            for _ in range(m)]
    odd = [random_grassmann(rng, order, parity="odd", scale=scale)
           for _ in range(2 * n)]
    return Supervector(m, n, order, even, odd)


def random_sphere_vector(m: int, n: int, order: int, seed: int,
                         nilpotent_scale: float = 0.3) -> Supervector:
    """Seeded random supersphere point.

    Draws a unit body in R^m plus nilpotent corrections, then rescales by
    <w,w>^{-1/2}; the correction is exact because the error is nilpotent.
    """
    rng = np.random.default_rng(seed)
    body = rng.normal(size=m)
    body /= np.linalg.norm(body)
    even = [
        GrassmannNumber.scalar(order, body[j])
        + random_grassmann(rng, order, parity="even", scale=nilpotent_scale,
                           grade_min=2)
        for j in range(m)
    ]
    odd = [random_grassmann(rng, order, parity="odd", scale=nilpotent_scale)
           for _ in range(2 * n)]
    w = Supervector(m, n, order, even, odd)
    factor = inner(w, w).fpow(-0.5)
    return w.scale(factor)
