"""Arithmetic in the unital convolution algebra of one-sided sequences.

Elements are finitely supported coefficient sequences (polynomials in the
shift t) multiplied by Cauchy product and measured in the l1 norm.
Functionals are represented by their values on the monomial basis together
with an explicit *tail declaration*: what, if anything, is known about the
values beyond a finite probe.  Operations that would need tail knowledge
refuse to guess when none is declared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

# Hard cap on polynomial degree; desk-scale experiments are low-degree and a
# runaway convolution should fail loudly rather than allocate gigabytes.
DEGREE_CAP = 1 << 16

# Indices are plain Python ints (exact); anything above this is refused.
INDEX_CAP = 1 << 62

_EPS = 1e-12


class DegreeCapError(ValueError):
    """Support of a constructed element exceeds DEGREE_CAP."""


class UndeclaredTailError(RuntimeError):
    """An evaluation depended on values beyond a table with no declared tail."""


class CertificateViolationError(RuntimeError):
    """Probed values contradict a declared tail certificate."""


# ---------------------------------------------------------------------------
# tail declarations and asymptotic certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Decay:
    """|rule(n)| is non-increasing for n >= start with limit zero.

    When ``ratio`` is set the decrease is geometric:
    |rule(n+1)| <= ratio * |rule(n)| for all n >= start, with ratio < 1.
    """

    start: int = 0
    ratio: Optional[float] = None

    def __post_init__(self):
        if self.ratio is not None and not (0.0 <= self.ratio < 1.0):
            raise ValueError("geometric ratio must lie in [0, 1)")


@dataclass(frozen=True)
class Constant:
    """rule(n) == value exactly for every n >= start."""

    value: complex
    start: int = 0


@dataclass(frozen=True)
class Floor:
    """|rule(n)| >= bound > 0 for every n >= start."""

    bound: float
    start: int = 0

    def __post_init__(self):
        if not self.bound > 0.0:
            raise ValueError("floor bound must be positive")


Certificate = Union[Decay, Constant, Floor]


@dataclass(frozen=True)
class ZeroTail:
    """Values vanish identically from index ``start`` on."""

    start: int


@dataclass(frozen=True)
class ClosedForm:
    """The rule is a total closed form, optionally with a certified asymptotic."""

    certificate: Optional[Certificate] = None


@dataclass(frozen=True)
class Undeclared:
    """Nothing is known beyond explicitly evaluated indices."""


Tail = Union[ZeroTail, ClosedForm, Undeclared]
UNDECLARED = Undeclared()


def tail_to_dict(tail: Tail) -> dict:
    """JSON-ready description of a tail declaration."""
    if isinstance(tail, ZeroTail):
        return {"kind": "zero", "start": tail.start}
    if isinstance(tail, Undeclared):
        return {"kind": "undeclared"}
    cert = tail.certificate
    if cert is None:
        return {"kind": "closed_form"}
    if isinstance(cert, Decay):
        return {"kind": "closed_form", "certificate": "decay",
                "start": cert.start, "ratio": cert.ratio}
    if isinstance(cert, Constant):
        return {"kind": "closed_form", "certificate": "constant",
                "start": cert.start,
                "value": [cert.value.real, cert.value.imag]}
    return {"kind": "closed_form", "certificate": "floor",
            "start": cert.start, "bound": cert.bound}


# ---------------------------------------------------------------------------
# algebra elements
# ---------------------------------------------------------------------------

class L1Element:
    """Finitely supported coefficient sequence a_0 + a_1 t + a_2 t^2 + ...

    Trailing zeros are trimmed on construction; two elements are equal iff
    their trimmed coefficient arrays agree exactly.  Values are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
        nz = np.flatnonzero(arr)
        arr = arr[: nz[-1] + 1].copy() if nz.size else arr[:0].copy()
        if arr.size > DEGREE_CAP + 1:
            raise DegreeCapError(
                f"degree {arr.size - 1} exceeds cap {DEGREE_CAP}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("L1Element is immutable")

    @property
    def degree(self) -> int:
        """Degree of the trimmed polynomial; -1 for the zero element."""
        return self.coeffs.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, L1Element):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(a.size, b.size)
        out = np.zeros(n, dtype=complex)
        out[: a.size] += a
        out[: b.size] += b
        return L1Element(out)

    def __sub__(self, other):
        return self + L1Element(-other.coeffs)

    def __mul__(self, other):
        if isinstance(other, L1Element):
            return convolve(self, other)
        return L1Element(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"L1Element({[complex(c) for c in self.coeffs]})"


def monomial(k: int, coeff: complex = 1.0) -> L1Element:
    """coeff * t^k."""
    if k < 0:
        raise ValueError("monomial exponent must be non-negative")
    out = np.zeros(k + 1, dtype=complex)
    out[k] = coeff
    return L1Element(out)


def one() -> L1Element:
    """The multiplicative identity (the point mass at index 0)."""
    return L1Element([1.0])


def zero() -> L1Element:
    return L1Element([])


def _gaussian_integer_parts(arr: np.ndarray):
    re, im = arr.real, arr.imag
    if np.all(re == np.rint(re)) and np.all(im == np.rint(im)):
        return np.rint(re).astype(np.int64), np.rint(im).astype(np.int64)
    return None


def convolve(a: L1Element, b: L1Element) -> L1Element:
    """Cauchy product: coefficient n of the result is sum_r a_r b_{n-r}.

    When both inputs are Gaussian integers the product is computed in exact
    integer arithmetic (int64, with an overflow guard), so identities that
    hold over the integers hold exactly here too.
    """
    ca, cb = a.coeffs, b.coeffs
    if ca.size == 0 or cb.size == 0:
        return zero()
    if ca.size + cb.size - 1 > DEGREE_CAP + 1:
        raise DegreeCapError(
            f"product degree {ca.size + cb.size - 2} exceeds cap {DEGREE_CAP}")
    ga, gb = _gaussian_integer_parts(ca), _gaussian_integer_parts(cb)
    if ga is not None and gb is not None:
        bound = 2 * min(ca.size, cb.size) \
            * max(1, int(np.abs(ga[0]).max(initial=0)), int(np.abs(ga[1]).max(initial=0))) \
            * max(1, int(np.abs(gb[0]).max(initial=0)), int(np.abs(gb[1]).max(initial=0)))
        if bound < INDEX_CAP:
            ar, ai = ga
            br, bi = gb
            re = np.convolve(ar, br) - np.convolve(ai, bi)
            im = np.convolve(ar, bi) + np.convolve(ai, br)
            return L1Element(re + 1j * im)
    return L1Element(np.convolve(ca, cb))


def l1_norm(a: L1Element) -> float:
    """Sum of coefficient moduli."""
    return float(np.abs(a.coeffs).sum())


# ---------------------------------------------------------------------------
# functionals on the algebra
# ---------------------------------------------------------------------------

class DualSequence:
    """A functional presented by its values phi(t^n) on the monomial basis.

    ``rule`` maps a non-negative index to a complex value and must be
    deterministic.  ``tail`` declares what is known beyond a finite probe.
    ``vectorized`` rules additionally accept an integer ndarray and return
    the matching array of values; this is an optimisation only and never
    changes results.
    """

    def __init__(self, rule: Callable, tail: Tail = UNDECLARED,
                 vectorized: bool = False):
        self._rule = rule
        self.tail = tail
        self.vectorized = bool(vectorized)
        self.computed_range = -1

    @classmethod
    def from_values(cls, values, tail: Tail = UNDECLARED) -> "DualSequence":
        """Finite table of values.

        The tail must be ZeroTail or Undeclared: a table is not a closed
        form.  Reading past an undeclared table raises UndeclaredTailError
        instead of fabricating zeros.
        """
        if isinstance(tail, ClosedForm):
            raise ValueError("a finite table cannot declare a closed form")
        table = np.asarray(values, dtype=complex).ravel()
        if isinstance(tail, ZeroTail):
            if tail.start > table.size:
                raise ValueError(
                    "ZeroTail start lies beyond the table; those values "
                    "would be undefined")
            if np.any(table[tail.start:] != 0):
                raise ValueError("table is non-zero beyond the declared "
                                 "ZeroTail start")

        def rule(n):
            n_arr = np.asarray(n)
            if np.any(n_arr >= table.size):
                raise UndeclaredTailError(
                    f"index {int(np.max(n_arr))} is beyond the table "
                    f"(length {table.size}) and the tail is undeclared")
            return table[n_arr]

        return cls(rule, tail=tail, vectorized=True)

    @classmethod
    def constant(cls, value: complex) -> "DualSequence":
        value = complex(value)
        tail = ClosedForm(Constant(value)) if value != 0 else ZeroTail(0)
        return cls(lambda n: np.full(np.shape(n), value, dtype=complex)
                   if np.ndim(n) else value,
                   tail=tail, vectorized=True)

    def at(self, n) -> complex:
        """Value at a single index (exact for arbitrarily large Python ints)."""
        n = int(n)
        if n < 0:
            raise ValueError("indices are non-negative")
        if isinstance(self.tail, ZeroTail) and n >= self.tail.start:
            value = 0j
        else:
            value = complex(self._rule(n))
        if n > self.computed_range:
            self.computed_range = n
        return value

    __call__ = at

    def bulk(self, indices) -> np.ndarray:
        """Values at an array of indices, honouring a declared ZeroTail."""
        idx = np.asarray(indices, dtype=np.int64)
        out = np.zeros(idx.shape, dtype=complex)
        if isinstance(self.tail, ZeroTail):
            live = idx < self.tail.start
        else:
            live = np.ones(idx.shape, dtype=bool)
        if live.any():
            sel = idx[live]
            if self.vectorized:
                out[live] = np.asarray(self._rule(sel), dtype=complex)
            else:
                out[live] = [complex(self._rule(int(i))) for i in sel]
        if idx.size:
            self.computed_range = max(self.computed_range, int(idx.max()))
        return out

    def values(self, upto: int) -> np.ndarray:
        """Array of values at indices 0..upto inclusive."""
        if upto < 0:
            return np.zeros(0, dtype=complex)
        return self.bulk(np.arange(upto + 1))

    def __repr__(self):
        return f"DualSequence(tail={self.tail!r})"


def validate_tail(seq: DualSequence, upto: int, first_index: int = 0,
                  atol: float = 1e-9) -> None:
    """Check a declared tail against every probed value up to ``upto``.

    Raises CertificateViolationError on contradiction.  This cannot prove a
    declaration, only catch it lying within the probe.
    """
    tail = seq.tail
    if not isinstance(tail, ClosedForm) or tail.certificate is None:
        # ZeroTail values are zero by construction and tables are checked
        # against their declaration at build time; nothing to probe here.
        return
    vals = seq.values(upto)
    mags = np.abs(vals)
    cert = tail.certificate
    start = max(cert.start, first_index)
    if isinstance(cert, Decay):
        for n in range(start, upto):
            limit = mags[n] + atol
            if cert.ratio is not None:
                limit = cert.ratio * mags[n] + atol
            if mags[n + 1] > limit:
                raise CertificateViolationError(
                    f"declared decay from {cert.start} but |value| rises "
                    f"from {mags[n]:.6e} to {mags[n + 1]:.6e} at index {n + 1}")
    elif isinstance(cert, Constant):
        scale = max(1.0, abs(cert.value))
        for n in range(start, upto + 1):
            if abs(vals[n] - cert.value) > atol * scale:
                raise CertificateViolationError(
                    f"declared constant {cert.value} from {cert.start} but "
                    f"value at {n} is {vals[n]}")
    elif isinstance(cert, Floor):
        for n in range(start, upto + 1):
            if mags[n] < cert.bound - atol:
                raise CertificateViolationError(
                    f"declared |value| >= {cert.bound} from {cert.start} but "
                    f"|value| at {n} is {mags[n]:.6e}")


# ---------------------------------------------------------------------------
# pairing and module actions
# ---------------------------------------------------------------------------

def pair(phi: DualSequence, a: L1Element) -> complex:
    """Apply the functional to an element: sum_n phi(t^n) a_n."""
    if a.coeffs.size == 0:
        return 0j
    vals = phi.values(a.degree)
    return complex(np.dot(vals, a.coeffs))


def act_on_dual(a: L1Element, psi: DualSequence) -> DualSequence:
    """Module action of the algebra on a functional: (a.psi)(x) = psi(x a).

    On monomials this is the weighted shift
    (a.psi)(t^n) = sum_k a_k psi(t^{n+k}); the algebra is commutative so the
    left and right actions coincide.
    """
    ks = [int(k) for k in a.support]
    coef = a.coeffs[a.support]

    def rule(n):
        if np.ndim(n):
            n_arr = np.asarray(n)
            out = np.zeros(n_arr.shape, dtype=complex)
            for k, c in zip(ks, coef):
                out += c * psi.bulk(n_arr + k)
            return out
        return sum((c * psi.at(n + k) for k, c in zip(ks, coef)), 0j)

    if not ks:
        tail: Tail = ZeroTail(0)
    elif isinstance(psi.tail, ZeroTail):
        tail = ZeroTail(max(0, psi.tail.start - ks[0]))
    elif isinstance(psi.tail, ClosedForm):
        cert = psi.tail.certificate
        if isinstance(cert, Constant):
            # all shifted values equal the constant once n >= start
            total = complex(np.sum(coef)) * cert.value
            tail = ClosedForm(Constant(total, cert.start)) if total != 0 \
                else ZeroTail(cert.start)
        else:
            tail = ClosedForm()
    else:
        tail = UNDECLARED
    return DualSequence(rule, tail=tail, vectorized=True)


def sup_norm_probe(phi: DualSequence, upto: int) -> float:
    """max |phi(t^n)| over 0 <= n <= upto.

    Always a lower bound for the sup norm; exact when the tail is
    ZeroTail(M) with M <= upto + 1.
    """
    if upto < 0:
        raise ValueError("probe depth must be non-negative")
    return float(np.abs(phi.values(upto)).max(initial=0.0))
