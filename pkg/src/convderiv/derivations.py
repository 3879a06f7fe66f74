"""Bounded derivations from the convolution algebra into its dual.

A derivation D is determined by the coefficient sequence
mu_n = D(t^n)(1), equivalently by the functional phi = D(t) through
mu_n = n * phi(t^{n-1}); the correspondence is an isometry, so norms,
finite-rank truncation error and compactness are all read off mu.  The
compactness criterion is: D is compact exactly when mu vanishes at
infinity, and every verdict here is backed by a declared tail certificate
rather than by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .convolution import (
    INDEX_CAP,
    Certificate,
    ClosedForm,
    Constant,
    Decay,
    DualSequence,
    Floor,
    L1Element,
    Tail,
    UNDECLARED,
    Undeclared,
    ZeroTail,
    tail_to_dict,
    validate_tail,
)


class UnboundedDerivationError(ValueError):
    """The declared tail proves sup_n n*|phi(t^{n-1})| is infinite."""


class TailUnknownError(RuntimeError):
    """A requested error bound needs tail knowledge that was not declared."""


class NoAdmissibleIndexError(RuntimeError):
    """No index with |mu| above the threshold exists in the required range."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IndexOverflowError(RuntimeError):
    """The next witness index would exceed the supported index range."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class WitnessVerificationError(RuntimeError):
    """A claimed witness inequality failed its numerical re-check."""


def _mu_tail_from_phi(tail: Tail) -> Tail:
    """Sound tail declaration for mu_n = n*phi(n-1) given phi's declaration."""
    if isinstance(tail, ZeroTail):
        return ZeroTail(tail.start + 1)
    if isinstance(tail, Undeclared):
        return UNDECLARED
    cert = tail.certificate
    if isinstance(cert, (Constant, Floor)):
        bound = abs(cert.value) if isinstance(cert, Constant) else cert.bound
        if bound > 0:
            raise UnboundedDerivationError(
                f"|phi| >= {bound} from index {cert.start}, so "
                f"n*|phi(n-1)| is unbounded and no bounded derivation "
                f"has phi as its value at t")
        return ZeroTail(cert.start + 1)
    if isinstance(cert, Decay) and cert.ratio is not None:
        # |mu(n+1)/mu(n)| <= ((n+1)/n) * ratio, which is <= 1 once
        # n >= ratio/(1-ratio); the geometric envelope forces mu -> 0
        start = max(cert.start + 1, math.ceil(cert.ratio / (1 - cert.ratio)), 1)
        return ClosedForm(Decay(start=start))
    return ClosedForm()


def _phi_tail_from_mu(tail: Tail) -> Tail:
    """Sound tail declaration for phi(n) = mu(n+1)/(n+1) given mu's."""
    if isinstance(tail, ZeroTail):
        return ZeroTail(max(tail.start - 1, 0))
    if isinstance(tail, Undeclared):
        return UNDECLARED
    cert = tail.certificate
    if isinstance(cert, Decay):
        return ClosedForm(Decay(start=max(cert.start - 1, 0), ratio=cert.ratio))
    if isinstance(cert, Constant):
        if cert.value == 0:
            return ZeroTail(max(cert.start - 1, 0))
        # a constant divided by n+1 decreases monotonically to zero
        return ClosedForm(Decay(start=max(cert.start - 1, 0)))
    return ClosedForm()


def _normalize_mu_certificate(tail: Tail) -> Tail:
    # mu_0 = 0 structurally, so certificates about mu start at index 1
    if isinstance(tail, ClosedForm) and tail.certificate is not None:
        cert = tail.certificate
        if cert.start < 1:
            if isinstance(cert, Decay):
                cert = Decay(start=1, ratio=cert.ratio)
            elif isinstance(cert, Constant):
                cert = Constant(cert.value, start=1)
            else:
                cert = Floor(cert.bound, start=1)
            return ClosedForm(cert)
    return tail


class Derivation:
    """A bounded derivation into the dual, held as its coefficient sequence.

    Use :meth:`from_phi` or :meth:`from_mu`; the two round-trip exactly.
    ``norm_lower`` is the largest probed value of |mu| so far; ``norm_cache``
    is set once the declared tail certifies the supremum was attained.
    """

    def __init__(self, mu: DualSequence, phi: DualSequence):
        self.mu = mu
        self.phi = phi
        self.norm_lower = 0.0
        self.norm_cache: Optional[float] = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_phi(cls, phi: DualSequence, probe_depth: int = 64,
                 mu_tail: Optional[Tail] = None) -> "Derivation":
        """Unique derivation with the given value at t.

        Raises UnboundedDerivationError when phi's declared tail proves
        sup_n n*|phi(t^{n-1})| infinite.  ``mu_tail`` lets a caller with
        exact knowledge of the derived sequence declare its tail directly;
        by default a sound declaration is derived from phi's.
        """
        tail = _normalize_mu_certificate(
            _mu_tail_from_phi(phi.tail) if mu_tail is None else mu_tail)

        def mu_rule(n):
            if np.ndim(n):
                n_arr = np.asarray(n, dtype=np.int64)
                out = np.zeros(n_arr.shape, dtype=complex)
                pos = n_arr >= 1
                if pos.any():
                    out[pos] = n_arr[pos] * phi.bulk(n_arr[pos] - 1)
                return out
            return n * phi.at(n - 1) if n >= 1 else 0j

        mu = DualSequence(mu_rule, tail=tail, vectorized=True)
        deriv = cls(mu, phi)
        if probe_depth >= 1:
            deriv.norm(probe_depth)
        return deriv

    @classmethod
    def from_mu(cls, mu_rule: Callable, tail: Tail = UNDECLARED) -> "Derivation":
        """Derivation from its coefficient sequence; index 0 is forced to 0."""
        tail = _normalize_mu_certificate(tail)

        def rule(n):
            if np.ndim(n):
                n_arr = np.asarray(n, dtype=np.int64)
                out = np.zeros(n_arr.shape, dtype=complex)
                pos = n_arr >= 1
                if pos.any():
                    vals = mu_rule(n_arr[pos])
                    out[pos] = np.asarray(vals, dtype=complex)
                return out
            return complex(mu_rule(n)) if n >= 1 else 0j

        vectorized = _accepts_arrays(mu_rule)
        mu = DualSequence(rule, tail=tail, vectorized=vectorized)

        def phi_rule(n):
            if np.ndim(n):
                n_arr = np.asarray(n, dtype=np.int64)
                return mu.bulk(n_arr + 1) / (n_arr + 1)
            return mu.at(n + 1) / (n + 1)

        phi = DualSequence(phi_rule, tail=_phi_tail_from_mu(tail),
                           vectorized=True)
        return cls(mu, phi)

    @classmethod
    def from_mu_values(cls, values, tail: Optional[Tail] = None) -> "Derivation":
        """Finite table of mu values; defaults to a ZeroTail at the table end."""
        table = np.asarray(values, dtype=complex).ravel()
        if table.size and table[0] != 0:
            raise ValueError("mu_0 must be 0 for a derivation")
        if tail is None:
            tail = ZeroTail(table.size)
        seq = DualSequence.from_values(table, tail=tail)
        return cls.from_mu(seq.at, tail=tail)

    # -- evaluation ---------------------------------------------------------

    def monomial_probe(self, j: int, l: int = 0) -> complex:
        """D(t^j) evaluated at t^l, i.e. j * phi(t^{j+l-1}).

        Exact for arbitrarily large Python integer indices, which the
        non-compactness witness requires.
        """
        if j < 1:
            return 0j
        return j * self.phi.at(j + l - 1)

    def monomial_probes(self, upto: int, at: int = 0) -> np.ndarray:
        """D(t^k)(t^at) for k = 0..upto, batched through the phi route."""
        ks = np.arange(upto + 1)
        out = np.zeros(upto + 1, dtype=complex)
        out[1:] = ks[1:] * self.phi.bulk(ks[1:] + (at - 1))
        return out

    def apply(self, f: L1Element) -> DualSequence:
        """The functional D(f): its value at t^n is sum_k k a_k phi(t^{k+n-1})."""
        ks = [int(k) for k in f.support if k >= 1]
        weights = [k * f.coeffs[k] for k in ks]
        phi = self.phi

        def rule(n):
            if np.ndim(n):
                n_arr = np.asarray(n, dtype=np.int64)
                out = np.zeros(n_arr.shape, dtype=complex)
                for k, w in zip(ks, weights):
                    out += w * phi.bulk(n_arr + (k - 1))
                return out
            return sum((w * phi.at(n + k - 1) for k, w in zip(ks, weights)), 0j)

        if not ks:
            tail: Tail = ZeroTail(0)
        elif isinstance(phi.tail, ZeroTail):
            tail = ZeroTail(max(0, phi.tail.start + 1 - ks[0]))
        elif isinstance(phi.tail, ClosedForm):
            cert = phi.tail.certificate
            if isinstance(cert, Constant):
                total = cert.value * complex(sum(weights))
                start = max(0, cert.start + 1 - ks[0])
                tail = ClosedForm(Constant(total, start)) if total != 0 \
                    else ZeroTail(start)
            else:
                tail = ClosedForm()
        else:
            tail = UNDECLARED
        return DualSequence(rule, tail=tail, vectorized=True)

    # -- norm ---------------------------------------------------------------

    def norm(self, probe_depth: int) -> Tuple[float, Optional[float]]:
        """(lower bound, exact value or None) for the operator norm.

        The lower bound is max |mu_n| over 1 <= n <= probe_depth.  The exact
        entry is filled only when the declared tail certifies the supremum
        is attained inside the probe: a ZeroTail inside the probe, monotone
        decay starting inside it, or an eventually constant sequence.
        """
        if probe_depth < 1:
            raise ValueError("probe depth must be at least 1")
        validate_tail(self.mu, probe_depth, first_index=1)
        mags = np.abs(self.mu.values(probe_depth))
        lower = float(mags[1:].max(initial=0.0))
        self.norm_lower = max(self.norm_lower, lower)
        exact = None
        tail = self.mu.tail
        if isinstance(tail, ZeroTail) and tail.start <= probe_depth + 1:
            exact = lower
        elif isinstance(tail, ClosedForm):
            cert = tail.certificate
            if isinstance(cert, Decay) and cert.start <= probe_depth:
                exact = lower
            elif isinstance(cert, Constant) and cert.start <= probe_depth + 1:
                exact = max(lower, abs(cert.value))
        if exact is not None:
            self.norm_cache = exact
        return lower, exact

    # -- compactness --------------------------------------------------------

    def classify_compact(self, tol: float = 1e-9,
                         probe_depth: int = 256) -> "CompactnessVerdict":
        """Certificate-backed compactness verdict; never guesses from samples."""
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        validate_tail(self.mu, probe_depth, first_index=1)
        tail = self.mu.tail
        if isinstance(tail, ZeroTail):
            return CompactnessVerdict(
                verdict="compact", tolerance=tol, tail=tail,
                decay_from=tail.start,
                reason="mu vanishes identically beyond the declared index")
        if isinstance(tail, Undeclared):
            return CompactnessVerdict(
                verdict="inconclusive", tolerance=tol, tail=tail,
                reason="tail undeclared: membership in the space of "
                       "vanishing sequences is a tail property")
        cert = tail.certificate
        if cert is None:
            return CompactnessVerdict(
                verdict="inconclusive", tolerance=tol, tail=tail,
                reason="closed form carries no asymptotic certificate")
        if isinstance(cert, Decay):
            start = max(cert.start, 1)
            decay_from = self._first_below(tol, start)
            return CompactnessVerdict(
                verdict="compact", tolerance=tol, tail=tail,
                decay_from=decay_from,
                reason="declared monotone decay to zero")
        if isinstance(cert, Constant) and cert.value == 0:
            return CompactnessVerdict(
                verdict="compact", tolerance=tol, tail=tail,
                decay_from=cert.start, reason="eventually zero")
        bound = abs(cert.value) if isinstance(cert, Constant) else cert.bound
        start = max(cert.start, 1)
        cited = tuple(start + d for d in (0, 1, 7, 63, 10 ** 6))
        return CompactnessVerdict(
            verdict="noncompact", tolerance=tol, tail=tail,
            floor=bound, cited_indices=cited,
            reason="|mu| is bounded below along the whole tail")

    def _first_below(self, tol: float, start: int) -> Optional[int]:
        # monotone decay: doubling scan for the first index with |mu| < tol
        n = max(start, 1)
        while abs(self.mu.at(n)) >= tol:
            n *= 2
            if n > INDEX_CAP:
                return None
        return n

    # -- finite-rank approximation ------------------------------------------

    def truncate(self, k: int) -> Tuple["Derivation", float]:
        """Best rank-<=k tail cut: zero mu beyond index k.

        Returns (D_k, err) with err = sup_{n>k} |mu_n|, which by the
        isometry equals the operator-norm distance to the truncation.
        Requires a tail declaration that pins the tail supremum down.
        """
        if k < 1:
            raise ValueError("truncation index must be at least 1")
        head = self.mu.values(k)
        truncated = Derivation.from_mu_values(head, tail=ZeroTail(k + 1))
        tail = self.mu.tail
        if isinstance(tail, ZeroTail):
            upto = tail.start - 1
            err = 0.0 if upto <= k else float(
                np.abs(self.mu.bulk(np.arange(k + 1, upto + 1))).max())
            return truncated, err
        if isinstance(tail, ClosedForm):
            cert = tail.certificate
            if isinstance(cert, Decay):
                stop = max(k + 1, cert.start)
                err = float(np.abs(
                    self.mu.bulk(np.arange(k + 1, stop + 1))).max())
                return truncated, err
            if isinstance(cert, Constant):
                err = abs(cert.value)
                if cert.start > k + 1:
                    probe = np.abs(
                        self.mu.bulk(np.arange(k + 1, cert.start)))
                    err = max(err, float(probe.max(initial=0.0)))
                return truncated, err
        raise TailUnknownError(
            "truncation error needs a declared tail (zero, decay, or "
            "eventually constant)")

    # -- non-compactness witness ----------------------------------------------

    def witness(self, epsilon: float, max_terms: int,
                growth_constant: float = 1000.0) -> "WitnessReport":
        """Constructive proof that D is not compact.

        Produces monomial exponents j_1 < j_2 < ... whose images under D
        are pairwise separated by more than epsilon/4, each separation
        re-checked by direct evaluation at the paired probe exponent
        l_k.  Step k picks an index N with |mu_N| > epsilon beyond
        growth_constant/epsilon times j_{k-1}, splits it as
        l_k = floor(N/2), j_k = N - l_k, and verifies the claimed
        inequalities numerically instead of trusting the constants.
        """
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if max_terms < 1:
            raise ValueError("at least one witness term is required")
        js: list[int] = []
        ls: list[int] = []
        ns: list[int] = []
        diagonal: list[float] = []
        gaps: list[tuple[int, int, float]] = []

        def partial():
            return self._witness_report(epsilon, growth_constant, js, ls, ns,
                                        diagonal, gaps)

        j_prev = 1  # seed: the induction needs a positive starting exponent
        for _ in range(max_terms):
            bound = growth_constant / epsilon * j_prev
            if bound >= INDEX_CAP:
                raise IndexOverflowError(
                    f"next admissible index must exceed {bound:.3e}, beyond "
                    f"the supported index range", partial=partial())
            n_found = self._scan_admissible(epsilon, math.floor(bound) + 1)
            if n_found is None:
                raise NoAdmissibleIndexError(
                    f"no index N > {math.floor(bound)} with |mu_N| > "
                    f"{epsilon} was found", partial=partial())
            l_k = n_found // 2
            j_k = n_found - l_k
            diag = abs(self.monomial_probe(j_k, l_k))
            if not diag > epsilon / 3:
                raise WitnessVerificationError(
                    f"diagonal probe {diag:.6e} at (j, l) = ({j_k}, {l_k}) "
                    f"is not above epsilon/3 = {epsilon / 3:.6e}")
            for idx, j_i in enumerate(js):
                gap = abs(self.monomial_probe(j_i, l_k)
                          - self.monomial_probe(j_k, l_k))
                if not gap > epsilon / 4:
                    raise WitnessVerificationError(
                        f"pair ({j_i}, {j_k}) probed at l = {l_k} has gap "
                        f"{gap:.6e}, not above epsilon/4 = {epsilon / 4:.6e}")
                gaps.append((idx, len(js), gap))
            js.append(j_k)
            ls.append(l_k)
            ns.append(n_found)
            diagonal.append(diag)
            j_prev = j_k
        return partial()

    def _scan_admissible(self, epsilon: float, lb: int) -> Optional[int]:
        # step-doubling scan upward from the lower bound, capped hard;
        # admissible indices recur geometrically for every catalogued rule,
        # so the scan is cheap
        if isinstance(self.mu.tail, ZeroTail) and lb >= self.mu.tail.start:
            return None
        offset = 0
        while True:
            n = lb + offset
            if n > INDEX_CAP:
                return None
            if isinstance(self.mu.tail, ZeroTail) and n >= self.mu.tail.start:
                return None
            if abs(self.mu.at(n)) > epsilon:
                return n
            offset = 1 if offset == 0 else offset * 2

    def _witness_report(self, epsilon, growth_constant, js, ls, ns,
                        diagonal, gaps) -> "WitnessReport":
        separation = min((g for *_, g in gaps), default=0.0)
        return WitnessReport(
            epsilon=epsilon, growth_constant=growth_constant,
            j=tuple(js), l=tuple(ls), chosen_indices=tuple(ns),
            diagonal=tuple(diagonal),
            gaps=tuple(gaps), separation=separation)

    def __repr__(self):
        return f"Derivation(mu_tail={self.mu.tail!r})"


def _accepts_arrays(rule: Callable) -> bool:
    probe = np.arange(1, 3)
    try:
        out = np.asarray(rule(probe), dtype=complex)
    except Exception:
        return False
    return out.shape == probe.shape


# ---------------------------------------------------------------------------
# result records
# ---------------------------------------------------------------------------

@dataclass
class CompactnessVerdict:
    """Outcome of the compactness test, with re-checkable evidence.

    For a compact verdict the evidence is the tail declaration plus the
    first index where |mu| drops below the tolerance; for a non-compact
    verdict it is a floor and a citation of indices where |mu| stays above
    it; an inconclusive verdict records why no honest answer exists.
    """

    verdict: str
    tolerance: float
    tail: Tail
    decay_from: Optional[int] = None
    floor: Optional[float] = None
    cited_indices: Tuple[int, ...] = ()
    reason: str = ""

    def recheck(self, deriv: Derivation, atol: float = 1e-9) -> bool:
        """Re-evaluate mu at the cited indices and confirm the evidence."""
        if self.verdict == "noncompact":
            return all(abs(deriv.mu.at(n)) >= self.floor - atol
                       for n in self.cited_indices)
        if self.verdict == "compact":
            if self.decay_from is None:
                return True
            probes = [self.decay_from, self.decay_from + 1,
                      self.decay_from + 8]
            return all(abs(deriv.mu.at(n)) < self.tolerance + atol
                       for n in probes)
        return True

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "tail": tail_to_dict(self.tail),
            "decay_from": self.decay_from,
            "floor": self.floor,
            "cited_indices": list(self.cited_indices),
            "reason": self.reason,
        }


@dataclass
class WitnessReport:
    """Self-certifying record of a non-compactness witness.

    ``j`` are the chosen monomial exponents, ``l`` the paired probe
    exponents, ``chosen_indices`` the admissible indices N = j_k + l_k.
    ``gaps`` holds (i, k, value) with value =
    |D(t^{j_i})(t^{l_k}) - D(t^{j_k})(t^{l_k})| for i < k, every one of
    which exceeded epsilon/4 when the report was built; ``separation`` is
    their minimum, a certified lower bound on the pairwise distances
    between the functionals D(t^{j_i}).
    """

    epsilon: float
    growth_constant: float
    j: Tuple[int, ...]
    l: Tuple[int, ...]
    chosen_indices: Tuple[int, ...]
    diagonal: Tuple[float, ...]
    gaps: Tuple[Tuple[int, int, float], ...] = field(default_factory=tuple)
    separation: float = 0.0

    def recheck(self, deriv: Derivation, atol: float = 1e-12) -> bool:
        """Re-evaluate every cited probe against its claimed inequality."""
        if list(self.j) != sorted(set(self.j)):
            return False
        for j_k, l_k, diag in zip(self.j, self.l, self.diagonal):
            value = abs(deriv.monomial_probe(j_k, l_k))
            if abs(value - diag) > atol or not value > self.epsilon / 3:
                return False
        for i, k, gap in self.gaps:
            value = abs(deriv.monomial_probe(self.j[i], self.l[k])
                        - deriv.monomial_probe(self.j[k], self.l[k]))
            if abs(value - gap) > atol or not value > self.epsilon / 4:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "growth_constant": self.growth_constant,
            "j": list(self.j),
            "l": list(self.l),
            "chosen_indices": list(self.chosen_indices),
            "diagonal": list(self.diagonal),
            "gaps": [[i, k, g] for i, k, g in self.gaps],
            "separation": self.separation,
        }
