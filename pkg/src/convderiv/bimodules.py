"""Finite-dimensional commutative algebras, bimodules, and derivation transfer.

Algebras are given by structure constants c[i, j, k] (the e_k coefficient of
e_i e_j), modules by action tensors over (algebra basis x module basis x
module basis).  Coordinates carry the l1 norm, duals the sup norm.  The
point of the module is to instantiate, at finite dimension, the passage
from a non-zero derivation into a symmetric bimodule to a non-zero
derivation into the dual of the algebra: compose with the module
homomorphism x |-> lambda((.) x) induced by a functional that pairs
non-degenerately with a chosen a0 . D(a0).  Rank never increases under the
composition, and boundedness transfers with the product of operator norms.
(Weak compactness collapses onto norm compactness in finite dimension, so
only the bounded-transfer inequality carries content here.)
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class NotOutsideSquareError(ValueError):
    """The chosen element lies in the span of products; no rank-one
    non-inner derivation can be anchored at it."""


class NotSymmetricError(ValueError):
    """The construction requires a symmetric bimodule."""


class NoSuchElementError(RuntimeError):
    """No probed element had a non-vanishing image of its square."""


@dataclass
class FiniteMap:
    """Linear map between coordinate spaces; column s is the image of e_s."""

    matrix: np.ndarray
    source: str = "A"
    target: str = "A*"

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)

    @property
    def rank(self) -> int:
        return matrix_rank(self.matrix)

    def __call__(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(vec, dtype=complex)


class FiniteAlgebra:
    """Commutative associative algebra from structure constants.

    Commutativity must hold exactly; associativity is checked to ``atol``
    across all basis triples.
    """

    def __init__(self, structure, atol: float = 1e-12):
        c = np.asarray(structure, dtype=complex)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError("structure constants must form a (d, d, d) array")
        if not np.array_equal(c, c.transpose(1, 0, 2)):
            raise ValueError("structure constants are not commutative")
        lhs = np.einsum("ijm,mkl->ijkl", c, c)
        rhs = np.einsum("jkm,iml->ijkl", c, c)
        defect = float(np.abs(lhs - rhs).max(initial=0.0))
        if defect > atol:
            raise ValueError(f"associativity defect {defect:.3e} exceeds "
                             f"{atol:.1e}")
        self.structure = c
        self.structure.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def multiply(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(a, dtype=complex),
                         np.asarray(b, dtype=complex), self.structure)

    def multiplication_matrix(self, a) -> np.ndarray:
        """Matrix of x |-> a x on coordinates."""
        return np.einsum("i,ijk->kj", np.asarray(a, dtype=complex),
                         self.structure)

    def self_bimodule(self) -> "FiniteBimodule":
        """The algebra acting on itself by multiplication (symmetric)."""
        action = self.structure
        return FiniteBimodule(self, action, action)

    def __repr__(self):
        return f"FiniteAlgebra(dim={self.dim})"


class FiniteBimodule:
    """Two action tensors over a finite algebra, validated on basis triples.

    left[i, x, y] is the f_y coefficient of e_i . f_x, and right[i, x, y]
    that of f_x . e_i.  ``symmetric`` records exact equality of the two.
    """

    def __init__(self, algebra: FiniteAlgebra, left, right, atol: float = 1e-12):
        L = np.asarray(left, dtype=complex)
        R = np.asarray(right, dtype=complex)
        d, c = algebra.dim, algebra.structure
        if L.shape != R.shape or L.ndim != 3 or L.shape[0] != d \
                or L.shape[1] != L.shape[2]:
            raise ValueError("action tensors must have shape (dim_A, m, m)")
        checks = (
            np.einsum("jxy,iyz->ijxz", L, L) - np.einsum("ijm,mxz->ijxz", c, L),
            np.einsum("ixy,jyz->ijxz", R, R) - np.einsum("ijm,mxz->ijxz", c, R),
            np.einsum("jxy,iyz->ijxz", R, L) - np.einsum("ixy,jyz->ijxz", L, R),
        )
        defect = max(float(np.abs(t).max(initial=0.0)) for t in checks)
        if defect > atol:
            raise ValueError(f"bimodule axiom defect {defect:.3e} exceeds "
                             f"{atol:.1e}")
        self.algebra = algebra
        self.left = L
        self.right = R
        self.symmetric = bool(np.array_equal(L, R))
        self.left.setflags(write=False)
        self.right.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.left.shape[1]

    def act_left(self, a, x) -> np.ndarray:
        return np.einsum("i,x,ixy->y", np.asarray(a, dtype=complex),
                         np.asarray(x, dtype=complex), self.left)

    def act_right(self, x, a) -> np.ndarray:
        return np.einsum("i,x,ixy->y", np.asarray(a, dtype=complex),
                         np.asarray(x, dtype=complex), self.right)

    def dual(self) -> "FiniteBimodule":
        """Dual module: (a.psi)(x) = psi(x.a) and (psi.a)(x) = psi(a.x).

        The dual actions are the module-index transposes of the swapped
        originals, so the dual of a symmetric module is symmetric.
        """
        dual_left = self.right.transpose(0, 2, 1)
        dual_right = self.left.transpose(0, 2, 1)
        return FiniteBimodule(self.algebra, dual_left, dual_right)

    def __repr__(self):
        return (f"FiniteBimodule(dim={self.dim}, "
                f"symmetric={self.symmetric})")


def dual_module(E: FiniteBimodule) -> FiniteBimodule:
    return E.dual()


def matrix_rank(M: np.ndarray, rel_threshold: float = 1e-9) -> int:
    """Numerical rank: singular values above rel_threshold of the largest."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_threshold * s[0]))


def opnorm_l1_to_l1(M: np.ndarray) -> float:
    """Operator norm for l1 -> l1 coordinates: max column sum of moduli."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0.0
    return float(np.abs(M).sum(axis=0).max())


def opnorm_l1_to_sup(M: np.ndarray) -> float:
    """Operator norm for l1 -> sup coordinates: largest entry modulus."""
    M = np.asarray(M, dtype=complex)
    return float(np.abs(M).max(initial=0.0))


def square_span(A: FiniteAlgebra, rel_threshold: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (rows) of the linear span of all products e_i e_j.

    Finite-dimensional subspaces are closed, so no topology is involved.
    """
    d = A.dim
    products = A.structure.reshape(d * d, d)
    if not products.any():
        return np.zeros((0, d), dtype=complex)
    u, s, vh = np.linalg.svd(products, full_matrices=False)
    keep = s > rel_threshold * s[0]
    return vh[keep]


def _project_onto_rows(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    if basis.shape[0] == 0:
        return np.zeros_like(v)
    return basis.T @ (basis.conj() @ v)


def derivation_defect(A: FiniteAlgebra, E: FiniteBimodule,
                      D: FiniteMap) -> float:
    """Largest coefficient violation of D(ab) = a.D(b) + D(a).b on basis pairs."""
    d = A.dim
    worst = 0.0
    for i in range(d):
        ei = np.eye(d, dtype=complex)[i]
        for j in range(d):
            ej = np.eye(d, dtype=complex)[j]
            lhs = D(A.multiply(ei, ej))
            rhs = E.act_left(ei, D(ej)) + E.act_right(D(ei), ej)
            worst = max(worst, float(np.abs(lhs - rhs).max(initial=0.0)))
    return worst


def rank_one_derivation(A: FiniteAlgebra, a0,
                        rel_tol: float = 1e-9) -> Tuple[FiniteMap, FiniteMap]:
    """Rank-one non-inner derivation anchored at an element off the product span.

    Solves the underdetermined system {lambda(v) = 0 on the product span,
    lambda(a0) = 1} by minimum-norm least squares and returns
    (lambda0, D) with D(a) = lambda0(a) lambda0.  Killing the product span
    makes both sides of the derivation identity vanish, and
    D(a0)(a0) = 1 while every inner derivation into the dual of a
    commutative algebra is zero, so D is not inner.
    """
    a0 = np.asarray(a0, dtype=complex)
    span = square_span(A)
    residual = a0 - _project_onto_rows(span, a0)
    scale = float(np.linalg.norm(a0))
    if scale == 0.0 or np.linalg.norm(residual) <= rel_tol * scale:
        raise NotOutsideSquareError(
            "anchor element lies in the span of products")
    constraints = np.vstack([span, a0[None, :]])
    rhs = np.zeros(constraints.shape[0], dtype=complex)
    rhs[-1] = 1.0
    lam = np.linalg.pinv(constraints) @ rhs
    lambda0 = FiniteMap(lam[None, :], source="A", target="C")
    D = FiniteMap(np.outer(lam, lam), source="A", target="A*")
    return lambda0, D


@dataclass
class InnerFit:
    """Least-squares fit of an inner derivation a |-> a.e - e.a to D.

    ``element`` is the minimiser, ``defect`` the residual map D - delta_e,
    ``residual`` its largest coefficient modulus, and ``solved`` whether
    that is below tolerance.  Over a symmetric module delta_e vanishes
    identically, so a solution exists exactly when D = 0.
    """

    element: np.ndarray
    defect: FiniteMap
    residual: float
    solved: bool


def is_inner(A: FiniteAlgebra, E: FiniteBimodule, D: FiniteMap,
             tol: float = 1e-9) -> InnerFit:
    d, m = A.dim, E.dim
    blocks = [E.left[i].T - E.right[i].T for i in range(d)]
    S = np.vstack(blocks)
    b = D.matrix.T.reshape(d * m)
    e, *_ = np.linalg.lstsq(S, b, rcond=None)
    delta = np.column_stack([blocks[i] @ e for i in range(d)])
    defect = FiniteMap(D.matrix - delta, source=D.source, target=D.target)
    residual = float(np.abs(defect.matrix).max(initial=0.0))
    return InnerFit(element=e, defect=defect, residual=residual,
                    solved=residual <= tol)


def dual_homomorphism(A: FiniteAlgebra, E: FiniteBimodule, lam,
                      atol: float = 1e-12) -> FiniteMap:
    """The module homomorphism E -> A* sending x to the functional
    a |-> lambda(a.x); defined for symmetric E.
    """
    if not E.symmetric:
        raise NotSymmetricError("the induced map into the dual needs a "
                                "symmetric module")
    lam = np.asarray(lam, dtype=complex)
    R = np.einsum("axy,y->ax", E.left, lam)
    # internal consistency: homomorphism identities on all basis pairs
    d, c = A.dim, A.structure
    worst = 0.0
    for i in range(d):
        ei = np.eye(d, dtype=complex)[i]
        for x in range(E.dim):
            fx = np.eye(E.dim, dtype=complex)[x]
            lhs = R @ E.act_left(ei, fx)
            rhs = np.einsum("ak,k->a", c[:, i, :], R @ fx)
            worst = max(worst, float(np.abs(lhs - rhs).max(initial=0.0)))
    if worst > atol:
        raise NotSymmetricError(
            f"homomorphism identity defect {worst:.3e}; module actions are "
            f"inconsistent with the algebra")
    return FiniteMap(R, source="E", target="A*")


def find_transfer_functional(A: FiniteAlgebra, E: FiniteBimodule, D: FiniteMap,
                             seed: int = 42, tol: float = 1e-9,
                             random_probes: int = 64):
    """Element a0 with D(a0^2) != 0 and a functional normalised against it.

    Scans basis vectors, then sums of basis pairs, then seeded random
    combinations, in that fixed order for reproducibility.  The returned
    functional lam satisfies lam(a0 . D(a0)) = 1 and is the minimum-norm
    such choice.  Requires the product span to be the whole algebra.
    """
    d = A.dim
    if square_span(A).shape[0] != d:
        raise ValueError("the product span must be the whole algebra for "
                         "the transfer construction")
    eye = np.eye(d, dtype=complex)
    candidates = [eye[i] for i in range(d)]
    candidates += [eye[i] + eye[j] for i in range(d) for j in range(i + 1, d)]
    rng = np.random.default_rng(seed)
    for _ in range(random_probes):
        candidates.append(rng.standard_normal(d) + 1j * rng.standard_normal(d))
    probes = 0
    for a0 in candidates:
        probes += 1
        image = D(A.multiply(a0, a0))
        if float(np.abs(image).max(initial=0.0)) <= tol:
            continue
        w = E.act_left(a0, D(a0))
        half = 0.5 * image
        if float(np.abs(w - half).max(initial=0.0)) > 1e-8 * max(
                1.0, float(np.abs(half).max())):
            raise ValueError("a0 . D(a0) != D(a0^2)/2: the supplied map is "
                             "not a derivation into a symmetric module")
        lam = w.conj() / float(np.vdot(w, w).real)
        return a0, lam
    raise NoSuchElementError(
        f"D vanished on the squares of all {probes} probed elements")


def transfer(D: FiniteMap, lam, A: FiniteAlgebra, E: FiniteBimodule,
             atol: float = 1e-10) -> FiniteMap:
    """Compose D with the induced homomorphism into the dual.

    The result is again a derivation (checked on all basis pairs), its
    rank never exceeds rank(D), and its operator norm is at most the
    product of the factors' norms in the declared coordinate norms.
    """
    R = dual_homomorphism(A, E, lam)
    composed = FiniteMap(R.matrix @ D.matrix, source=D.source, target="A*")
    dual_of_A = A.self_bimodule().dual()
    defect = derivation_defect(A, dual_of_A, composed)
    if defect > atol:
        raise ValueError(f"transferred map violates the derivation identity "
                         f"by {defect:.3e}")
    return composed


# ---------------------------------------------------------------------------
# example algebras and serialisation
# ---------------------------------------------------------------------------

_TRUNC_RE = re.compile(r"^trunc(\d+)$")


def truncated_polynomials(order: int) -> FiniteAlgebra:
    """The polynomials modulo t^order, basis 1, t, ..., t^{order-1}."""
    if order < 1:
        raise ValueError("order must be at least 1")
    c = np.zeros((order, order, order), dtype=complex)
    for i in range(order):
        for j in range(order):
            if i + j < order:
                c[i, j, i + j] = 1.0
    return FiniteAlgebra(c)


def zero_product_algebra(dim: int) -> FiniteAlgebra:
    return FiniteAlgebra(np.zeros((dim, dim, dim), dtype=complex))


def derivative_map(A: FiniteAlgebra) -> FiniteMap:
    """d/dt on a truncated polynomial algebra: e_k |-> k e_{k-1}."""
    d = A.dim
    M = np.zeros((d, d), dtype=complex)
    for s in range(1, d):
        M[s - 1, s] = s
    return FiniteMap(M, source="A", target="E")


def algebra_catalog(name: str) -> FiniteAlgebra:
    """Built-in examples: zero2, nil1, and truncK for K >= 1."""
    if name == "zero2":
        return zero_product_algebra(2)
    if name == "nil1":
        return zero_product_algebra(1)
    match = _TRUNC_RE.match(name)
    if match:
        return truncated_polynomials(int(match.group(1)))
    raise KeyError(f"unknown algebra {name!r}; available: zero2, nil1, "
                   f"truncK")


def _as_complex(entry) -> complex:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise ValueError("complex entries are [re, im] pairs")
        return complex(float(entry[0]), float(entry[1]))
    return complex(entry)


def algebra_from_dict(payload: dict) -> FiniteAlgebra:
    """Structure constants from {"dim": d, "c": nested array}."""
    d = int(payload["dim"])
    raw = payload["c"]
    c = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                c[i, j, k] = _as_complex(raw[i][j][k])
    return FiniteAlgebra(c)


def algebra_from_file(path: str) -> FiniteAlgebra:
    with open(path, "r", encoding="utf-8") as handle:
        return algebra_from_dict(json.load(handle))
