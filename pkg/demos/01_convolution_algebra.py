#!/usr/bin/env python3
"""Tour of the convolution algebra: elements, products, functionals, actions.

Elements are finitely supported coefficient sequences multiplied by Cauchy
product; functionals are value rules on the monomial basis with declared
tails.  Everything printed here is recomputed live.
"""

import numpy as np

import convderiv as cd

print("== elements and products ==")
t = cd.monomial(1)
p = cd.L1Element([1, 1])           # 1 + t
print("t * t        =", cd.convolve(t, t))
print("(1+t)^2      =", cd.convolve(p, p))
print("unit acts trivially:", cd.convolve(cd.one(), p) == p)

print()
print("== the l1 norm is submultiplicative ==")
rng = np.random.default_rng(0)
a = cd.L1Element(rng.standard_normal(6))
b = cd.L1Element(rng.standard_normal(6))
print(f"|ab| = {cd.l1_norm(cd.convolve(a, b)):.6f}  <=  "
      f"|a||b| = {cd.l1_norm(a) * cd.l1_norm(b):.6f}")

print()
print("== functionals and the dual pairing ==")
harmonic = cd.DualSequence(lambda n: 1.0 / (n + 1), tail=cd.ClosedForm())
print("phi(t^n) = 1/(n+1) paired with t^2:", cd.pair(harmonic, cd.monomial(2)))
ones = cd.DualSequence.constant(1.0)
print("phi = 1 paired with 1 + t + t^2:",
      cd.pair(ones, cd.L1Element([1, 1, 1])))

print()
print("== the module action is the weighted shift ==")
table = cd.DualSequence.from_values([10, 20, 30, 40], tail=cd.ZeroTail(4))
shifted = cd.act_on_dual(t, table)
print("values of psi:       ", [table.at(n).real for n in range(4)])
print("values of t . psi:   ", [shifted.at(n).real for n in range(4)])

print()
print("== pairing compatibility: (a.psi)(b) == psi(b a) ==")
lhs = cd.pair(cd.act_on_dual(a, harmonic), b)
rhs = cd.pair(harmonic, cd.convolve(b, a))
print(f"lhs = {lhs:.12f}")
print(f"rhs = {rhs:.12f}")
print("agreement:", abs(lhs - rhs) < 1e-12)

print()
print("== tails are honest: tables refuse to extrapolate ==")
short = cd.DualSequence.from_values([1, 2, 3])
try:
    short.at(10)
except cd.UndeclaredTailError as exc:
    print("reading past an undeclared table:", exc)
