"""Tensor plumbing: the linearization convention, unfoldings, Kronecker algebra.

Everything downstream rests on one fact: with the first axis varying
slowest, the vectorization of an outer product is the ascending-order
Kronecker product of its factors.  This script shows that identity and the
unfolding bookkeeping around it.
"""

import numpy as np

import tensorspaces as ts

rng = np.random.default_rng(0)

# A tiny order-3 tensor and its unfoldings.
t = np.arange(24.0).reshape(2, 3, 4)
print("tensor shape:", t.shape)
for axes in [(0,), (1,), (0, 2)]:
    m = ts.unfold(t, axes)
    print(f"unfold along {axes}: {m.shape[0]} x {m.shape[1]}")

# Folding inverts unfolding bit for bit.
m = ts.unfold(t, (0, 2))
print("roundtrip exact:", np.array_equal(ts.fold(m, (0, 2), t.shape), t))

# Rows and columns trade places when you unfold along the complement.
print("complement transpose:", np.array_equal(ts.unfold(t, (1,)), ts.unfold(t, (0, 2)).T))

# vec(outer(u, v, w)) == u (x) v (x) w under this linearization.
u, v, w = rng.standard_normal(2), rng.standard_normal(3), rng.standard_normal(4)
outer = np.einsum("i,j,k->ijk", u, v, w)
kron_vec = np.kron(np.kron(u, v), w)
print("outer-product vec equals ascending kron:",
      np.allclose(ts.vectorize(outer), kron_vec))

# The mixed-product identity that makes hierarchical bases composable:
# (A @ C) (x) (B @ D) == (A (x) B) @ (C (x) D).
A, B = rng.standard_normal((3, 2)), rng.standard_normal((4, 2))
C, D = rng.standard_normal((2, 5)), rng.standard_normal((2, 3))
lhs = ts.kron(A @ C, B @ D)
rhs = ts.kron(A, B) @ ts.kron(C, D)
print("mixed product max deviation:", np.max(np.abs(lhs - rhs)))

# Norms ride along unchanged through any reshuffling of the same data.
x = rng.standard_normal((4, 5, 3))
print("norm(t) == norm(unfold(t)) == norm(reshape(t)):",
      ts.frobenius_norm(x),
      ts.frobenius_norm(ts.unfold(x, (2,))),
      ts.frobenius_norm(ts.reshape(x, (60,))))
