"""Complex Bergman kernels and the three bicomplex kernels K, K~ and K^.

Every complex kernel exposes ``features(nodes)`` besides plain evaluation.
It returns ``(L, R)`` with

    conj(k(x_i, w)) = sum_n L[i, n] * R(w)[..., n]

for the quadrature nodes ``x_i``.  ``L = None`` stands for the identity.
Projections use this factorisation to integrate against a kernel without
materialising the full node-by-point kernel matrix more than once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .algebra import BiComplex
from .errors import IllConditioned, OutsideDomain
from .fields import ExpansionField, Slot, family
from .quadrature import Disk, ProductDomain, Rectangle, build_rule

COND_LIMIT = 1e12
# points closer than this (relative) to a disk boundary are rejected
BOUNDARY_RTOL = 1e-12
DEFAULT_BASIS_SIZE = 30


class ComplexKernel:
    domain = None
    provenance = ""

    def __call__(self, z, w):
        raise NotImplementedError

    def features(self, nodes):
        raise NotImplementedError


class DiskKernel(ComplexKernel):
    """Closed-form Bergman kernel of a disk, ``R^2 / (pi (R^2 - (z-c) conj(w-c))^2)``."""

    provenance = "closed_form_disk"

    def __init__(self, domain: Disk = Disk()):
        if not isinstance(domain, Disk):
            raise TypeError("DiskKernel needs a Disk domain")
        self.domain = domain

    def _check(self, z):
        d = self.domain
        if np.any(np.abs(np.asarray(z) - d.center) >= d.radius * (1 - BOUNDARY_RTOL)):
            raise OutsideDomain(f"point outside the disk |z - {d.center}| < {d.radius}")

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        self._check(z)
        self._check(w)
        c, r2 = self.domain.center, self.domain.radius**2
        return r2 / (math.pi * (r2 - (z - c) * np.conj(w - c)) ** 2)

    def features(self, nodes):
        nodes = np.asarray(nodes, dtype=complex)
        return None, lambda w: np.conj(self(nodes, np.asarray(w, dtype=complex)[..., None]))

    def __repr__(self):
        return f"DiskKernel({self.domain})"


def disk_kernel(z, w):
    """Bergman kernel of the unit disk, ``1 / (pi (1 - z conj(w))^2)``."""
    val = _UNIT_DISK_KERNEL(z, w)
    return complex(val) if np.ndim(val) == 0 else val


_UNIT_DISK_KERNEL = DiskKernel(Disk())


def _scale(dom):
    if isinstance(dom, Disk):
        return dom.center, dom.radius
    lo, hi = dom.bounding_box()
    return 0.5 * (lo + hi), 0.5 * abs(hi - lo)


class BasisKernel(ComplexKernel):
    """Truncated kernel ``sum_{n<N} phi_n(z) conj(phi_n(w))``.

    The ``phi_n`` are the monomials in ``t = (z - c)/s`` orthonormalised
    against area measure on the domain: the Gram matrix is computed with
    a quadrature rule of order ``2N``, scaled to unit diagonal and
    factorised by Cholesky with symmetric pivoting.
    """

    def __init__(self, domain, n: int):
        if n < 1:
            raise ValueError("basis size must be >= 1")
        self.domain = domain
        self.n = n
        self.provenance = f"basis_truncated({n})"
        self.center, self.scale = _scale(domain)
        rule = build_rule(domain, max(2 * n, 8))
        mono = self._monomials(rule.nodes)
        gram = (mono * rule.weights[:, None]).T @ mono.conj()
        d = 1.0 / np.sqrt(np.diag(gram).real)
        gs = d[:, None] * gram * d[None, :]
        ev = np.linalg.eigvalsh(gs)
        cond = ev[-1] / ev[0] if ev[0] > 0 else np.inf
        if cond > COND_LIMIT:
            raise IllConditioned(
                f"Gram condition {cond:.3e} exceeds {COND_LIMIT:.0e} at N={n}",
                _largest_stable(gs),
            )
        chol, piv, rank, info = lapack.zpstrf(gs, lower=1)
        if info < 0 or rank < n:
            raise IllConditioned(f"Gram matrix is numerically singular at N={n}", _largest_stable(gs))
        self._chol = np.tril(chol)
        self._perm = piv - 1
        self._diag = d
        self._refine = None
        self._memo = []
        # second pass: re-orthonormalise the computed basis once more
        phi = self._basis(rule.nodes)
        g2 = (phi * rule.weights[:, None]).T @ phi.conj()
        self._refine = np.linalg.cholesky(g2)

    def _monomials(self, z):
        t = (np.asarray(z, dtype=complex) - self.center) / self.scale
        out = np.empty(t.shape + (self.n,), dtype=complex)
        out[..., 0] = 1.0
        if self.n > 1:
            out[..., 1:] = t[..., None]
            np.cumprod(out[..., 1:], axis=-1, out=out[..., 1:])
        return out

    def basis(self, z):
        """Orthonormal basis values, shape ``z.shape + (N,)``."""
        # quadrature node arrays come back repeatedly; remember the last few
        if isinstance(z, np.ndarray) and z.size >= 256:
            for arr, phi in self._memo:
                if arr is z:
                    return phi
            phi = self._basis(z)
            self._memo = (self._memo + [(z, phi)])[-4:]
            return phi
        return self._basis(z)

    def _basis(self, z):
        z = np.asarray(z, dtype=complex)
        m = (self._monomials(z) * self._diag)[..., self._perm]
        flat = m.reshape(-1, self.n)
        phi = solve_triangular(self._chol, flat.T, lower=True)
        if self._refine is not None:
            phi = solve_triangular(self._refine, phi, lower=True)
        phi = phi.T
        return phi.reshape(z.shape + (self.n,))

    def __call__(self, z, w):
        pz = self.basis(z)
        pw = self.basis(w)
        return np.einsum("...n,...n->...", pz, pw.conj())

    def features(self, nodes):
        return self.basis(nodes).conj(), self.basis

    def __repr__(self):
        return f"BasisKernel({self.domain}, N={self.n})"


def _largest_stable(gs):
    for m in range(gs.shape[0], 0, -1):
        ev = np.linalg.eigvalsh(gs[:m, :m])
        if ev[0] > 0 and ev[-1] / ev[0] <= COND_LIMIT:
            return m
    return 0


def basis_kernel(dom, n: int) -> BasisKernel:
    return BasisKernel(dom, n)


def planar_kernel(dom, n: int | None = None) -> ComplexKernel:
    """Closed form on disks, truncated basis otherwise (or whenever ``n`` is given)."""
    if n is None and isinstance(dom, Disk):
        return DiskKernel(dom)
    n = DEFAULT_BASIS_SIZE if n is None else n
    try:
        return BasisKernel(dom, n)
    except IllConditioned as exc:
        return BasisKernel(dom, exc.largest_stable_n)


class ConstantFactor(ComplexKernel):
    provenance = "constant"

    def __init__(self, value):
        self.value = complex(value)

    def __call__(self, z, w):
        return np.full(np.broadcast(np.asarray(z), np.asarray(w)).shape, self.value)

    def features(self, nodes):
        ones = np.ones((len(nodes), 1), dtype=complex)
        return ones, lambda w: np.full(np.shape(w) + (1,), np.conj(self.value))

    def __repr__(self):
        return f"ConstantFactor({self.value})"


class ConjugatedArgs(ComplexKernel):
    """``(z, w) -> k(conj z, conj w)``; the arguments must stay in k's domain."""

    def __init__(self, inner: ComplexKernel):
        self.inner = inner
        self.domain = inner.domain
        self.provenance = f"conj({inner.provenance})"

    def _check(self, z):
        lo, hi = self.domain.bounding_box()
        slack = 1e-12 * (1 + abs(hi - lo))
        if not np.all(self.domain.contains(np.conj(z), margin=-slack)):
            raise OutsideDomain("conjugated argument leaves the kernel's domain")

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        self._check(z)
        self._check(w)
        return self.inner(np.conj(z), np.conj(w))

    def features(self, nodes):
        nodes = np.asarray(nodes, dtype=complex)
        self._check(nodes)
        left, right = self.inner.features(np.conj(nodes))
        return left, lambda w: right(np.conj(np.asarray(w, dtype=complex)))

    def __repr__(self):
        return f"ConjugatedArgs({self.inner!r})"


KERNEL_KINDS = ("bergman", "tilde", "hat")


@dataclass(frozen=True, eq=False)
class BCKernel:
    """Bicomplex kernel whose slot ``s`` is ``A_s(z1, w1) * B_s(z2, w2)``.

    ``slots`` holds the two ``(A_s, B_s)`` factor pairs; ``z1, z2`` and
    ``w1, w2`` are idempotent coefficients of Z and W.
    """

    kind: str
    domain: ProductDomain
    slots: tuple

    def values(self, z1, z2, w1, w2):
        """Vectorised slot values; arguments broadcast together."""
        out = []
        for a, b in self.slots:
            out.append(a(z1, w1) * b(z2, w2))
        return tuple(out)

    def eval(self, z: BiComplex, w: BiComplex) -> BiComplex:
        k1, k2 = self.values(z.b1, z.b2, w.b1, w.b2)
        return BiComplex(complex(k1), complex(k2))

    __call__ = eval

    def section(self, w: BiComplex) -> ExpansionField:
        """The field ``Z -> K(Z, W)`` as a rank-one separated expansion."""
        one = np.ones((1, 1), dtype=complex)
        slots = []
        for a, b in self.slots:
            slots.append(Slot(family(lambda z, a=a: a(z, w.b1)), one,
                              family(lambda z, b=b: b(z, w.b2))))
        return ExpansionField(slots, label=f"K_{self.kind}(., W)")


def bc_bergman_kernel(dom: ProductDomain, k1: ComplexKernel, k2: ComplexKernel) -> BCKernel:
    """``K(Z, W) = k1(z1, w1)/|Omega2| e + k2(z2, w2)/|Omega1| e†``."""
    return BCKernel("bergman", dom, (
        (k1, ConstantFactor(1.0 / dom.omega2.area())),
        (ConstantFactor(1.0 / dom.omega1.area()), k2),
    ))


def tilde_kernel(dom: ProductDomain, k1: ComplexKernel, k2: ComplexKernel) -> BCKernel:
    """``k1(z1, w1) k2(z2, w2)`` in both slots: the kernel of A²_{*,-}."""
    return BCKernel("tilde", dom, ((k1, k2), (k1, k2)))


def hat_kernel(dom: ProductDomain, k1: ComplexKernel, k2: ComplexKernel) -> BCKernel:
    """Kernel of A²_{*,†}.

    ``k^(z1, conj z2, w1, conj w2) e + k^(conj z1, z2, conj w1, w2) e†``
    with the product kernel ``k^ = k1 k2`` of ``Omega1 x conj(Omega2)``.
    Both planar domains must be symmetric under complex conjugation.
    """
    for om in (dom.omega1, dom.omega2):
        if not om.is_conjugation_symmetric():
            raise OutsideDomain(f"{om} is not symmetric under conjugation")
    return BCKernel("hat", dom, (
        (k1, ConjugatedArgs(k2)),
        (ConjugatedArgs(k1), k2),
    ))


def make_kernel(kind: str, dom: ProductDomain, n: int | None = None) -> BCKernel:
    """Kernel of the given kind with default planar kernels for ``dom``."""
    if kind not in KERNEL_KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {KERNEL_KINDS}")
    k1 = planar_kernel(dom.omega1, n)
    k2 = planar_kernel(dom.omega2, n)
    build = {"bergman": bc_bergman_kernel, "tilde": tilde_kernel, "hat": hat_kernel}[kind]
    return build(dom, k1, k2)
