"""Planar and product-type domains with their quadrature rules.

Integrals over a product-type domain ``Omega = Omega1 e + Omega2 e†`` use
the product area measure ``dA(b1) dA(b2)`` in the idempotent coordinates.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import BiComplex
from .errors import NonFiniteSample

# Grid chunks are kept below this many complex entries per slot.
CHUNK_ENTRIES = 1 << 21


@dataclass(frozen=True)
class Disk:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, z, margin=0.0):
        return np.abs(np.asarray(z) - self.center) < self.radius - margin

    def bounding_box(self):
        r = self.radius * (1 + 1j)
        return self.center - r, self.center + r

    def is_conjugation_symmetric(self) -> bool:
        return self.center.imag == 0.0

    def to_json(self):
        return {"disk": {"center": [self.center.real, self.center.imag], "radius": self.radius}}


@dataclass(frozen=True)
class Rectangle:
    lo: complex
    hi: complex

    def __post_init__(self):
        lo, hi = complex(self.lo), complex(self.hi)
        if not (hi.real > lo.real and hi.imag > lo.imag):
            raise ValueError("rectangle needs hi strictly above lo in both coordinates")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def area(self) -> float:
        d = self.hi - self.lo
        return d.real * d.imag

    def contains(self, z, margin=0.0):
        z = np.asarray(z)
        return (
            (z.real > self.lo.real + margin)
            & (z.real < self.hi.real - margin)
            & (z.imag > self.lo.imag + margin)
            & (z.imag < self.hi.imag - margin)
        )

    def bounding_box(self):
        return self.lo, self.hi

    def is_conjugation_symmetric(self) -> bool:
        return self.lo.imag == -self.hi.imag

    def to_json(self):
        return {"rectangle": {"lo": [self.lo.real, self.lo.imag], "hi": [self.hi.real, self.hi.imag]}}


PlanarDomain = Disk | Rectangle


def area(dom: PlanarDomain) -> float:
    return dom.area()


@dataclass(frozen=True)
class ProductDomain:
    omega1: PlanarDomain
    omega2: PlanarDomain

    def contains(self, z: BiComplex, margin=0.0) -> bool:
        return bool(self.omega1.contains(z.b1, margin) and self.omega2.contains(z.b2, margin))

    def to_json(self):
        return {"omega1": self.omega1.to_json(), "omega2": self.omega2.to_json()}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: PlanarDomain
    order: int

    def __len__(self):
        return len(self.nodes)


def build_rule(dom: PlanarDomain, order: int) -> QuadratureRule:
    """Tensor Gauss-Legendre rule on a rectangle, polar rule on a disk.

    The disk rule takes ``order`` Gauss-Legendre radii (weights carry the
    Jacobian r) and ``2*order`` equispaced angles.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    t, w = np.polynomial.legendre.leggauss(order)
    if isinstance(dom, Disk):
        r = 0.5 * dom.radius * (t + 1.0)
        wr = 0.5 * dom.radius * w * r
        n_ang = 2 * order
        phi = 2.0 * np.pi * np.arange(n_ang) / n_ang
        nodes = dom.center + (r[:, None] * np.exp(1j * phi)[None, :])
        weights = wr[:, None] * np.full(n_ang, 2.0 * np.pi / n_ang)[None, :]
    elif isinstance(dom, Rectangle):
        half = 0.5 * (dom.hi - dom.lo)
        mid = 0.5 * (dom.hi + dom.lo)
        xs = mid.real + half.real * t
        ys = mid.imag + half.imag * t
        nodes = xs[:, None] + 1j * ys[None, :]
        weights = (half.real * w)[:, None] * (half.imag * w)[None, :]
    else:
        raise TypeError(f"no quadrature builder for {type(dom).__name__}")
    return QuadratureRule(nodes.ravel(), weights.ravel(), dom, order)


def integrate_planar(rule: QuadratureRule, f) -> complex:
    vals = np.asarray(f(rule.nodes), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("integrand is not finite at some quadrature node")
    return complex(np.sum(rule.weights * vals))


def row_chunks(n_rows: int, n_cols: int):
    step = max(1, CHUNK_ENTRIES // max(n_cols, 1))
    for start in range(0, n_rows, step):
        yield slice(start, min(start + step, n_rows))


def integrate_bc(dom: ProductDomain, r1: QuadratureRule, r2: QuadratureRule, F) -> BiComplex:
    """Integral of a bicomplex field over ``Omega1 x Omega2``, slot by slot."""
    total = np.zeros(2, dtype=complex)
    for blk in row_chunks(len(r1), len(r2)):
        g1, g2 = F.grid(r1.nodes[blk], r2.nodes)
        for s, g in enumerate((g1, g2)):
            if not np.all(np.isfinite(g)):
                raise NonFiniteSample("integrand is not finite at some quadrature node")
            total[s] += r1.weights[blk] @ g @ r2.weights
    return BiComplex(total[0], total[1])


def planar_from_json(obj) -> PlanarDomain:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"planar domain must be a one-key object, got {obj!r}")
    (kind, desc), = obj.items()
    if kind == "disk":
        c = desc.get("center", [0.0, 0.0])
        return Disk(complex(c[0], c[1]), desc.get("radius", 1.0))
    if kind == "rectangle":
        lo, hi = desc["lo"], desc["hi"]
        return Rectangle(complex(lo[0], lo[1]), complex(hi[0], hi[1]))
    raise ValueError(f"unknown planar domain kind {kind!r}")


UNIT_BIDISK = ProductDomain(Disk(), Disk())


def domain_from_json(obj) -> tuple[ProductDomain, int | None]:
    """Parse a domain description; returns the domain and the optional order."""
    dom = ProductDomain(planar_from_json(obj["omega1"]), planar_from_json(obj["omega2"]))
    order = obj.get("order")
    return dom, (int(order) if order is not None else None)


def load_domain(source: str) -> tuple[ProductDomain, int | None]:
    """Load a domain description file; the name ``bidisk`` is the unit bidisk."""
    if source == "bidisk":
        return UNIT_BIDISK, None
    with open(Path(source)) as fh:
        return domain_from_json(json.load(fh))
