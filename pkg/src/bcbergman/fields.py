"""Bicomplex-valued fields, finite-difference operators and classification.

A field is evaluated on idempotent coordinates: ``F(b1, b2)`` returns the
pair ``(f1, f2)`` with ``F(b1 e + b2 e†) = f1 e + f2 e†``.  Arguments are
numpy arrays and broadcast against each other.

Two concrete representations exist:

* ``ScalarField`` wraps an arbitrary vectorised callable.
* ``ExpansionField`` stores each slot in separated form
  ``f_s(b1, b2) = u_s(b1) @ C_s @ v_s(b2)`` where ``u_s``/``v_s`` return
  feature vectors.  Product-type fields, the built-in polynomial test
  fields and every kernel projection use it, which keeps quadrature over
  ``Omega1 x Omega2`` at the cost of two one-dimensional sums.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import qmc

from .algebra import BiComplex, conj_coefficients, theta_coefficients
from .errors import EmptySampleSet, StepTooSmall

MIN_STEP = 1e-10
RICHARDSON_NOISE = 1e-10

DECLARED_CLASSES = (
    "generic_C1", "product_type", "bc_holomorphic",
    "ker_star", "ker_dagger", "ker_bar", "custom",
)


class Field:
    label = ""
    declared_class = "custom"

    def __call__(self, b1, b2):
        raise NotImplementedError

    def grid(self, x, y):
        """Slot values on the tensor grid ``x x y``, each of shape (len(x), len(y))."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        f1, f2 = self(x[:, None], y[None, :])
        shape = (len(x), len(y))
        return (np.broadcast_to(f1, shape).astype(complex),
                np.broadcast_to(f2, shape).astype(complex))

    def at(self, z: BiComplex) -> BiComplex:
        f1, f2 = self(np.asarray(z.b1), np.asarray(z.b2))
        return BiComplex(complex(f1), complex(f2))

    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return combine([(1.0, self), (-1.0, other)])

    def __rmul__(self, c):
        return combine([(c, self)])

    def __neg__(self):
        return combine([(-1.0, self)])


class ScalarField(Field):
    def __init__(self, fn, declared_class="custom", label=""):
        if declared_class not in DECLARED_CLASSES:
            raise ValueError(f"unknown declared class {declared_class!r}")
        self.fn = fn
        self.declared_class = declared_class
        self.label = label

    def __call__(self, b1, b2):
        b1 = np.asarray(b1, dtype=complex)
        b2 = np.asarray(b2, dtype=complex)
        f1, f2 = self.fn(b1, b2)
        return np.asarray(f1, dtype=complex), np.asarray(f2, dtype=complex)

    def __repr__(self):
        return f"ScalarField({self.label or self.fn!r})"


# Feature families: callables mapping an array of points to (..., rank).

def family(*fns) -> Callable:
    def evaluate(z):
        z = np.asarray(z, dtype=complex)
        return np.stack([np.broadcast_to(f(z), z.shape).astype(complex) for f in fns], axis=-1)

    evaluate.rank = len(fns)
    return evaluate


def ones_family(z):
    return np.ones(np.shape(z) + (1,), dtype=complex)


def concat_families(fams) -> Callable:
    if len(fams) == 1:
        return fams[0]
    return lambda z: np.concatenate([f(z) for f in fams], axis=-1)


def _one(z):
    return np.ones_like(z)


@dataclass
class Slot:
    u: Callable
    coef: np.ndarray
    v: Callable

    def __call__(self, b1, b2):
        left = self.u(b1) @ self.coef
        return np.einsum("...r,...r->...", left, self.v(b2))

    def grid(self, x, y):
        return (self.u(x) @ self.coef) @ self.v(y).T


class ExpansionField(Field):
    def __init__(self, slots, declared_class="custom", label=""):
        self.slots = tuple(slots)
        self.declared_class = declared_class
        self.label = label

    def __call__(self, b1, b2):
        b1 = np.asarray(b1, dtype=complex)
        b2 = np.asarray(b2, dtype=complex)
        return self.slots[0](b1, b2), self.slots[1](b1, b2)

    def grid(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return self.slots[0].grid(x, y), self.slots[1].grid(x, y)

    def __repr__(self):
        ranks = [s.coef.shape for s in self.slots]
        return f"ExpansionField({self.label!r}, ranks={ranks})"


def separable(terms1, terms2, declared_class="custom", label="") -> ExpansionField:
    """Field with slots ``sum_r g_r(b1) h_r(b2)`` from lists of ``(g, h)`` pairs."""
    slots = []
    for terms in (terms1, terms2):
        gs, hs = zip(*terms)
        slots.append(Slot(family(*gs), np.eye(len(gs), dtype=complex), family(*hs)))
    return ExpansionField(slots, declared_class, label)


class ProductTypeField(ExpansionField):
    """``b1 e + b2 e† -> h1(b1) e + h2(b2) e†``."""

    def __init__(self, h1, h2, declared_class="product_type", label=""):
        self.h1 = h1
        self.h2 = h2
        one = np.ones((1, 1), dtype=complex)
        super().__init__(
            [Slot(family(h1), one, ones_family), Slot(ones_family, one, family(h2))],
            declared_class, label,
        )


def product_type(h1, h2, label="") -> ProductTypeField:
    return ProductTypeField(h1, h2, label=label)


def combine(terms) -> Field:
    """Linear combination ``sum c_k F_k`` with bicomplex (or complex) weights."""
    terms = [(BiComplex.coerce(c), f) for c, f in terms]
    if all(isinstance(f, ExpansionField) for _, f in terms):
        slots = []
        for s in range(2):
            us = [f.slots[s].u for _, f in terms]
            vs = [f.slots[s].v for _, f in terms]
            coefs = [(c.b1 if s == 0 else c.b2) * f.slots[s].coef for c, f in terms]
            slots.append(Slot(concat_families(us), block_diag(*coefs), concat_families(vs)))
        return ExpansionField(slots)

    def fn(b1, b2):
        out1 = out2 = 0
        for c, f in terms:
            f1, f2 = f(b1, b2)
            out1 = out1 + c.b1 * f1
            out2 = out2 + c.b2 * f2
        return out1, out2

    return ScalarField(fn)


def precompose_conj(F: Field, kind: str) -> ScalarField:
    """``Z -> F(conj(Z, kind))``; the paired domain must be symmetric for ``kind``."""
    conj_coefficients(0j, 0j, kind)

    def fn(b1, b2):
        return F(*conj_coefficients(b1, b2, kind))

    return ScalarField(fn, label=f"{F.label}∘{kind}")


def postcompose_conj(F: Field, kind: str) -> ScalarField:
    conj_coefficients(0j, 0j, kind)

    def fn(b1, b2):
        return conj_coefficients(*F(b1, b2), kind)

    return ScalarField(fn, label=f"{kind}∘{F.label}")


def theta_conjugate(F: Field) -> ScalarField:
    """``theta ∘ F ∘ theta``: the C(j)-coefficient view of a field."""

    def fn(b1, b2):
        return theta_coefficients(*F(*theta_coefficients(b1, b2)))

    return ScalarField(fn, label=f"θ{F.label}θ")


# ---------------------------------------------------------------------------
# Differential operators

# Idempotent increments of b1, b2 for unit steps in x1, y1, x2, y2.
DIRECTIONS = ((1, 1), (1j, 1j), (-1j, 1j), (1, -1))
# Idempotent pairs of the units 1, i, j, k.
UNITS = ((1, 1), (1j, 1j), (-1j, 1j), (1, -1))
OPERATOR_SIGNS = {
    "z": (1, -1, -1, 1),
    "star": (1, 1, 1, 1),
    "dagger": (1, -1, 1, -1),
    "bar": (1, 1, -1, -1),
}
OPERATORS = tuple(OPERATOR_SIGNS)


@dataclass(frozen=True)
class OperatorResidual:
    d_z: BiComplex
    d_star: BiComplex
    d_dagger: BiComplex
    d_bar: BiComplex
    step: float

    def __getitem__(self, op):
        return getattr(self, f"d_{op}")


def default_step(b1, b2):
    return 1e-5 * (1.0 + np.maximum(np.abs(b1), np.abs(b2)))


def operator_arrays(F: Field, b1, b2, h):
    """Central-difference values of the four operators at many points.

    Returns ``{op: (slot1, slot2)}`` arrays shaped like ``b1``.
    """
    b1 = np.asarray(b1, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    h = np.asarray(h, dtype=float)
    if np.any(h < MIN_STEP):
        raise StepTooSmall(f"finite-difference step below {MIN_STEP}")
    partials = []
    for d1, d2 in DIRECTIONS:
        p1, p2 = F(b1 + h * d1, b2 + h * d2)
        m1, m2 = F(b1 - h * d1, b2 - h * d2)
        partials.append(((p1 - m1) / (2 * h), (p2 - m2) / (2 * h)))
    out = {}
    for op, signs in OPERATOR_SIGNS.items():
        slots = []
        for s in range(2):
            acc = sum(sign * unit[s] * part[s] for sign, unit, part in zip(signs, UNITS, partials))
            slots.append(0.25 * acc)
        out[op] = tuple(slots)
    return out


def eval_operators(F: Field, z: BiComplex, h: float | None = None) -> OperatorResidual:
    if h is None:
        h = float(default_step(z.b1, z.b2))
    vals = operator_arrays(F, np.asarray(z.b1), np.asarray(z.b2), h)
    res = {op: BiComplex(complex(v[0]), complex(v[1])) for op, v in vals.items()}
    return OperatorResidual(res["z"], res["star"], res["dagger"], res["bar"], float(h))


def richardson_ratios(F: Field, z: BiComplex, h: float = 1e-2) -> dict:
    """Successive-difference ratios of each operator estimate under step halving.

    For a second-order scheme the ratio tends to 4 (16 where the h² error
    terms cancel, as they do for Wirtinger combinations of holomorphic
    pieces).  When the second difference is already at rounding level
    the truncation error is below what can be measured and the ratio is
    reported as ``inf``.
    """
    est = [eval_operators(F, z, h / 2**n) for n in range(3)]
    out = {}
    for op in OPERATORS:
        d1 = (est[0][op] - est[1][op]).sup()
        d2 = (est[1][op] - est[2][op]).sup()
        noise = RICHARDSON_NOISE * (1.0 + est[2][op].sup())
        out[op] = np.inf if d2 <= noise else d1 / d2
    return out


# ---------------------------------------------------------------------------
# Classification

MEMBERSHIP_NAMES = ("ker_star", "ker_dagger", "ker_bar", "star_dagger", "star_bar", "dagger_bar", "hol")


def membership_vector(star: bool, dagger: bool, bar: bool) -> dict:
    return {
        "ker_star": star,
        "ker_dagger": dagger,
        "ker_bar": bar,
        "star_dagger": star and dagger,
        "star_bar": star and bar,
        "dagger_bar": dagger and bar,
        "hol": star and dagger and bar,
    }


@dataclass
class SpaceMembership:
    ker_star: bool
    ker_dagger: bool
    ker_bar: bool
    star_dagger: bool
    star_bar: bool
    dagger_bar: bool
    hol: bool
    max_residual: dict = dc_field(default_factory=dict)
    samples: int = 0

    def flags(self) -> dict:
        return {name: getattr(self, name) for name in MEMBERSHIP_NAMES}

    def to_json(self) -> dict:
        return {**self.flags(), "max_residual": dict(self.max_residual), "samples": self.samples}


def halton_points(dom, count: int, margin: float = 0.0, seed=None, shrink: float = 1.0):
    """Deterministic interior points of a product domain.

    Halton points on the bounding boxes of both planar projections, kept
    when both coordinates lie at least ``margin`` inside.  ``shrink`` < 1
    scales the accepted region about the box centre.  ``seed`` switches
    on Halton scrambling.
    """
    sampler = qmc.Halton(d=4, scramble=seed is not None, seed=seed)
    boxes = [dom.omega1.bounding_box(), dom.omega2.bounding_box()]
    kept1, kept2 = [], []
    have = 0
    for _ in range(64):
        u = sampler.random(max(4 * count, 16))
        coords = []
        for s, (lo, hi) in enumerate(boxes):
            c = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            re = c.real + shrink * half.real * (2 * u[:, 2 * s] - 1)
            im = c.imag + shrink * half.imag * (2 * u[:, 2 * s + 1] - 1)
            coords.append(re + 1j * im)
        ok = dom.omega1.contains(coords[0], margin) & dom.omega2.contains(coords[1], margin)
        if shrink < 1.0:
            ok &= _within_shrunk(dom.omega1, coords[0], shrink) & _within_shrunk(dom.omega2, coords[1], shrink)
        kept1.append(coords[0][ok])
        kept2.append(coords[1][ok])
        have += int(ok.sum())
        if have >= count:
            break
    b1 = np.concatenate(kept1)[:count]
    b2 = np.concatenate(kept2)[:count]
    if len(b1) == 0:
        raise EmptySampleSet("no interior sample point could be placed")
    return b1, b2


def _within_shrunk(dom, z, shrink):
    lo, hi = dom.bounding_box()
    c = 0.5 * (lo + hi)
    return dom.contains(c + (np.asarray(z) - c) / shrink)


def classify(F: Field, dom, sample_count: int = 32, h: float = 1e-4, tol: float = 1e-6,
             seed=None) -> SpaceMembership:
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    b1, b2 = halton_points(dom, sample_count, margin=2 * h, seed=seed)
    vals = operator_arrays(F, b1, b2, h)
    resid = {
        op: float(np.max(np.maximum(np.abs(v[0]), np.abs(v[1]))))
        for op, v in vals.items()
    }
    flags = membership_vector(resid["star"] < tol, resid["dagger"] < tol, resid["bar"] < tol)
    return SpaceMembership(**flags, max_residual=resid, samples=len(b1))


# ---------------------------------------------------------------------------
# Built-in test fields


@dataclass(frozen=True)
class BuiltinField:
    name: str
    field: Field
    truth: tuple  # (in Ker d/dZ*, in Ker d/dZ†, in Ker d/dZbar)
    description: str

    def membership(self) -> dict:
        return membership_vector(*self.truth)


def _c(value):
    return lambda z: np.full(np.shape(z), value, dtype=complex)


def _z(z):
    return z


def _zc(z):
    return np.conj(z)


def _pow(n):
    return lambda z: z**n


def _cpow(n):
    return lambda z: np.conj(z) ** n


def _abs2(z):
    return np.abs(z) ** 2


def _build_registry():
    reg = {}

    def add(name, fld, truth, description, declared="custom"):
        fld.label = name
        fld.declared_class = declared
        reg[name] = BuiltinField(name, fld, truth, description)

    hol = (True, True, True)
    add("constant", product_type(_c(1.0), _c(1.0)), hol, "Z -> 1", "bc_holomorphic")
    add("identity", product_type(_z, _z), hol, "Z -> Z", "bc_holomorphic")
    add("square", product_type(_pow(2), _pow(2)), hol, "Z -> Z^2", "bc_holomorphic")
    add("cube", product_type(_pow(3), _pow(3)), hol, "Z -> Z^3", "bc_holomorphic")
    add("exp", product_type(np.exp, np.exp), hol, "Z -> exp(Z)", "bc_holomorphic")
    add("hol-mixed", product_type(lambda z: 1 + 2 * z - z**3, lambda z: 0.5j * z**2 + z),
        hol, "(1 + 2b1 - b1^3) e + (b2 + i b2^2/2) e†", "bc_holomorphic")

    # Ker d/dZ† ∩ Ker d/dZbar: product type, not holomorphic.
    add("conj-star", product_type(_zc, _zc), (False, True, True), "Z -> Z*", "product_type")
    add("antiholo-e", product_type(_zc, _z), (False, True, True), "conj(b1) e + b2 e†", "product_type")
    add("ptf-mixed", product_type(lambda z: z * _abs2(z), lambda z: np.conj(z) ** 2 + z),
        (False, True, True), "b1|b1|^2 e + (conj(b2)^2 + b2) e†", "product_type")

    # Ker d/dZ* ∩ Ker d/dZbar: holomorphic in (b1, b2).
    add("mixed-star-bar", separable([(_z, _z)], [(_z, _z)]), (True, False, True),
        "b1 b2 e + b1 b2 e†", "custom")
    add("tilde-member", separable([(_z, _z)], [(_pow(2), _c(1.0))]), (True, False, True),
        "b1 b2 e + b1^2 e†")
    add("tilde-member-2", separable([(_pow(2), _c(1.0)), (_c(1.0), _z)], [(_z, _pow(2))]),
        (True, False, True), "(b1^2 + b2) e + b1 b2^2 e†")
    add("tilde-member-3", separable([(np.exp, _z)], [(_c(1.0), _c(1.0)), (_z, _pow(3))]),
        (True, False, True), "exp(b1) b2 e + (1 + b1 b2^3) e†")

    # Ker d/dZ* ∩ Ker d/dZ†: holomorphic in b1 / antiholomorphic in b2 and vice versa.
    add("star-dagger", separable([(_z, _zc)], [(_zc, _z)]), (True, True, False),
        "b1 conj(b2) e + conj(b1) b2 e†")
    add("hat-member-2", separable([(_c(1.0), _cpow(2)), (_z, _c(1.0))], [(_zc, _pow(2))]),
        (True, True, False), "(conj(b2)^2 + b1) e + conj(b1) b2^2 e†")
    add("hat-member-3", separable([(_z, _cpow(2))], [(_zc, _c(1.0)), (_c(1.0), _z)]),
        (True, True, False), "b1 conj(b2)^2 e + (conj(b1) + b2) e†")

    # Only Ker d/dZ*.
    add("a2-star", separable([(_z, _abs2)], [(_c(1.0), _z)]), (True, False, False),
        "b1 |b2|^2 e + b2 e†")
    add("a2-star-2", separable([(_pow(2), _zc), (_c(1.0), _z)], [(_zc, _pow(2))]),
        (True, False, False), "(b1^2 conj(b2) + b2) e + conj(b1) b2^2 e†")

    # Generic C1 fields.
    add("generic", separable([(_z, _zc), (_c(1.0), _z)], [(_zc, _c(1.0))]), (True, False, False),
        "(b1 conj(b2) + b2) e + conj(b1) e†", "generic_C1")
    add("generic-2", separable([(_zc, _z), (_abs2, _c(1.0))], [(_z, _zc), (_zc, _c(1.0))]),
        (False, False, False), "(conj(b1) b2 + |b1|^2) e + (b1 conj(b2) + conj(b1)) e†", "generic_C1")
    add("generic-3", separable([(_z, lambda z: np.exp(np.conj(z))), (_cpow(2), _c(1.0))],
                               [(_z, _abs2)]),
        (False, False, False), "(b1 exp(conj(b2)) + conj(b1)^2) e + b1|b2|^2 e†", "generic_C1")
    add("generic-4", separable([(_pow(2), _c(1.0)), (_z, lambda z: 2 * np.conj(z)), (_c(1.0), _cpow(2))],
                               [(_zc, _z), (_c(1.0), lambda z: z**2 * np.conj(z))]),
        (False, True, False), "(b1 + conj(b2))^2 e + (conj(b1) b2 + b2^2 conj(b2)) e†", "generic_C1")
    add("generic-5", separable([(lambda z: np.cos(z) * np.conj(z), _c(1.0)), (_c(1.0), _z)],
                               [(np.exp, _zc), (_abs2, _z)]),
        (False, False, False), "(cos(b1) conj(b1) + b2) e + (exp(b1) conj(b2) + |b1|^2 b2) e†",
        "generic_C1")
    return reg


REGISTRY = _build_registry()


def get_builtin(name: str) -> BuiltinField:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown field {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


def builtins_with(star=None, dagger=None, bar=None):
    """Registry entries whose ground truth matches every given flag."""
    want = (star, dagger, bar)
    return [
        b for b in REGISTRY.values()
        if all(w is None or w == t for w, t in zip(want, b.truth))
    ]
