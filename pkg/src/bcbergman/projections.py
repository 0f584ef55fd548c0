"""Product-type projection, kernel projections and the identities tying them together."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import BiComplex
from .errors import IllConditioned
from .fields import ExpansionField, Field, ProductTypeField, ScalarField, Slot, halton_points, ones_family
from .hilbert import InnerProductSpace, check_projection_contract, inner
from .kernels import (
    DEFAULT_BASIS_SIZE, BCKernel, BasisKernel, bc_bergman_kernel, hat_kernel, tilde_kernel,
)
from .quadrature import row_chunks

# Fraction of each planar domain (about its centre) holding evaluation points.
GRID_SHRINK = 0.7
GRID_POINTS = 25


def project_ptf(sp: InnerProductSpace, F: Field) -> Field:
    """Average the e-slot over Omega2 and the e†-slot over Omega1."""
    x, a = sp.rule1.nodes, sp.rule1.weights
    y, b = sp.rule2.nodes, sp.rule2.weights
    area1, area2 = sp.domain.omega1.area(), sp.domain.omega2.area()
    if isinstance(F, ExpansionField):
        s1, s2 = F.slots
        mean_v = (b @ s1.v(y)) / area2
        mean_u = (a @ s2.u(x)) / area1
        out = ExpansionField(
            [Slot(s1.u, (s1.coef @ mean_v)[:, None], ones_family),
             Slot(ones_family, (mean_u @ s2.coef)[None, :], s2.v)],
            "product_type", f"PTF[{F.label}]",
        )
        return out

    def h1(z):
        z = np.asarray(z, dtype=complex)
        vals = F.grid(z.ravel(), y)[0]
        return (vals @ b / area2).reshape(z.shape)

    def h2(z):
        z = np.asarray(z, dtype=complex)
        vals = F.grid(x, z.ravel())[1]
        return (a @ vals / area1).reshape(z.shape)

    return ProductTypeField(h1, h2, label=f"PTF[{F.label}]")


def _project_side(factor, nodes, weights, fam):
    """Reduce ``sum_i w_i fam(x_i) conj(factor(x_i, w))`` to a feature map.

    Returns ``(new_family, M)`` with the integral equal to
    ``new_family(w) @ M`` (an ``(n, r)`` mixing matrix).
    """
    left = weights[:, None] * fam(nodes)
    L, R = factor.features(nodes)
    if L is not None:
        left = L.T @ left
    n, r = left.shape
    if n < r:
        return R, left
    return (lambda w, R=R, left=left: R(w) @ left), np.eye(r, dtype=complex)


def project_kernel(sp: InnerProductSpace, K: BCKernel, F: Field) -> Field:
    """``W -> <F, K(., W)>``.

    For separated expansions the integral is carried out once against the
    kernel features and the result is again a separated expansion in W.
    Other fields get an evaluatable that integrates on demand.
    """
    x, a = sp.rule1.nodes, sp.rule1.weights
    y, b = sp.rule2.nodes, sp.rule2.weights
    if isinstance(F, ExpansionField):
        slots = []
        for sf, (fa, fb) in zip(F.slots, K.slots):
            u, ma = _project_side(fa, x, a, sf.u)
            v, mb = _project_side(fb, y, b, sf.v)
            slots.append(Slot(u, ma @ sf.coef @ mb.T, v))
        return ExpansionField(slots, label=f"P_{K.kind}[{F.label}]")

    cache = {}

    def weighted_grid():
        if "g" not in cache:
            g1 = np.empty((len(x), len(y)), dtype=complex)
            g2 = np.empty_like(g1)
            for blk in row_chunks(len(x), len(y)):
                f1, f2 = F.grid(x[blk], y)
                g1[blk] = f1
                g2[blk] = f2
            cache["g"] = [a[:, None] * g * b[None, :] for g in (g1, g2)]
        return cache["g"]

    def fn(w1, w2):
        w1, w2 = np.broadcast_arrays(np.asarray(w1, dtype=complex), np.asarray(w2, dtype=complex))
        shape = w1.shape
        w1, w2 = w1.ravel(), w2.ravel()
        out = []
        for g, (fa, fb) in zip(weighted_grid(), K.slots):
            ka = np.conj(fa(x[:, None], w1[None, :]))
            kb = np.conj(fb(y[:, None], w2[None, :]))
            out.append(np.einsum("ip,ij,jp->p", ka, g, kb).reshape(shape))
        return tuple(out)

    return ScalarField(fn, label=f"P_{K.kind}[{F.label}]")


PROJECTION_KINDS = ("ptf", "hol", "star_bar", "star_dagger")
_KERNEL_FOR = {"hol": bc_bergman_kernel, "star_bar": tilde_kernel, "star_dagger": hat_kernel}


@dataclass(eq=False)
class ProjectionOperator:
    kind: str
    space: InnerProductSpace
    kernel: BCKernel | None = None

    def __post_init__(self):
        if self.kind not in PROJECTION_KINDS:
            raise ValueError(f"unknown projection kind {self.kind!r}")
        if (self.kind == "ptf") != (self.kernel is None):
            raise ValueError("the ptf projection takes no kernel; the others need one")

    def __call__(self, F: Field) -> Field:
        if self.kernel is None:
            return project_ptf(self.space, F)
        return project_kernel(self.space, self.kernel, F)


def _stable_basis(dom, n):
    try:
        return BasisKernel(dom, n)
    except IllConditioned as exc:
        return BasisKernel(dom, exc.largest_stable_n)


def projection_operators(sp: InnerProductSpace, n: int = DEFAULT_BASIS_SIZE,
                         kernels=None) -> dict:
    """Π_PTF and the three kernel projections.

    By default the kernels are truncated to ``n`` orthonormal polynomials
    per variable, which makes each operator an exact orthogonal projection
    for the discrete inner product, so compositions stay consistent.
    ``kernels`` may map kinds to explicit BCKernels instead.
    """
    dom = sp.domain
    ops = {"ptf": ProjectionOperator("ptf", sp)}
    k1 = k2 = None
    for kind, build in _KERNEL_FOR.items():
        if kernels and kind in kernels:
            K = kernels[kind]
        else:
            if k1 is None:
                k1, k2 = _stable_basis(dom.omega1, n), _stable_basis(dom.omega2, n)
            if kind == "star_dagger" and not all(
                    om.is_conjugation_symmetric() for om in (dom.omega1, dom.omega2)):
                continue
            K = build(dom, k1, k2)
        ops[kind] = ProjectionOperator(kind, sp, K)
    return ops


def evaluation_grid(dom, count: int = GRID_POINTS, seed=None):
    """Fixed interior evaluation points (both idempotent coordinates)."""
    return halton_points(dom, count, seed=seed, shrink=GRID_SHRINK)


def max_deviation(F: Field, G: Field, grid) -> float:
    b1, b2 = grid
    f = F(b1, b2)
    g = G(b1, b2)
    return float(max(np.max(np.abs(f[0] - g[0])), np.max(np.abs(f[1] - g[1]))))


@dataclass
class Case:
    name: str
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_dev) and self.max_dev <= self.tol)

    def to_json(self):
        return {"name": self.name, "max_dev": self.max_dev, "pass": self.passed}


@dataclass
class SuiteReport:
    suite: str
    cases: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def max_dev(self) -> float:
        return max((c.max_dev for c in self.cases), default=0.0)

    def to_json(self):
        return {"suite": self.suite, "cases": [c.to_json() for c in self.cases], "pass": self.passed}


def _w_label(w: BiComplex):
    return f"W=({w.b1.real:.4g}{w.b1.imag:+.4g}i, {w.b2.real:.4g}{w.b2.imag:+.4g}i)"


def verify_kernels_projected(sp, Kber, Ktil, Khat, probes_w, grid=None, tol: float = 1e-8) -> SuiteReport:
    """``Π_PTF[K~(., W)] = Π_PTF[K^(., W)] = K(., W)`` on an evaluation grid."""
    grid = evaluation_grid(sp.domain) if grid is None else grid
    rep = SuiteReport("kernels-projected")
    for w in probes_w:
        target = Kber.section(w)
        for name, K in (("tilde", Ktil), ("hat", Khat)):
            if K is None:
                continue
            dev = max_deviation(project_ptf(sp, K.section(w)), target, grid)
            rep.cases.append(Case(f"{name} {_w_label(w)}", dev, tol))
    return rep


FACTORIZATION_EXPRESSIONS = (
    "hol", "ptf.star_bar", "star_bar.ptf", "ptf.star_dagger", "star_dagger.ptf",
)


def factorization_images(ops: dict, F: Field) -> dict:
    """The five expressions that all equal Π_Hol F; ``a.b`` means Π_a Π_b."""
    out = {}
    for expr in FACTORIZATION_EXPRESSIONS:
        names = expr.split(".")
        if any(n not in ops for n in names):
            continue
        g = F
        for n in reversed(names):
            g = ops[n](g)
        out[expr] = g
    return out


def verify_projection_factorization(sp, ops: dict, probes, grid=None, tol: float = 1e-6,
                                    a_star_probes=(), a_star_tol: float = 1e-7) -> SuiteReport:
    """Pairwise agreement of the five factorisations of Π_Hol, plus
    ``Π_PTF F = Π_Hol F`` on members of A²_*."""
    grid = evaluation_grid(sp.domain) if grid is None else grid
    rep = SuiteReport("factorization")
    for F in probes:
        images = factorization_images(ops, F)
        vals = {k: g(*grid) for k, g in images.items()}
        keys = list(vals)
        dev = 0.0
        for i, ki in enumerate(keys):
            for kj in keys[i + 1:]:
                for s in range(2):
                    dev = max(dev, float(np.max(np.abs(vals[ki][s] - vals[kj][s]))))
        rep.cases.append(Case(f"five-way {F.label}", dev, tol))
    for F in a_star_probes:
        dev = max_deviation(ops["ptf"](F), ops["hol"](F), grid)
        rep.cases.append(Case(f"ptf=hol {F.label}", dev, a_star_tol))
    return rep


def verify_projection_contracts(sp, ops: dict, probes, tol: float = 1e-7) -> SuiteReport:
    rep = SuiteReport("projection-contract")
    reports = []
    for kind, op in ops.items():
        r = check_projection_contract(sp, op, probes, tol, name=kind)
        reports.append(r)
        rep.cases.append(Case(f"{kind} idempotency", r.idempotency_violation, tol))
        rep.cases.append(Case(f"{kind} self-adjoint", r.self_adjoint_violation, tol))
    return rep


def verify_reproducing(sp, kernel: BCKernel, members, probes_w, tol: float = 1e-7) -> SuiteReport:
    """``<F, K(., W)> = F(W)`` for members of the kernel's space."""
    rep = SuiteReport("reproducing")
    w1 = np.array([w.b1 for w in probes_w])
    w2 = np.array([w.b2 for w in probes_w])
    for F in members:
        P = project_kernel(sp, kernel, F)
        p = P(w1, w2)
        f = F(w1, w2)
        dev = float(max(np.max(np.abs(p[0] - f[0])), np.max(np.abs(p[1] - f[1]))))
        rep.cases.append(Case(f"{kernel.kind} {F.label}", dev, tol))
    return rep


def probe_points(dom, count: int, seed=None, include=()):
    """Bicomplex probe points W from the evaluation region."""
    pts = list(include)
    if count > len(pts):
        b1, b2 = halton_points(dom, count - len(pts), seed=seed, shrink=GRID_SHRINK)
        pts.extend(BiComplex(p, q) for p, q in zip(b1, b2))
    return pts[:count]


def inner_reference(sp, K: BCKernel, F: Field, w: BiComplex) -> BiComplex:
    """Direct ``<F, K(., W)>`` through the generic inner product (cross-check route)."""
    return inner(sp, F, K.section(w))
