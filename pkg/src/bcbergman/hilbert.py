"""Bicomplex inner product, hyperbolic norm and the projection contract."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import block_diag

from .algebra import BiComplex, Hyperbolic
from .errors import NegativeCoefficient, NonFiniteSample
from .fields import ExpansionField, Field
from .quadrature import ProductDomain, QuadratureRule, build_rule, row_chunks

NEGATIVE_FLOOR = -1e-10


def _finite(a):
    if not np.all(np.isfinite(a)):
        raise NonFiniteSample("field is not finite at some quadrature node")
    return a


@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    """L²_k over a product domain, discretised by one rule per factor."""

    domain: ProductDomain
    rule1: QuadratureRule
    rule2: QuadratureRule
    # feature matrices at the nodes, keyed by id of the family (kept alive here)
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def features(self, fam, which: int):
        key = (id(fam), which)
        hit = self._cache.get(key)
        if hit is None:
            if len(self._cache) > 4096:
                self._cache.clear()
            nodes = self.rule1.nodes if which == 1 else self.rule2.nodes
            hit = (fam, _finite(np.asarray(fam(nodes))))
            self._cache[key] = hit
        return hit[1]

    def __post_init__(self):
        if self.rule1.domain != self.domain.omega1 or self.rule2.domain != self.domain.omega2:
            raise ValueError("quadrature rules do not match the domain's projections")

    @classmethod
    def build(cls, domain: ProductDomain, order: int = 40) -> "InnerProductSpace":
        return cls(domain, build_rule(domain.omega1, order), build_rule(domain.omega2, order))

    @property
    def order(self):
        return self.rule1.order

    def inner(self, F: Field, G: Field) -> BiComplex:
        return inner(self, F, G)

    def norm_h(self, F: Field) -> Hyperbolic:
        return norm_h(self, F)


def _slot_gram(sp, fam_f, fam_g, which):
    # sum_i w_i f_r(x_i) conj(g_q(x_i)) for every feature pair
    weights = sp.rule1.weights if which == 1 else sp.rule2.weights
    uf = sp.features(fam_f, which)
    ug = sp.features(fam_g, which)
    return (uf * weights[:, None]).T @ ug.conj()


def inner(sp: InnerProductSpace, F: Field, G: Field) -> BiComplex:
    """``<F, G> = integral of F G*`` slot by slot.

    Separated expansions reduce to two one-dimensional quadratures per slot;
    other fields fall back to chunked evaluation on the node grid.
    """
    x, a = sp.rule1.nodes, sp.rule1.weights
    y, b = sp.rule2.nodes, sp.rule2.weights
    if isinstance(F, ExpansionField) and isinstance(G, ExpansionField):
        out = []
        for sf, sg in zip(F.slots, G.slots):
            ga = _slot_gram(sp, sf.u, sg.u, 1)
            gb = _slot_gram(sp, sf.v, sg.v, 2)
            out.append(np.sum(sf.coef * (ga @ sg.coef.conj() @ gb.T)))
        return BiComplex(out[0], out[1])
    total = np.zeros(2, dtype=complex)
    for blk in row_chunks(len(x), len(y)):
        fg = F.grid(x[blk], y)
        gg = G.grid(x[blk], y)
        for s in range(2):
            prod = _finite(fg[s] * gg[s].conj())
            total[s] += a[blk] @ prod @ b
    return BiComplex(total[0], total[1])


def norm_h(sp: InnerProductSpace, F: Field) -> Hyperbolic:
    """Hyperbolic norm: coefficientwise square root of ``<F, F>``."""
    g = inner(sp, F, F)
    coeffs = []
    for c in (g.b1.real, g.b2.real):
        if c < NEGATIVE_FLOOR:
            raise NegativeCoefficient(f"<F, F> has coefficient {c:.3e} < 0")
        coeffs.append(max(c, 0.0))
    return Hyperbolic(*coeffs).sqrt()


def node_values(sp: InnerProductSpace, F: Field):
    """Slot values of F on the full node grid, each ``(len(rule1), len(rule2))``."""
    x, y = sp.rule1.nodes, sp.rule2.nodes
    if isinstance(F, ExpansionField):
        return tuple(
            (sp.features(s.u, 1) @ s.coef) @ sp.features(s.v, 2).T for s in F.slots
        )
    g = F.grid(x, y)
    return tuple(_finite(v) for v in g)


def distance(sp: InnerProductSpace, F: Field, G: Field) -> Hyperbolic:
    """``||F - G||`` from node values.

    Subtracting values before squaring keeps the result accurate when F
    and G nearly coincide; expanding ``<F-G, F-G>`` would cancel down to
    the square root of rounding noise.
    """
    a, b = sp.rule1.weights, sp.rule2.weights
    if isinstance(F, ExpansionField) and isinstance(G, ExpansionField):
        # ||U C V^T|| in the weighted norm equals ||R_u C R_v^T||_F with
        # thin QR factors of sqrt(w) U and sqrt(w) V.
        out = []
        for sf, sg in zip(F.slots, G.slots):
            u = np.hstack([sp.features(sf.u, 1), sp.features(sg.u, 1)])
            v = np.hstack([sp.features(sf.v, 2), sp.features(sg.v, 2)])
            c = block_diag(sf.coef, -sg.coef)
            ru = np.linalg.qr(np.sqrt(a)[:, None] * u, mode="r")
            rv = np.linalg.qr(np.sqrt(b)[:, None] * v, mode="r")
            out.append(np.linalg.norm(ru @ c @ rv.T))
        return Hyperbolic(*out)
    fv, gv = node_values(sp, F), node_values(sp, G)
    sq = [float(a @ np.abs(f - g) ** 2 @ b) for f, g in zip(fv, gv)]
    return Hyperbolic(*sq).sqrt()


@dataclass
class ContractReport:
    operator: str
    idempotency_violation: float
    self_adjoint_violation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.idempotency_violation < self.tol and self.self_adjoint_violation < self.tol

    def to_json(self) -> dict:
        return {
            "operator": self.operator,
            "idempotency_violation": self.idempotency_violation,
            "self_adjoint_violation": self.self_adjoint_violation,
            "pass": self.passed,
        }


def check_projection_contract(sp: InnerProductSpace, T, probes, tol: float = 1e-7,
                              name: str | None = None) -> ContractReport:
    """Idempotency and BC-self-adjointness of ``T`` on a probe set.

    The idempotency violation is the largest coefficient of
    ``||T(TF) - TF||`` (see ``distance``); the self-adjointness violation is the largest
    coefficient of ``|<TF, G> - <F, TG>|_k`` over all probe pairs.
    """
    probes = list(probes)
    images = [T(f) for f in probes]
    idem = 0.0
    for tf in images:
        idem = max(idem, max(_abs_coeffs(distance(sp, T(tf), tf))))
    adj = 0.0
    for i, (f, tf) in enumerate(zip(probes, images)):
        for g, tg in zip(probes[i:], images[i:]):
            d = inner(sp, tf, g) - inner(sp, f, tg)
            adj = max(adj, d.sup())
    label = name or getattr(T, "kind", None) or getattr(T, "__name__", repr(T))
    return ContractReport(str(label), float(idem), float(adj), tol)


def _abs_coeffs(h: Hyperbolic):
    return abs(h.a), abs(h.b)
