"""Named verification suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import BiComplex
from .fields import REGISTRY, builtins_with, classify
from .hilbert import InnerProductSpace
from .kernels import make_kernel
from .projections import (
    Case, SuiteReport, evaluation_grid, probe_points, projection_operators,
    verify_kernels_projected, verify_projection_contracts, verify_projection_factorization,
    verify_reproducing,
)

DEFAULT_TOL = {
    "reproducing": 1e-7,
    "kernels-projected": 1e-8,
    "factorization": 1e-6,
    "projection-contract": 1e-7,
    "classify": 1e-6,
}
SUITES = tuple(DEFAULT_TOL)
A_STAR_TOL = 1e-7


def _symmetric(dom):
    return dom.omega1.is_conjugation_symmetric() and dom.omega2.is_conjugation_symmetric()


def member_fields(kind: str):
    """Built-in fields in the space reproduced by kernel ``kind``."""
    flags = {"bergman": dict(star=True, dagger=True, bar=True),
             "tilde": dict(star=True, bar=True),
             "hat": dict(star=True, dagger=True)}[kind]
    return [b.field for b in builtins_with(**flags)]


def generic_probes():
    return [b.field for b in REGISTRY.values() if b.field.declared_class == "generic_C1"]


def a_star_probes():
    return [b.field for b in builtins_with(star=True, dagger=False, bar=False)]


def run_reproducing(sp, tol=None, seed=None, count=20) -> SuiteReport:
    tol = DEFAULT_TOL["reproducing"] if tol is None else tol
    dom = sp.domain
    ws = probe_points(dom, count, seed=seed)
    rep = SuiteReport("reproducing")
    kinds = ("bergman", "tilde", "hat") if _symmetric(dom) else ("bergman", "tilde")
    for kind in kinds:
        sub = verify_reproducing(sp, make_kernel(kind, dom), member_fields(kind), ws, tol)
        rep.cases.extend(sub.cases)
    return rep


def standard_w_probes(dom, count=5, seed=None):
    include = [w for w in (BiComplex(0, 0), BiComplex(0.3, 0.1)) if dom.contains(w)]
    return probe_points(dom, count, seed=seed, include=include)


def run_kernels_projected(sp, tol=None, seed=None) -> SuiteReport:
    tol = DEFAULT_TOL["kernels-projected"] if tol is None else tol
    dom = sp.domain
    kb, kt = make_kernel("bergman", dom), make_kernel("tilde", dom)
    kh = make_kernel("hat", dom) if _symmetric(dom) else None
    return verify_kernels_projected(sp, kb, kt, kh, standard_w_probes(dom, seed=seed),
                                    evaluation_grid(dom, seed=seed), tol)


def run_factorization(sp, tol=None, seed=None) -> SuiteReport:
    tol = DEFAULT_TOL["factorization"] if tol is None else tol
    ops = projection_operators(sp)
    probes = generic_probes() + [REGISTRY["square"].field]
    return verify_projection_factorization(sp, ops, probes, evaluation_grid(sp.domain, seed=seed),
                                           tol, a_star_probes(), min(tol, A_STAR_TOL))


def run_projection_contract(sp, tol=None, seed=None) -> SuiteReport:
    tol = DEFAULT_TOL["projection-contract"] if tol is None else tol
    ops = projection_operators(sp)
    return verify_projection_contracts(sp, ops, [b.field for b in REGISTRY.values()], tol)


@dataclass
class ClassifyCase(Case):
    matches: bool = True

    @property
    def passed(self) -> bool:
        return self.matches and super().passed


def run_classify(sp, tol=None, seed=None) -> SuiteReport:
    """Every built-in field against its ground-truth membership vector.

    ``max_dev`` is the largest residual among the operators that should
    annihilate the field.
    """
    tol = DEFAULT_TOL["classify"] if tol is None else tol
    rep = SuiteReport("classify")
    for b in REGISTRY.values():
        m = classify(b.field, sp.domain, tol=tol, seed=seed)
        expected = b.membership()
        zero_ops = [op for op, t in zip(("star", "dagger", "bar"), b.truth) if t]
        dev = max((m.max_residual[op] for op in zero_ops), default=0.0)
        rep.cases.append(ClassifyCase(b.name, dev, tol, m.flags() == expected))
    return rep


RUNNERS = {
    "reproducing": run_reproducing,
    "kernels-projected": run_kernels_projected,
    "factorization": run_factorization,
    "projection-contract": run_projection_contract,
    "classify": run_classify,
}


def run_suite(name: str, sp: InnerProductSpace, tol=None, seed=None) -> SuiteReport:
    try:
        runner = RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}") from None
    return runner(sp, tol=tol, seed=seed)
