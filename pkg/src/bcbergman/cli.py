"""Command-line front end: ``bcb kernel|classify|verify|integrate``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from .algebra import BiComplex, from_json
from .errors import BicomplexError, OutsideDomain
from .fields import REGISTRY, classify, get_builtin
from .hilbert import InnerProductSpace
from .kernels import KERNEL_KINDS, make_kernel
from .quadrature import integrate_bc, load_domain
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
DEFAULT_ORDER = 40


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


@dataclass
class RunConfig:
    domain_file: str = "bidisk"
    order: int = DEFAULT_ORDER
    tol: float | None = None
    output: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.order < 4:
            raise UsageError("--order must be at least 4")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")

    def load(self):
        """Domain and its order (``--order`` wins over the file's)."""
        try:
            dom, file_order = load_domain(self.domain_file)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise DomainError(f"cannot load domain {self.domain_file!r}: {exc}") from exc
        return dom, self.order if self.order_given or file_order is None else file_order

    order_given = False


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _point(text: str, what: str) -> BiComplex:
    try:
        return from_json(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse {what} as a bicomplex JSON object: {exc}") from exc


def cmd_kernel_eval(cfg, args):
    z, w = _point(args.Z, "--Z"), _point(args.W, "--W")
    dom, _ = cfg.load()
    for name, p in (("Z", z), ("W", w)):
        if not dom.contains(p):
            raise OutsideDomain(f"{name} lies outside the domain")
    K = make_kernel(args.kind, dom)
    _emit(cfg, _dump(K.eval(z, w).to_json()))
    return EXIT_OK


def cmd_kernel_table(cfg, args):
    """CSV of K(Z, W) for Z on an n x n grid of real points in Omega1 x Omega2."""
    w = _point(args.W, "--W")
    dom, _ = cfg.load()
    if not dom.contains(w):
        raise OutsideDomain("W lies outside the domain")
    if args.n < 1:
        raise UsageError("--n must be positive")
    K = make_kernel(args.kind, dom)

    def axis(om):
        lo, hi = om.bounding_box()
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi.real - lo.real) * 0.95
        return mid.real + half * np.linspace(-1, 1, args.n) + 1j * mid.imag

    xs, ys = axis(dom.omega1), axis(dom.omega2)
    z1, z2 = np.meshgrid(xs, ys, indexing="ij")
    k1, k2 = K.values(z1, z2, w.b1, w.b2)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["z1_re", "z1_im", "z2_re", "z2_im", "k1_re", "k1_im", "k2_re", "k2_im"])
    for a, b, c, d in zip(z1.ravel(), z2.ravel(), np.ravel(k1), np.ravel(k2)):
        out.writerow([repr(float(v)) for v in (a.real, a.imag, b.real, b.imag, c.real, c.imag, d.real, d.imag)])
    _emit(cfg, buf.getvalue())
    return EXIT_OK


def cmd_classify(cfg, args):
    try:
        b = get_builtin(args.label)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    dom, _ = cfg.load()
    tol = 1e-6 if cfg.tol is None else cfg.tol
    m = classify(b.field, dom, sample_count=args.samples, h=args.h, tol=tol, seed=cfg.seed)
    _emit(cfg, _dump({"label": b.name, **m.to_json()}))
    return EXIT_OK


def cmd_verify(cfg, args):
    dom, order = cfg.load()
    sp = InnerProductSpace.build(dom, order)
    rep = run_suite(args.suite, sp, tol=cfg.tol, seed=cfg.seed)
    _emit(cfg, _dump(rep.to_json()))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_integrate(cfg, args):
    try:
        b = get_builtin(args.label)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    dom, order = cfg.load()
    sp = InnerProductSpace.build(dom, order)
    val = integrate_bc(dom, sp.rule1, sp.rule2, b.field)
    _emit(cfg, _dump({"label": b.name, "order": order, "integral": val.to_json()}))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--domain", default="bidisk",
                        help="domain JSON file, or 'bidisk' for the unit bidisk (default)")
    common.add_argument("--order", type=int, default=None,
                        help=f"quadrature order (default: the file's, else {DEFAULT_ORDER})")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--seed", type=int, default=None, help="scramble seed for Halton points")
    common.add_argument("--output", default=None, help="write the result here instead of stdout")

    p = _Parser(prog="bcb", description="Bicomplex Bergman-space numerics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kern = sub.add_parser("kernel", help="evaluate bicomplex kernels")
    ksub = kern.add_subparsers(dest="kernel_command", required=True, parser_class=_Parser)
    ev = ksub.add_parser("eval", parents=[common], help="K(Z, W) as JSON")
    ev.add_argument("--kind", choices=KERNEL_KINDS, default="bergman")
    ev.add_argument("--Z", required=True, help='bicomplex JSON, e.g. {"b1":[0,0],"b2":[0,0]}')
    ev.add_argument("--W", required=True)
    ev.set_defaults(func=cmd_kernel_eval)
    tb = ksub.add_parser("table", parents=[common], help="CSV grid of K(., W)")
    tb.add_argument("--kind", choices=KERNEL_KINDS, default="bergman")
    tb.add_argument("--W", default='{"b1":[0,0],"b2":[0,0]}')
    tb.add_argument("--n", type=int, default=11, help="grid points per axis")
    tb.set_defaults(func=cmd_kernel_table)

    cl = sub.add_parser("classify", parents=[common], help="membership of a built-in field")
    cl.add_argument("label", help=f"one of: {', '.join(sorted(REGISTRY))}")
    cl.add_argument("--samples", type=int, default=32)
    cl.add_argument("--h", type=float, default=1e-4)
    cl.set_defaults(func=cmd_classify)

    vf = sub.add_parser("verify", parents=[common], help="run a verification suite")
    vf.add_argument("--suite", required=True, choices=SUITES)
    vf.set_defaults(func=cmd_verify)

    it = sub.add_parser("integrate", parents=[common], help="integral of a built-in field")
    it.add_argument("label")
    it.set_defaults(func=cmd_integrate)
    return p


def _threads():
    env = os.environ.get("BCB_THREADS")
    if not env:
        return nullcontext()
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"BCB_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("BCB_THREADS must be >= 1")
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(args.domain, args.order if args.order is not None else DEFAULT_ORDER,
                        args.tol, args.output, args.seed)
        cfg.order_given = args.order is not None
        with _threads():
            return args.func(cfg, args)
    except UsageError as exc:
        print(f"bcb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OutsideDomain) as exc:
        print(f"bcb: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (BicomplexError, ValueError) as exc:
        print(f"bcb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
