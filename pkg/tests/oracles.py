"""Independent reference computations used by the tests.

The operator oracle works symbolically in the real cartesian coordinates
(x1, y1, x2, y2) with the multiplication table of the units 1, i, j, k,
without going through the idempotent representation.
"""
import sympy as sp

x1, y1, x2, y2 = sp.symbols("x1 y1 x2 y2", real=True)
COORDS = (x1, y1, x2, y2)

# (a, b, c, d) stands for a + b i + c j + d k with real a, b, c, d.


def unit_times(unit, v):
    a, b, c, d = v
    if unit == "1":
        return (a, b, c, d)
    if unit == "i":
        return (-b, a, -d, c)
    if unit == "j":
        return (-c, -d, a, b)
    if unit == "k":
        return (d, -c, -b, a)
    raise ValueError(unit)


def bc_mul(u, v):
    out = (0, 0, 0, 0)
    for coef, unit in zip(u, "1ijk"):
        w = unit_times(unit, v)
        out = tuple(o + coef * wi for o, wi in zip(out, w))
    return tuple(sp.expand(o) for o in out)


def bc_conj(v, kind):
    a, b, c, d = v
    # star flips i and j, dagger flips j and k, bar flips i and k
    return {"star": (a, -b, -c, d), "dagger": (a, b, -c, -d), "bar": (a, -b, c, -d)}[kind]


Z = (x1, y1, x2, y2)

SIGNS = {
    "z": (1, -1, -1, 1),
    "star": (1, 1, 1, 1),
    "dagger": (1, -1, 1, -1),
    "bar": (1, 1, -1, -1),
}


def apply_operator(F, op):
    """The operator applied to a symbolic 4-tuple F(x1, y1, x2, y2)."""
    out = [0, 0, 0, 0]
    for sign, unit, coord in zip(SIGNS[op], "1ijk", COORDS):
        part = tuple(sp.diff(c, coord) for c in F)
        term = unit_times(unit, part)
        out = [o + sign * t for o, t in zip(out, term)]
    return tuple(sp.simplify(sp.Rational(1, 4) * o) for o in out)


def to_pairs(v, point):
    """Numeric value of a symbolic 4-tuple at a cartesian point as (z1, z2)."""
    subs = dict(zip(COORDS, point))
    a, b, c, d = (complex(sp.N(comp.subs(subs))) if hasattr(comp, "subs") else complex(comp) for comp in v)
    return a + 1j * b, c + 1j * d


def polar_moment(p, radius=1):
    """Integral of |z|^(2p) over a disk: 2 pi int_0^R r^(2p+1) dr."""
    r = sp.Symbol("r", positive=True)
    return sp.integrate(2 * sp.pi * r ** (2 * p + 1), (r, 0, radius))
