"""Bicomplex Bergman spaces: arithmetic, operators, kernels and projections."""
from .algebra import BiComplex, Hyperbolic, from_cartesian, from_json, hyp_leq
from .quadrature import Disk, ProductDomain, Rectangle, UNIT_BIDISK, build_rule
from .fields import classify, eval_operators, get_builtin, product_type
from .hilbert import InnerProductSpace, inner, norm_h
from .kernels import bc_bergman_kernel, basis_kernel, disk_kernel, hat_kernel, tilde_kernel
from .projections import project_kernel, project_ptf, projection_operators

__version__ = "0.1.0"
