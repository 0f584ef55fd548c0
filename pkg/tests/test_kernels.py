import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcbergman.algebra import BiComplex
from bcbergman.errors import IllConditioned, OutsideDomain
from bcbergman.fields import ScalarField, builtins_with, get_builtin, halton_points, theta_conjugate
from bcbergman.hilbert import InnerProductSpace
from bcbergman.kernels import BasisKernel, DiskKernel, basis_kernel, disk_kernel, make_kernel, planar_kernel
from bcbergman.projections import inner_reference, probe_points, project_kernel
from bcbergman.quadrature import Disk, ProductDomain, Rectangle, UNIT_BIDISK

PI2 = math.pi**2


def _random_pairs(count, radius=0.95, seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random((4, count)))
    t = 2 * math.pi * rng.random((4, count))
    return r * np.exp(1j * t)


# -- planar kernels ----------------------------------------------------------------


def test_disk_kernel_examples():
    assert disk_kernel(0, 0) == 1 / math.pi
    for z in (0.3, -0.9j, 0.5 + 0.5j):
        assert disk_kernel(z, 0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert disk_kernel(0.5, 0.5) == pytest.approx(16 / (9 * math.pi), rel=1e-15)


def test_disk_kernel_outside():
    with pytest.raises(OutsideDomain):
        disk_kernel(1.0, 0)
    with pytest.raises(OutsideDomain):
        disk_kernel(0, 1 - 1e-13)
    with pytest.raises(OutsideDomain):
        DiskKernel(Disk(1j, 0.5))(0, 1j)


def test_shifted_disk_kernel_is_scaled():
    k = DiskKernel(Disk(1 + 1j, 2.0))
    # centre value is 1/(pi R^2)
    assert k(1 + 1j, 1 + 1j) == pytest.approx(1 / (4 * math.pi))
    z, w = 1.5 + 0.3j, 0.2 + 1.4j
    want = disk_kernel((z - 1 - 1j) / 2, (w - 1 - 1j) / 2) / 4
    assert k(z, w) == pytest.approx(want, rel=1e-14)


def test_basis_kernel_matches_closed_form():
    k = basis_kernel(Disk(), 30)
    want = disk_kernel(0.3, 0.2)
    assert abs(k(0.3, 0.2) - want) <= 1e-8 * abs(want)
    assert k.provenance == "basis_truncated(30)"


@pytest.mark.parametrize("n", [1, 4, 17])
def test_basis_kernel_at_origin_w(n):
    k = basis_kernel(Disk(), n)
    z = np.array([0.1, -0.4j, 0.7 + 0.2j])
    assert np.max(np.abs(k(z, 0) - 1 / math.pi)) <= 1e-13


def test_basis_kernel_rectangle_hermitian():
    dom = Rectangle(-1 - 1j, 1 + 1j)
    k = basis_kernel(dom, 25)
    rng = np.random.default_rng(1)
    z = rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)
    w = rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)
    assert np.max(np.abs(k(z, w) - np.conj(k(w, z)))) <= 1e-12


def test_basis_is_orthonormal_on_nodes():
    from bcbergman.quadrature import build_rule
    for dom in (Disk(0.5, 2.0), Rectangle(-1 - 0.5j, 2 + 0.5j)):
        k = BasisKernel(dom, 20)
        r = build_rule(dom, 40)
        phi = k.basis(r.nodes)
        g = (phi * r.weights[:, None]).T @ phi.conj()
        assert np.max(np.abs(g - np.eye(20))) < 1e-12


def test_basis_convergence_is_monotone():
    pts = 0.5 * np.sqrt(np.linspace(0, 1, 12)) * np.exp(2j * math.pi * np.linspace(0, 1, 12) * 7)
    Z, Wp = np.meshgrid(pts, pts[::-1] * np.exp(0.4j))
    exact = disk_kernel(Z, Wp)
    errs = []
    for n in (5, 10, 20, 40):
        approx = basis_kernel(Disk(), n)(Z, Wp)
        errs.append(np.max(np.abs(approx - exact) / np.abs(exact)))
    for a, b in zip(errs, errs[1:]):
        assert b <= a + 1e-14
    assert errs[-1] < 1e-10


def test_ill_conditioned_reports_stable_size():
    thin = Rectangle(-1 - 0.001j, 1 + 0.001j)
    with pytest.raises(IllConditioned) as info:
        BasisKernel(thin, 40)
    m = info.value.largest_stable_n
    assert 1 <= m < 40
    BasisKernel(thin, m)
    # planar_kernel falls back to that size
    assert planar_kernel(thin, 40).n == m


def test_basis_kernel_rejects_zero_size():
    with pytest.raises(ValueError):
        BasisKernel(Disk(), 0)


def test_planar_kernel_choice():
    assert isinstance(planar_kernel(Disk()), DiskKernel)
    assert isinstance(planar_kernel(Disk(), 10), BasisKernel)
    assert isinstance(planar_kernel(Rectangle(0, 1 + 1j)), BasisKernel)


# -- bicomplex kernels -------------------------------------------------------------


def test_kernels_at_origin():
    O = BiComplex(0, 0)
    for kind in ("bergman", "tilde", "hat"):
        v = make_kernel(kind, UNIT_BIDISK)(O, O)
        assert v.isclose(BiComplex(1 / PI2, 1 / PI2), atol=1e-16), kind
    assert abs(make_kernel("bergman", UNIT_BIDISK)(O, O).b1 - 0.10132118364233778) < 1e-16


def test_bergman_is_idempotent_combination():
    z1, z2, w1, w2 = _random_pairs(100)
    K = make_kernel("bergman", UNIT_BIDISK)
    k1, k2 = K.values(z1, z2, w1, w2)
    assert np.allclose(k1, disk_kernel(z1, w1) / math.pi, rtol=1e-14, atol=0)
    assert np.allclose(k2, disk_kernel(z2, w2) / math.pi, rtol=1e-14, atol=0)


def test_tilde_matches_bidisk_closed_form():
    z1, z2, w1, w2 = _random_pairs(100, seed=2)
    want = 1 / (PI2 * (1 - z1 * np.conj(w1)) ** 2 * (1 - z2 * np.conj(w2)) ** 2)
    k1, k2 = make_kernel("tilde", UNIT_BIDISK).values(z1, z2, w1, w2)
    assert np.max(np.abs(k1 - want) / np.abs(want)) <= 1e-12
    assert np.max(np.abs(k2 - want) / np.abs(want)) <= 1e-12


def test_hat_matches_bidisk_closed_form():
    z1, z2, w1, w2 = _random_pairs(100, seed=3)
    c = np.conj
    want1 = 1 / (PI2 * (1 - z1 * c(w1)) ** 2 * (1 - c(z2) * w2) ** 2)
    want2 = 1 / (PI2 * (1 - c(z1) * w1) ** 2 * (1 - z2 * c(w2)) ** 2)
    k1, k2 = make_kernel("hat", UNIT_BIDISK).values(z1, z2, w1, w2)
    assert np.max(np.abs(k1 - want1) / np.abs(want1)) <= 1e-12
    assert np.max(np.abs(k2 - want2) / np.abs(want2)) <= 1e-12


def test_hat_requires_symmetric_domain():
    dom = ProductDomain(Disk(0.5j, 1.0), Disk())
    with pytest.raises(OutsideDomain):
        make_kernel("hat", dom)
    with pytest.raises(ValueError):
        make_kernel("sharp", UNIT_BIDISK)


DOMAINS = [
    UNIT_BIDISK,
    ProductDomain(Rectangle(-1 - 1j, 1 + 1j), Disk(0, 0.8)),
]


@pytest.mark.parametrize("dom", DOMAINS, ids=["bidisk", "rect-disk"])
@pytest.mark.parametrize("kind", ["bergman", "tilde", "hat"])
def test_star_hermitian_and_diagonal_positive(dom, kind):
    K = make_kernel(kind, dom)
    z1, z2 = halton_points(dom, 1000, seed=11)
    w1, w2 = halton_points(dom, 1000, seed=12)
    a = K.values(z1, z2, w1, w2)
    b = K.values(w1, w2, z1, z2)
    for s in range(2):
        # conj(., star) is coefficientwise complex conjugation
        assert np.max(np.abs(a[s] - np.conj(b[s]))) <= 1e-12 * (1 + np.max(np.abs(a[s])))
        d = K.values(z1, z2, z1, z2)[s]
        assert np.all(d.real > 0) and np.max(np.abs(d.imag)) <= 1e-12 * np.max(d.real)


def test_section_matches_values():
    K = make_kernel("hat", UNIT_BIDISK)
    w = BiComplex(0.3 - 0.1j, 0.2j)
    sec = K.section(w)
    z = BiComplex(-0.4, 0.5 + 0.1j)
    assert sec.at(z).isclose(K(z, w), atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 6.3), st.floats(0, 0.9), st.floats(0, 6.3))
def test_star_hermitian_property(r, t, s, u):
    z = BiComplex(r * np.exp(1j * t), s * np.exp(1j * u))
    w = BiComplex(s * np.exp(-1j * t), r * np.exp(1j * (u + 1)))
    for kind in ("bergman", "tilde", "hat"):
        K = make_kernel(kind, UNIT_BIDISK)
        assert (K(z, w) - K(w, z).conj("star")).sup() <= 1e-12 * (1 + K(z, w).sup())


# -- reproducing examples -------------------------------------------------------------


@pytest.fixture(scope="module")
def space40():
    return InnerProductSpace.build(UNIT_BIDISK, 40)


def _repro_err(sp, K, F, ws):
    P = project_kernel(sp, K, F)
    w1 = np.array([w.b1 for w in ws])
    w2 = np.array([w.b2 for w in ws])
    p, f = P(w1, w2), F(w1, w2)
    return max(np.max(np.abs(p[s] - f[s])) for s in range(2))


def test_reproducing_examples(space40):
    ws = probe_points(UNIT_BIDISK, 8, seed=5)
    K = make_kernel("bergman", UNIT_BIDISK)
    assert _repro_err(space40, K, get_builtin("square").field, ws) <= 1e-8
    Kt = make_kernel("tilde", UNIT_BIDISK)
    # f1 = b1 b2, f2 = b1^2
    assert _repro_err(space40, Kt, get_builtin("tilde-member").field, ws) <= 1e-8
    Kh = make_kernel("hat", UNIT_BIDISK)
    # f1 = b1 conj(b2), f2 = conj(b1) b2
    assert _repro_err(space40, Kh, get_builtin("star-dagger").field, ws) <= 1e-8


def test_inner_reference_agrees_with_projection(space40):
    K = make_kernel("tilde", UNIT_BIDISK)
    F = get_builtin("tilde-member-3").field
    w = BiComplex(0.2 + 0.1j, -0.3)
    direct = inner_reference(space40, K, F, w)
    via = project_kernel(space40, K, F).at(w)
    assert direct.isclose(via, atol=1e-12)
    assert direct.isclose(F.at(w), atol=1e-8)


def test_basis_kernels_reproduce_on_rectangles():
    dom = ProductDomain(Rectangle(-1 - 1j, 1 + 1j), Rectangle(-1 - 0.5j, 1 + 0.5j))
    sp = InnerProductSpace.build(dom, 40)
    ws = probe_points(dom, 6, seed=2)
    for kind, name in (("bergman", "cube"), ("tilde", "tilde-member-2"), ("hat", "hat-member-3")):
        assert _repro_err(sp, make_kernel(kind, dom), get_builtin(name).field, ws) <= 1e-8, kind


def test_hat_reproduces_theta_images_through_dense_path():
    """C(j) cross-check: theta F theta of a K~ member lies in the K^ space."""
    sp = InnerProductSpace.build(UNIT_BIDISK, 32)
    Kh = make_kernel("hat", UNIT_BIDISK)
    ws = probe_points(UNIT_BIDISK, 4, seed=9)
    for b in builtins_with(star=True, dagger=False, bar=True):
        G = theta_conjugate(b.field)
        assert isinstance(G, ScalarField)
        assert _repro_err(sp, Kh, G, ws) <= 1e-8, b.name
