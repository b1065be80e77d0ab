import numpy as np
import pytest

from gyrokit.errors import CarrierDomainError, UsageError
from gyrokit.models import (
    EinsteinModel,
    MobiusModel,
    ProductModel,
    as_complex,
    as_pair,
    check_strong_base,
    einstein_gyr,
    einstein_oplus,
    gamma,
    mobius_gyr,
    mobius_oplus,
)
from gyrokit.sampling import Sampler


# -- frozen values, hand-computed from the defining formulas -----------------


def test_mobius_oplus_real_axis():
    # (0.5 + 0.5) / (1 + 0.25) = 0.8
    assert mobius_oplus(0.5 + 0j, 0.5 + 0j) == pytest.approx(0.8 + 0j, abs=1e-15)


def test_mobius_oplus_imag_axis():
    got = mobius_oplus(0.5j, 0.5j)
    assert got == pytest.approx(0.8j, abs=1e-15)


def test_mobius_oplus_pair_interface():
    got = mobius_oplus([0.5, 0.0], [0.5, 0.0])
    assert isinstance(got, np.ndarray)
    assert np.allclose(got, [0.8, 0.0], atol=1e-15)


def test_mobius_gyr_oracle():
    got = mobius_gyr(0.5 + 0j, 0.5j, 0.1 + 0j)
    want = 3.0 / 34.0 - (4.0 / 85.0) * 1j
    assert got == pytest.approx(want, abs=1e-15)


def test_mobius_gyr_unimodular_factor():
    gen = np.random.default_rng(3)
    a = 0.9 * (gen.uniform(-1, 1, (500, 2)))
    b = 0.9 * (gen.uniform(-1, 1, (500, 2)))
    a /= np.maximum(1.0, np.linalg.norm(a, axis=1, keepdims=True) / 0.95)
    b /= np.maximum(1.0, np.linalg.norm(b, axis=1, keepdims=True) / 0.95)
    x = np.full((500, 2), [0.1, 0.0])
    out = mobius_gyr(a, b, x)
    assert np.allclose(np.linalg.norm(out, axis=1), 0.1, atol=1e-12)


def test_gamma_factor():
    assert gamma(np.array([[0.5, 0.0, 0.0]]))[0] == pytest.approx(
        2.0 / np.sqrt(3.0), abs=1e-15
    )
    # scale invariance in c
    assert gamma(np.array([[1.5e8, 0.0, 0.0]]), c=3e8)[0] == pytest.approx(
        2.0 / np.sqrt(3.0), abs=1e-12
    )


def test_einstein_oplus_collinear():
    u = np.array([[0.5, 0.0, 0.0]])
    # (0.5 + 0.5) / (1 + 0.103) -> relativistic velocity sum
    got = einstein_oplus(u, u)[0]
    assert got == pytest.approx([0.8, 0.0, 0.0], abs=1e-15)


def test_einstein_oplus_with_c():
    c = 2.99792458e8
    u = np.array([[0.5 * c, 0.0, 0.0]])
    got = einstein_oplus(u, u, c=c)[0]
    assert got[0] == pytest.approx(0.8 * c, rel=1e-14)


def test_einstein_gyr_collinear_is_identity():
    u = np.array([[0.3, 0.0, 0.0]])
    v = np.array([[0.4, 0.0, 0.0]])
    w = np.array([[0.1, 0.2, -0.3]])
    got = einstein_gyr(u, v, w)
    assert np.allclose(got, w, atol=1e-14)


def test_rapidity_additivity_einstein():
    """Collinear addition is exactly additive in artanh scale; general
    pairs never exceed the sum. This certifies reducing composite radial
    sets to summed radii for the velocity model."""
    gen = np.random.default_rng(11)
    m = EinsteinModel()
    rho_u = gen.uniform(0, 2.5, 4000)
    rho_v = gen.uniform(0, 2.5, 4000)
    from gyrokit.sampling import directions

    u = np.tanh(rho_u)[:, None] * directions(gen, 4000, 3)
    v = np.tanh(rho_v)[:, None] * directions(gen, 4000, 3)
    rho_sum = np.arctanh(np.linalg.norm(m.oplus(u, v), axis=1))
    assert float((rho_sum - (rho_u + rho_v)).max()) <= 1e-12
    # collinear equality
    e = np.zeros((1, 3))
    e[0, 0] = 1.0
    a, b = 0.9, 1.3
    s = np.arctanh(np.linalg.norm(m.oplus(np.tanh(a) * e, np.tanh(b) * e), axis=1))
    assert s[0] == pytest.approx(a + b, abs=1e-13)


def test_rapidity_additivity_mobius():
    gen = np.random.default_rng(12)
    m = MobiusModel()
    from gyrokit.sampling import directions

    rho_u = gen.uniform(0, 2.5, 4000)
    rho_v = gen.uniform(0, 2.5, 4000)
    u = np.tanh(rho_u)[:, None] * directions(gen, 4000, 2)
    v = np.tanh(rho_v)[:, None] * directions(gen, 4000, 2)
    rho_sum = np.arctanh(np.linalg.norm(m.oplus(u, v), axis=1))
    assert float((rho_sum - (rho_u + rho_v)).max()) <= 1e-12


# -- carrier validation ------------------------------------------------------


def test_mobius_oplus_rejects_off_carrier():
    with pytest.raises(CarrierDomainError):
        mobius_oplus(1.0 + 0j, 0.1 + 0j)


def test_einstein_rejects_superluminal():
    with pytest.raises(CarrierDomainError):
        einstein_oplus(np.array([[1.1, 0.0, 0.0]]), np.array([[0.1, 0.0, 0.0]]))


def test_gamma_pole_guard():
    with pytest.raises(CarrierDomainError):
        gamma(np.array([[1.0 - 1e-9, 0.0, 0.0]]))


def test_pair_complex_converters():
    z = np.array([0.3 + 0.4j])
    assert np.allclose(as_complex(as_pair(z)), z)


# -- extended-precision ops agree with doubles away from the boundary --------


def test_extended_matches_double_mobius():
    m = MobiusModel()
    ext = m.extended()
    gen = np.random.default_rng(5)
    x = 0.5 * gen.uniform(-1, 1, (100, 2))
    y = 0.5 * gen.uniform(-1, 1, (100, 2))
    lo = ext.lower(ext.oplus(ext.lift(x), ext.lift(y)))
    assert np.allclose(lo, m.oplus(x, y), atol=1e-14)


def test_extended_matches_double_einstein():
    m = EinsteinModel()
    ext = m.extended()
    gen = np.random.default_rng(5)
    x = 0.4 * gen.uniform(-1, 1, (100, 3))
    y = 0.4 * gen.uniform(-1, 1, (100, 3))
    lo = ext.lower(ext.oplus(ext.lift(x), ext.lift(y)))
    assert np.allclose(lo, m.oplus(x, y), atol=1e-14)


def test_extended_fixes_boundary_left_cancellation():
    # near the rim, -x + (x + y) loses half the digits in doubles; the
    # paired-double route restores y to full precision
    m = MobiusModel()
    ext = m.extended()
    x = np.array([[1.0 - 1e-6, 0.0]])
    y = np.array([[0.0, 1.0 - 1e-6]])
    xe, ye = ext.lift(x), ext.lift(y)
    back = ext.lower(ext.oplus(ext.neg(xe), ext.oplus(xe, ye)))
    assert np.abs(back - y).max() <= 1e-14


# -- product construction ----------------------------------------------------


def test_product_model_axioms():
    from gyrokit.core import check_axioms

    pm = ProductModel(MobiusModel(), EinsteinModel())
    assert pm.dim == 5
    rep = check_axioms(pm, Sampler(42), 2000)
    assert rep.passed


def test_product_rejects_mixed_kinds():
    from gyrokit.tables import TableModel, cyclic_table, product_model

    with pytest.raises(UsageError):
        product_model(MobiusModel(), TableModel(cyclic_table(3)))


# -- strong base suite -------------------------------------------------------


@pytest.mark.parametrize("model", [MobiusModel(), EinsteinModel()])
def test_strong_base_passes(model):
    rep = check_strong_base(model, sampler=Sampler(42), n_samples=4000)
    assert rep.passed, [c.name for c in rep.checks if not c.passed]


def test_strong_base_mobius_has_factor_check():
    rep = check_strong_base(MobiusModel(), sampler=Sampler(42), n_samples=2000)
    assert rep.check("rotation_factor_modulus").passed
    rep = check_strong_base(EinsteinModel(), sampler=Sampler(42), n_samples=2000)
    with pytest.raises(KeyError):
        rep.check("rotation_factor_modulus")


def test_strong_base_detects_noninvariant_set():
    # balls centered away from the identity are not gyration-stable
    rep = check_strong_base(
        MobiusModel(),
        sampler=Sampler(42),
        n_samples=4000,
        center=np.array([0.3, 0.0]),
        ball_radii=[0.1],
    )
    assert not rep.passed
    failing = [c for c in rep.checks if not c.passed]
    assert any(c.name.startswith("ball_") for c in failing)
    assert all(c.witness is not None for c in failing if c.name.startswith("ball_"))


def test_strong_base_rejects_finite_model():
    from gyrokit.tables import TableModel, cyclic_table

    with pytest.raises(UsageError):
        check_strong_base(TableModel(cyclic_table(4)))
