import numpy as np
import numpy.testing as npt
import pytest
from scipy.integrate import quad
from scipy.special import j0

from nearfield.errors import AliasingError
from nearfield.forward import phantom_disc, transmission_from_projection
from nearfield.grid import ComplexField, Grid, pad_field
from nearfield.optics import (
    CustomCompact,
    GaussianBeam,
    ImagingGeometry,
    PlaneWave,
    chirp_w_F,
    far_field_intensity,
    fresnel_propagate_chirp,
    fresnel_propagate_multiplier,
    gamma_factor,
    global_phase,
    probe_at_object,
    reference_term,
)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def propagated_gaussian(a, xi, m, geom):
    """Closed form of D(exp(a xi^2)) obtained by completing the square."""
    b = -a - 0.5j
    xi2 = xi**2 if m == 1 else xi
    return gamma_factor(m) * global_phase(geom.k, geom.d) * np.sqrt(2 * b) ** (-m) * np.exp(0.5j * xi2 - xi2 / (4 * b))


def fresnel_quadrature(psi, x_in, x_out, geom):
    """Direct midpoint-rule evaluation of the 1-D Fresnel integral."""
    k, d = geom.k, geom.d
    dx = x_in[1] - x_in[0]
    pref = global_phase(k, d) * np.exp(-1j * np.pi / 4) * np.sqrt(k / (2 * np.pi * d))
    kernel = np.exp(1j * k * x_in[None, :] ** 2 / (2 * d)) * np.exp(-1j * k * np.outer(x_out, x_in) / d)
    return pref * np.exp(1j * k * x_out**2 / (2 * d)) * (kernel @ psi) * dx


# --- chirp --------------------------------------------------------------

def test_chirp_at_origin_and_modulus():
    g = Grid.uniform(64, 0.25)
    w = chirp_w_F(g)
    assert w.values[32] == 1
    assert np.max(np.abs(np.abs(w.values) - 1)) <= 1e-15


def test_chirp_rejects_undersampling():
    g = Grid.uniform(1024, 502 / 1024)
    with pytest.raises(AliasingError) as err:
        chirp_w_F(g)
    assert err.value.axis == 0


def test_chirp_names_offending_axis():
    g = Grid((64, 1024), (0.25, 502 / 1024))
    with pytest.raises(AliasingError) as err:
        chirp_w_F(g)
    assert err.value.axis == 1


# --- multiplier propagator -----------------------------------------------

@pytest.fixture
def geom2d():
    return ImagingGeometry(k=2 * np.pi / 1e-10, d=0.05, pixel=5e-7, m=2)


def test_multiplier_constant_is_fixed_point(geom2d):
    g = geom2d.physical_grid(256)
    p0 = 0.3 - 1.1j
    out = fresnel_propagate_multiplier(ComplexField(g, np.full(g.shape, p0)), geom2d)
    assert np.max(np.abs(out.values / global_phase(geom2d.k, geom2d.d) - p0)) <= 1e-12


def test_multiplier_preserves_energy(geom2d):
    rng = np.random.default_rng(0)
    g = geom2d.physical_grid(128)
    psi = ComplexField(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
    out = fresnel_propagate_multiplier(psi, geom2d)
    assert out.energy() == pytest.approx(psi.energy(), rel=1e-12)


@pytest.mark.parametrize("m", [1, 2])
def test_multiplier_gaussian_matches_closed_form(m):
    geom = ImagingGeometry(k=1e4, d=0.25, pixel=0.2 / np.sqrt(1e4 / 0.25), m=m)
    n = 512 if m == 1 else 256
    g = geom.physical_grid(n)
    xi2 = geom.to_dimensionless(g).radius_squared()
    out = fresnel_propagate_multiplier(ComplexField(g, np.exp(-xi2)), geom)
    expected = propagated_gaussian(-1.0, xi2 if m == 2 else np.sqrt(xi2) * np.sign(geom.to_dimensionless(g).axis()), m, geom)
    assert np.max(np.abs(out.values - expected)) <= 1e-8
    # modulus is the Gaussian exp(-Re(1/4b) xi^2) / |2b|^(m/2)
    b = 1 - 0.5j
    npt.assert_allclose(np.abs(out.values), np.abs(2 * b) ** (-m / 2) * np.exp(-np.real(1 / (4 * b)) * xi2), atol=1e-8)


def test_multiplier_matches_direct_quadrature():
    # n=32 band-limited Gaussian, padded 4x; quadrature over the padded grid
    geom = ImagingGeometry(k=1.0, d=16.0, pixel=1.0, m=1)  # dxi = 0.25
    g = geom.physical_grid(32)
    x = g.axis()
    width = 2.3 * geom.pixel
    psi = ComplexField(g, (1 + 0.4j) * np.exp(-x**2 / (2 * width**2)))
    padded = pad_field(psi, 4)
    out = fresnel_propagate_multiplier(padded, geom)
    xp = padded.grid.axis()
    # the sampled kernel exp(-i k x x'/d) repeats with period 2 pi d/(k dx)
    window = np.abs(xp) < np.pi * geom.d / (geom.k * geom.pixel) * 0.75
    brute = fresnel_quadrature(padded.values, xp, xp[window], geom)
    assert rel(out.values[window], brute) <= 1e-8


def test_multiplier_semigroup_and_inverse():
    rng = np.random.default_rng(7)
    geom = ImagingGeometry(k=3.0, d=2.0, pixel=0.5, m=1)
    g = geom.physical_grid(512)
    psi = ComplexField(g, rng.standard_normal(512) + 1j * rng.standard_normal(512))
    a = fresnel_propagate_multiplier(fresnel_propagate_multiplier(psi, geom, 0.7), geom, 1.3)
    b = fresnel_propagate_multiplier(psi, geom, 2.0)
    assert rel(a.values, b.values) <= 1e-12
    back = fresnel_propagate_multiplier(b, geom, -2.0)
    assert rel(back.values, psi.values) <= 1e-12


def test_multiplier_rejects_undersampling():
    geom = ImagingGeometry(k=1.0, d=1e4, pixel=1.0, m=1)
    with pytest.raises(AliasingError):
        fresnel_propagate_multiplier(ComplexField(geom.physical_grid(64), np.ones(64)), geom)


# --- chirp propagator ----------------------------------------------------

def test_chirp_form_matches_multiplier_at_critical_sampling():
    n = 64
    geom = ImagingGeometry.critical(n, pixel=1.0, k=2.0)
    gp = geom.physical_grid(n)
    gd = geom.to_dimensionless(gp)
    assert gd.dual().is_close(gd)
    xi = gd.axis()
    psi0 = np.exp(-xi**2 / 2) * (1 + 0.3j * np.cos(xi))
    a = fresnel_propagate_chirp(ComplexField(gd, psi0), geom)
    b = fresnel_propagate_multiplier(ComplexField(gp, psi0), geom)
    assert rel(a.values, b.values) <= 1e-8


def test_chirp_form_against_adaptive_quadrature():
    n = 64
    geom = ImagingGeometry.critical(n, pixel=1.0, k=1.0)
    gd = geom.to_dimensionless(geom.physical_grid(n))
    xi = gd.axis()
    out = fresnel_propagate_chirp(ComplexField(gd, np.exp(-xi**2 / 2)), geom)
    dual = out.grid.axis()
    for idx in (32, 36, 27):
        s = dual[idx]
        re = quad(lambda x: np.cos(x**2 / 2 - s * x) * np.exp(-x**2 / 2), -9, 9, epsabs=1e-13, limit=200)[0]
        im = quad(lambda x: np.sin(x**2 / 2 - s * x) * np.exp(-x**2 / 2), -9, 9, epsabs=1e-13, limit=200)[0]
        expected = gamma_factor(1) * global_phase(geom.k, geom.d) * np.exp(0.5j * s**2) * (re + 1j * im) / np.sqrt(2 * np.pi)
        assert abs(out.values[idx] - expected) <= 1e-7


def test_chirp_form_zero_field():
    geom = ImagingGeometry.critical(32, pixel=1.0)
    gd = geom.to_dimensionless(geom.physical_grid(32))
    out = fresnel_propagate_chirp(ComplexField(gd, np.zeros(32)), geom)
    assert np.all(out.values == 0)


def test_chirp_form_rejects_fine_grid():
    geom = ImagingGeometry(k=1.0, d=1.0, pixel=1.0, m=1)
    with pytest.raises(AliasingError):
        fresnel_propagate_chirp(ComplexField(Grid.uniform(64, 1.0), np.ones(64)), geom)


# --- reference term and probes -------------------------------------------

def test_plane_wave_reference():
    g = Grid.uniform(64, 0.25)
    ref = reference_term(PlaneWave(1.0), g)
    assert ref.values[32] == pytest.approx(np.exp(1j * np.pi / 4), abs=1e-15)
    assert np.max(np.abs(np.abs(ref.values) - 1)) <= 1e-15
    ref2 = reference_term(PlaneWave(2 - 1j), g)
    assert np.max(np.abs(np.abs(ref2.values) - abs(2 - 1j))) <= 1e-15


def test_gaussian_reference():
    g = Grid.uniform(64, 0.25)
    xi = g.axis()
    ref = reference_term(GaussianBeam(1.0, -1.0), g)
    npt.assert_allclose(ref.values, np.exp((-1 - 0.5j) * xi**2) / gamma_factor(1), rtol=1e-15)
    npt.assert_allclose(np.abs(ref.values), np.exp(-xi**2), rtol=1e-14)


def test_custom_reference_matches_plane_wave_delta():
    # p_check = sqrt(2 pi) (p0/gamma) delta_0 reproduces the plane-wave term
    g = Grid.uniform(64, np.sqrt(2 * np.pi / 64))
    p0 = 0.5 + 0.5j
    spike = np.zeros(64, complex)
    spike[32] = np.sqrt(2 * np.pi) * p0 / gamma_factor(1) / g.spacing[0]
    custom = CustomCompact(ComplexField(g, spike), -0.5j)
    npt.assert_allclose(
        reference_term(custom, g.dual()).values, reference_term(PlaneWave(p0), g.dual()).values, atol=1e-13
    )


@pytest.mark.parametrize("bad", [dict(alpha0=0.1), dict(alpha0=-1 + 0.2j), dict(p0=0)])
def test_gaussian_invariants(bad):
    with pytest.raises(ValueError):
        GaussianBeam(**{"p0": 1.0, "alpha0": -1.0, **bad})


def test_invalid_probes():
    with pytest.raises(ValueError):
        PlaneWave(0)
    g = Grid.uniform(8, 1.0)
    with pytest.raises(ValueError):
        CustomCompact(ComplexField(g, np.zeros(8)), -0.5j)
    with pytest.raises(ValueError):
        CustomCompact(ComplexField(g, np.ones(8)), -0.5)


@pytest.mark.parametrize("alpha0", [-0.05, -0.02 - 0.01j])
def test_gaussian_probe_propagates_to_its_detector_form(alpha0):
    probe = GaussianBeam(0.8 + 0.1j, alpha0)
    geom = ImagingGeometry(k=1.0, d=1.0, pixel=0.5, m=1)
    g = geom.physical_grid(1024)
    gd = geom.to_dimensionless(g)
    p = probe_at_object(probe, gd)
    out = fresnel_propagate_multiplier(ComplexField(g, p.values), geom)
    expected = probe.p0 * global_phase(geom.k, geom.d) * np.exp(alpha0 * gd.axis() ** 2)
    assert np.max(np.abs(out.values - expected)) <= 1e-10


# --- far field ------------------------------------------------------------

def test_far_field_parseval_and_symmetry():
    g = Grid.uniform(128, 0.5, 2)
    r2 = g.radius_squared()
    psi = ComplexField(g, np.exp(-r2 / 8) * np.cos(np.sqrt(r2)))
    ff = far_field_intensity(psi)
    assert np.sum(ff.values) * ff.grid.cell_volume == pytest.approx(psi.energy(), rel=1e-12)
    parity = np.roll(np.flip(ff.values, (0, 1)), (1, 1), axis=(0, 1))
    assert np.max(np.abs(ff.values - parity)) <= 1e-12 * ff.values.max()
    assert np.all(ff.values >= 0)


def test_far_field_of_disc_against_radial_quadrature():
    n, radius = 1024, 128.0
    g = Grid.uniform(n, 1.0, 2)
    proj = phantom_disc(g, radius, 1.0, 0.1, smooth_edge=True)
    o = transmission_from_projection(proj)
    ff = far_field_intensity(o.o)
    c = n // 2
    rho = ff.grid.axis(0)[c + 1 : c + 61]
    profile = ff.values[c + 1 : c + 61, c]

    def edge(r):
        t = np.clip((r - (radius - 0.5)), 0, 1)
        return 0.5 * (1 + np.cos(np.pi * t))

    contrast = abs(np.exp(-1j - 0.1) - 1) ** 2
    ref = np.array([
        contrast * quad(lambda r: j0(s * r) * r * edge(r), 0, radius + 0.5, limit=500, points=[radius - 0.5])[0] ** 2
        for s in rho
    ])
    peak = contrast * (radius**2 / 2) ** 2
    assert np.max(np.abs(profile - ref)) / peak <= 1e-4
    # central peak dominates and the ring maxima decay monotonically
    assert ff.values[c, c] == ff.values.max()
    rings = [i for i in range(1, len(profile) - 1) if profile[i] > profile[i - 1] and profile[i] > profile[i + 1]]
    assert len(rings) >= 5
    assert np.all(np.diff(profile[rings]) < 0)
