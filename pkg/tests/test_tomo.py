import numpy as np
import numpy.testing as npt
import pytest

from nearfield.errors import PhaseWrapError, SupportError, ZeroTransmission
from nearfield.forward import phantom_disc
from nearfield.grid import Grid, ft_array
from nearfield.optics import ImagingGeometry, PlaneWave
from nearfield.tomo import (
    Sinogram,
    Volume,
    check_no_phase_wrap,
    fbp_reconstruct,
    log_transmission,
    phantom_blobs,
    project_volume,
    radon_2d,
    reconstruction_radius,
    tomo_forward,
    uniform_angles,
)


def tapered_blobs(rng, grid, count=3, widths=(12, 18), spread=20):
    """Random sum of wide Gaussians with a cos^2 taper to the reconstruction disc."""
    x0, x1 = grid.mesh()
    r = np.sqrt(grid.radius_squared())
    R = reconstruction_radius(grid)
    f = np.zeros(grid.shape)
    for _ in range(count):
        c = rng.uniform(-spread, spread, 2)
        w = rng.uniform(*widths)
        f += rng.uniform(0.5, 1.0) * np.exp(-((x0 - c[0]) ** 2 + (x1 - c[1]) ** 2) / (2 * w**2))
    return f * np.where(r < R, np.cos(0.5 * np.pi * r / R) ** 2, 0.0)


def direct_slice(f, grid, sigma, theta):
    """Non-uniform DFT of f along the ray sigma*theta, unitary normalization."""
    e0 = np.exp(-1j * np.outer(sigma * np.cos(theta), grid.axis(0)))
    e1 = np.exp(-1j * np.outer(sigma * np.sin(theta), grid.axis(1)))
    return np.einsum("ki,ij,kj->k", e0, f, e1) * grid.cell_volume / (2 * np.pi)


# --- types -----------------------------------------------------------------------

def test_volume_validation():
    g = Grid.uniform(32, 1.0, 2)
    with pytest.raises(ValueError):
        Volume(g, np.zeros(g.shape), -np.ones(g.shape))
    corner = np.zeros(g.shape)
    corner[0, 0] = 1
    with pytest.raises(SupportError):
        Volume(g, corner, np.zeros(g.shape))
    with pytest.raises(SupportError):
        Volume(g, np.zeros(g.shape), np.zeros(g.shape), radius=40)


def test_sinogram_validation():
    det = Grid.uniform(8, 1.0)
    with pytest.raises(ValueError):
        Sinogram([0.5, 0.2], det, np.zeros((2, 8)))
    with pytest.raises(ValueError):
        Sinogram([0.0, np.pi], det, np.zeros((2, 8)))
    with pytest.raises(ValueError):
        Sinogram([0.0], det, [[np.nan] * 8])


# --- Radon transform -------------------------------------------------------------------

def test_radon_of_disc_matches_chord_length():
    n, R = 256, 64.0
    g = Grid.uniform(n, 1.0, 2)
    angles = uniform_angles(36)
    x = g.axis()
    chord = 2 * np.sqrt(np.maximum(R**2 - x**2, 0))
    hard = radon_2d((g.radius_squared() < R**2).astype(float), angles, grid=g)
    centre = np.abs(x) <= R / 2
    assert np.max(np.abs(hard.values[:, centre] - chord[centre]) / chord[centre]) <= 0.01
    smooth = radon_2d(phantom_disc(g, R, 1.0, 0.0, smooth_edge=True).phi, angles, grid=g)
    inner = np.abs(x) <= 0.9 * R
    assert np.max(np.abs(smooth.values[:, inner] - chord[inner]) / chord[inner]) <= 0.01


def test_radon_mass_conservation():
    rng = np.random.default_rng(20)
    g = Grid.uniform(128, 1.0, 2)
    for _ in range(20):
        f = tapered_blobs(rng, g)
        angles = np.sort(rng.uniform(0, np.pi, 20))
        s = radon_2d(f, angles, grid=g)
        mass = s.values.sum(axis=1) * s.detector.spacing[0]
        total = f.sum() * g.cell_volume
        assert np.max(np.abs(mass - total)) <= 1e-6 * total


def test_radon_mass_with_physical_spacing():
    rng = np.random.default_rng(21)
    g = Grid.uniform(128, 0.37, 2)
    f = tapered_blobs(rng, Grid.uniform(128, 1.0, 2))
    s = radon_2d(f, uniform_angles(10), grid=g)
    total = f.sum() * g.cell_volume
    assert np.max(np.abs(s.values.sum(axis=1) * 0.37 - total)) <= 1e-6 * total


def test_radon_of_radial_field_is_angle_independent():
    g = Grid.uniform(128, 1.0, 2)
    r = np.sqrt(g.radius_squared())
    R = reconstruction_radius(g)
    f = np.exp(-(r**2) / (2 * 16.0**2)) * np.where(r < R, np.cos(0.5 * np.pi * r / R) ** 2, 0.0)
    s = radon_2d(f, uniform_angles(24), grid=g)
    # quarter turns map the pixel lattice onto itself
    assert np.max(np.abs(s.values[12] - s.values[0])) <= 1e-12 * s.values.max()
    # other angles see the O(dx^2) anisotropy of bilinear interpolation
    assert np.max(np.abs(s.values - s.values[0])) <= 1e-3 * s.values.max()


def test_fourier_slice_axis_angles_are_exact():
    rng = np.random.default_rng(22)
    g = Grid.uniform(128, 1.0, 2)
    f = tapered_blobs(rng, g, widths=(3, 6))
    s = radon_2d(f, [0.0, np.pi / 2], grid=g)
    F1 = ft_array(s.values.astype(complex), s.detector)
    sigma = s.detector.dual().axis()
    for row, t in zip(F1, s.angles):
        npt.assert_allclose(row, np.sqrt(2 * np.pi) * direct_slice(f, g, sigma, t), atol=1e-10)


def test_fourier_slice_oblique_angles():
    # the agreement is limited by the O(dx^2) bilinear interpolation error,
    # which a 32-sample Gaussian keeps below 1e-4 of the slice peak
    g = Grid.uniform(256, 1.0, 2)
    x0, x1 = g.mesh()
    f = np.exp(-((x0 - 3) ** 2 + (x1 + 5) ** 2) / (2 * 32.0**2))
    f[g.radius_squared() > reconstruction_radius(g) ** 2] = 0
    angles = uniform_angles(8)
    s = radon_2d(f, angles, grid=g)
    F1 = ft_array(s.values.astype(complex), s.detector)
    sigma = s.detector.dual().axis()
    peak = np.sqrt(2 * np.pi) * f.sum() / (2 * np.pi)
    for row, t in zip(F1, angles):
        assert np.max(np.abs(row - np.sqrt(2 * np.pi) * direct_slice(f, g, sigma, t))) <= 1e-4 * peak


def test_radon_rejects_field_outside_disc():
    g = Grid.uniform(32, 1.0, 2)
    f = np.zeros(g.shape)
    f[0, 16] = 1
    with pytest.raises(SupportError):
        radon_2d(f, [0.0], grid=g)


# --- projections and phase wrapping -------------------------------------------------------

def test_project_zero_volume():
    g = Grid.uniform(32, 1.0, 2)
    _, o = project_volume(Volume.zeros(g), 0.3, 2.0)
    assert np.all(o.o.values == 1)


def test_project_phase_disc():
    n, R, k = 256, 64.0, 1.0
    g = Grid.uniform(n, 1.0, 2)
    delta0 = 1.0 / (2 * k * R)  # peak k R delta = 1
    v = Volume(g, phantom_disc(g, R, delta0, 0.0, smooth_edge=True).phi, np.zeros(g.shape))
    proj, o = project_volume(v, 0.7, k)
    assert np.max(np.abs(np.abs(o.o.values) - 1)) <= 1e-15
    x = proj.grid.axis()
    inner = np.abs(x) <= 0.9 * R
    expected = -2 * np.sqrt(R**2 - x[inner] ** 2) * k * delta0
    phase = np.angle(o.o.values[inner])
    assert np.max(np.abs(phase - expected) / np.abs(expected)) <= 0.01


def test_project_pure_absorber():
    g = Grid.uniform(64, 1.0, 2)
    v = Volume(g, np.zeros(g.shape), phantom_disc(g, 12, 0.05, 0.0).phi)
    _, o = project_volume(v, 1.1, 1.0)
    assert np.all(o.o.values.imag == 0)
    assert np.all((o.o.values.real > 0) & (o.o.values.real <= 1))


def test_phase_wrap_check_on_zero_volume():
    assert check_no_phase_wrap(Volume.zeros(Grid.uniform(32, 1.0, 2)), 1.0) == 0


def test_phase_wrap_check_matches_disc_peak():
    n, R, k = 256, 64.0, 2.0
    g = Grid.uniform(n, 1.0, 2)
    delta0 = 0.02
    v = Volume(g, phantom_disc(g, R, delta0, 0.0, smooth_edge=True).phi, np.zeros(g.shape))
    assert check_no_phase_wrap(v, k) == pytest.approx(2 * k * delta0 * R, rel=0.01)


def test_phase_wrap_check_rejects_strong_phantom():
    g = Grid.uniform(64, 1.0, 2)
    v = phantom_blobs(g, 1.0, 6.4, 0.1)
    with pytest.raises(PhaseWrapError) as info:
        check_no_phase_wrap(v, 1.0)
    assert info.value.theta is not None and info.value.value >= 2 * np.pi
    with pytest.warns(UserWarning):
        assert check_no_phase_wrap(v, 1.0, warn_only=True) == pytest.approx(6.4, rel=1e-12)


def test_log_transmission_examples():
    rd, rb = log_transmission(np.ones(4), 1.0)
    assert not rd.any() and not rb.any()
    rd, rb = log_transmission(np.array([np.exp(-1j - 0.1)]), 1.0)
    npt.assert_allclose([rd[0], rb[0]], [1.0, 0.1], rtol=1e-15)
    rd, _ = log_transmission(np.array([np.exp(-3.5j)]), 2.0)
    npt.assert_allclose(rd, 1.75, rtol=1e-15)
    rd, _ = log_transmission(np.array([np.exp(1e-3j)]), 1.0)
    assert rd[0] == pytest.approx(2 * np.pi - 1e-3)
    rd, _ = log_transmission(np.array([np.exp(1e-3j)]), 1.0, branch_tol=0.01)
    assert rd[0] == pytest.approx(-1e-3)
    with pytest.raises(ZeroTransmission):
        log_transmission(np.array([1.0, 1e-15]), 1.0)


# --- filtered backprojection -----------------------------------------------------------------

def test_fbp_of_zero_is_zero():
    s = Sinogram(uniform_angles(10), Grid.uniform(32, 1.0), np.zeros((10, 32)))
    assert not fbp_reconstruct(s).any()


def test_fbp_is_linear():
    rng = np.random.default_rng(23)
    det = Grid.uniform(32, 1.0)
    s1 = Sinogram(uniform_angles(12), det, rng.normal(size=(12, 32)))
    s2 = s1.with_values(rng.normal(size=(12, 32)))
    lhs = fbp_reconstruct(s1.with_values(2.5 * s1.values - 0.5 * s2.values))
    rhs = 2.5 * fbp_reconstruct(s1) - 0.5 * fbp_reconstruct(s2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.abs(rhs).max()


def test_fbp_needs_two_uniform_angles():
    det = Grid.uniform(16, 1.0)
    with pytest.raises(ValueError):
        fbp_reconstruct(Sinogram([0.0], det, np.zeros((1, 16))))
    with pytest.raises(ValueError):
        fbp_reconstruct(Sinogram([0.0, 0.1, 0.5], det, np.zeros((3, 16))))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fbp_round_trip(seed):
    g = Grid.uniform(64, 1.0, 2)
    v = phantom_blobs(g, 1.0, 0.5, 0.05, seed=seed)
    errors = []
    for count in (45, 90, 180):
        r = fbp_reconstruct(radon_2d(v.delta, uniform_angles(count), grid=g))
        errors.append(np.linalg.norm(r - v.delta) / np.linalg.norm(v.delta))
    assert errors[-1] <= 0.05
    assert errors[0] > errors[1] > errors[2]


def test_fbp_hann_window_smooths():
    g = Grid.uniform(64, 1.0, 2)
    v = phantom_blobs(g, 1.0, 0.5, 0.05)
    s = radon_2d(v.delta, uniform_angles(90), grid=g)
    hann = fbp_reconstruct(s, window="hann")
    assert np.linalg.norm(hann - v.delta) / np.linalg.norm(v.delta) <= 0.1
    with pytest.raises(ValueError):
        fbp_reconstruct(s, window="cosine")


# --- per-angle holograms -------------------------------------------------------------------------

def slice_geometry(n):
    return ImagingGeometry.critical(2 * n, pixel=1.0, k=1.0, m=1)


def test_tomo_forward_zero_volume():
    g = Grid.uniform(32, 1.0, 2)
    images = tomo_forward(Volume.zeros(g), PlaneWave(1.5), slice_geometry(32), uniform_angles(4))
    for im in images:
        assert np.max(np.abs(im.values - 2.25)) <= 1e-12


def test_tomo_forward_flux_and_permutation():
    g = Grid.uniform(32, 1.0, 2)
    v = phantom_blobs(g, 1.0, 0.5, 0.05)
    geom = slice_geometry(32)
    angles = uniform_angles(6)
    images = tomo_forward(v, PlaneWave(1.0), geom, angles, pad_factor=1)
    for t, im in zip(angles, images):
        _, o = project_volume(v, t, geom.k, im.grid)
        flux = np.sum(np.abs(o.o.values) ** 2)
        assert abs(im.values.sum() - flux) <= 1e-9 * flux
    order = [3, 0, 5, 1, 4, 2]
    permuted = tomo_forward(v, PlaneWave(1.0), geom, angles[order], pad_factor=1)
    for i, j in enumerate(order):
        assert np.array_equal(permuted[i].values, images[j].values)


def test_tomo_forward_checks_wrapping():
    g = Grid.uniform(32, 1.0, 2)
    v = phantom_blobs(g, 1.0, 7.0, 0.05)
    with pytest.raises(PhaseWrapError):
        tomo_forward(v, PlaneWave(1.0), slice_geometry(32), uniform_angles(4))
    with pytest.warns(UserWarning):
        tomo_forward(v, PlaneWave(1.0), slice_geometry(32), uniform_angles(2), allow_wrap=True)


def test_tomo_forward_needs_slice_geometry():
    g = Grid.uniform(32, 1.0, 2)
    with pytest.raises(ValueError):
        tomo_forward(Volume.zeros(g), PlaneWave(1.0), ImagingGeometry(1.0, 1.0, 1.0, m=2), [0.0])
