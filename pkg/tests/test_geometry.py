"""Curved-geometry backend: closed forms, Taylor tables, supercharts, bundles."""

import math

import pytest

from superjet import (
    BundlePoint,
    BundleTangent,
    DomainError,
    GrassmannElement,
    SplitMix64,
    SuperPoint,
    bundle_exp,
    local_detrivialize,
    local_trivialize,
    make_backend,
)
from superjet.suites import fd_derivative, jet_fd_defect, random_sphere_point, random_tangent


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def tangent_frame(x):
    """Two orthonormal tangent vectors at x on the unit sphere."""
    axis = min(range(3), key=lambda i: abs(x[i]))
    e = [0.0, 0.0, 0.0]
    e[axis] = 1.0
    u = [e[i] - x[i] * x[axis] for i in range(3)]
    nu = math.sqrt(dot(u, u))
    u = [c / nu for c in u]
    v = [
        x[1] * u[2] - x[2] * u[1],
        x[2] * u[0] - x[0] * u[2],
        x[0] * u[1] - x[1] * u[0],
    ]
    return u, v


def test_flat_backend_is_affine():
    flat = make_backend("flat:2")
    x, v = [1.0, 2.0], [0.25, -1.0]
    y = flat.geo_exp(x, v)
    assert y == (1.25, 1.0)
    assert flat.geo_log(x, y) == (0.25, -1.0)
    assert flat.geo_pt(x, y, v) == tuple(v)
    assert flat.geo_dist(x, y) == pytest.approx(math.sqrt(dot(v, v)))


def test_sphere_exp_log_roundtrip():
    sphere = make_backend("sphere2")
    rng = SplitMix64(30)
    for _ in range(25):
        x = random_sphere_point(rng)
        v = random_tangent(rng, x)
        y = sphere.geo_exp(x, v)
        assert abs(dot(y, y) - 1.0) < 1e-12
        back = sphere.geo_log(x, y)
        assert max(abs(a - b) for a, b in zip(back, v)) < 1e-9
        assert sphere.geo_dist(x, y) == pytest.approx(math.sqrt(dot(v, v)), abs=1e-9)


def test_sphere_transport_is_isometric_and_tangent():
    sphere = make_backend("sphere2")
    rng = SplitMix64(31)
    for _ in range(25):
        x = random_sphere_point(rng)
        y = sphere.geo_exp(x, random_tangent(rng, x))
        w1 = random_tangent(rng, x)
        w2 = random_tangent(rng, x)
        t1 = sphere.geo_pt(x, y, w1)
        t2 = sphere.geo_pt(x, y, w2)
        assert abs(dot(t1, t2) - dot(w1, w2)) < 1e-9
        assert abs(dot(t1, y)) < 1e-9


def test_sphere_rejects_bad_inputs():
    sphere = make_backend("sphere2")
    with pytest.raises(DomainError):
        sphere.geo_exp([0.0, 0.0, 2.0], [0.1, 0.0, 0.0])
    with pytest.raises(DomainError):
        sphere.geo_exp([0.0, 0.0, 1.0], [0.0, 0.0, 0.5])  # not tangent
    with pytest.raises(DomainError):
        sphere.geo_log([0.0, 0.0, 1.0], [0.0, 0.0, -1.0])  # antipodal


def test_log_jet_coefficients_match_finite_differences():
    sphere = make_backend("sphere2")
    x = [0.0, 0.0, 1.0]
    y0 = sphere.exp_closed(x, [0.3, -0.2, 0.0])
    jet = sphere.log_jet(x, list(y0), 2)
    fns = [lambda y, j=j: sphere.log_closed(x, y)[j] for j in range(3)]
    assert jet_fd_defect(jet, fns, max_order=2) < 1e-6


def test_transition_jet_matches_closed_transition():
    sphere = make_backend("sphere2")
    x1 = [0.0, 0.0, 1.0]
    x2 = sphere.exp_closed(x1, [0.35, 0.1, 0.0])
    v0 = [0.2, -0.1, 0.0]
    jet = sphere.transition_jet(x1, x2, v0, 3)

    def closed(v, j):
        return sphere.log_closed(x2, sphere.exp_closed(x1, v))[j]

    for j in range(3):
        assert jet.base_value[j] == pytest.approx(closed(v0, j), abs=1e-12)
        for axis in range(3):
            I = tuple(1 if i == axis else 0 for i in range(3))
            fd = fd_derivative(lambda v, j=j: closed(v, j), v0, I)
            assert jet.coefficient(I)[j] == pytest.approx(fd, abs=1e-7)


def chart_side_point(sphere, f_x):
    """A model-space Lambda_2-point whose slots all lie in T_{f_x}."""
    u, v = tangent_frame(f_x)
    body = [0.2 * ui + 0.1 * vi for ui, vi in zip(u, v)]
    soul = [-0.15 * ui + 0.05 * vi for ui, vi in zip(u, v)]
    even = [GrassmannElement(2, {0: body[i], 3: soul[i]}) for i in range(3)]
    odd = [GrassmannElement(2, {1: 1.0})]
    return SuperPoint(2, even, odd)


def test_superchart_roundtrip_from_the_model_side():
    sphere = make_backend("sphere2")
    f_x = [3.0 / 5.0, 0.0, 4.0 / 5.0]
    xi = chart_side_point(sphere, f_x)
    mu = sphere.superchart_pointwise_inv(f_x, xi)
    back = sphere.superchart_pointwise(f_x, mu)
    for a, b in zip(back.even, xi.even):
        for m in set(a.terms) | set(b.terms):
            assert a.terms.get(m, 0.0) == pytest.approx(b.terms.get(m, 0.0), abs=1e-9)
    assert back.odd == xi.odd  # odd coordinates pass through untouched


def test_superchart_image_satisfies_unit_constraint():
    # the inverse chart must land on the super-sphere: sum x_i^2 == 1 in Lambda_n
    sphere = make_backend("sphere2")
    f_x = [0.0, 1.0, 0.0]
    mu = sphere.superchart_pointwise_inv(f_x, chart_side_point(sphere, f_x))
    total = GrassmannElement.zero(2)
    for c in mu.even:
        total = total + c * c
    for mask, value in total.terms.items():
        target = 1.0 if mask == 0 else 0.0
        assert value == pytest.approx(target, abs=1e-9)


def test_superchart_insensitive_to_extra_truncation_order():
    sphere = make_backend("sphere2")
    f_x = [3.0 / 5.0, 0.0, 4.0 / 5.0]
    xi = chart_side_point(sphere, f_x)
    lo = sphere.superchart_pointwise_inv(f_x, xi)  # default k = (n+q)//2
    hi = sphere.superchart_pointwise_inv(f_x, xi, k=4)
    for a, b in zip(lo.even, hi.even):
        for m in set(a.terms) | set(b.terms):
            assert a.terms.get(m, 0.0) == pytest.approx(b.terms.get(m, 0.0), abs=1e-12)


def test_bundle_exp_preserves_fibre_norm():
    sphere = make_backend("sphere2", bundle_rank=1)
    x = [1.0, 0.0, 0.0]
    w = [0.0, 0.3, -0.4]
    a = BundlePoint(x, [w])
    xi = BundleTangent([0.0, 0.5, 0.25], [[0.0, 0.1, 0.2]])
    b = bundle_exp(sphere, a, xi)
    expected = [wi + di for wi, di in zip(w, xi.vertical[0])]
    assert dot(b.fibre[0], b.fibre[0]) == pytest.approx(dot(expected, expected), abs=1e-9)
    assert abs(dot(b.fibre[0], b.base)) < 1e-9


def test_trivialization_roundtrip():
    sphere = make_backend("sphere2", bundle_rank=1)
    rng = SplitMix64(33)
    f_samples = []
    sigma_samples = []
    for _ in range(4):
        x = random_sphere_point(rng)
        f_samples.append(x)
        y = list(sphere.geo_exp(x, random_tangent(rng, x, hi=0.6)))
        # fibre vectors live in the tangent plane at the section's own base y
        sigma_samples.append(BundlePoint(y, [random_tangent(rng, y, hi=0.5)]))
    pairs = local_trivialize(sphere, f_samples, sigma_samples)
    back = local_detrivialize(sphere, f_samples, pairs)
    for orig, rec in zip(sigma_samples, back):
        assert max(abs(a - b) for a, b in zip(orig.base, rec.base)) < 1e-9
        assert max(abs(a - b) for a, b in zip(orig.fibre[0], rec.fibre[0])) < 1e-9


def test_trivialization_reports_failing_sample_index():
    sphere = make_backend("sphere2", bundle_rank=1)
    x = [1.0, 0.0, 0.0]
    bad = BundlePoint([-1.0, 0.0, 0.0], [[0.0, 0.0, 0.0]])  # antipodal to x
    with pytest.raises(DomainError, match="sample 0"):
        local_trivialize(sphere, [x], [bad])
