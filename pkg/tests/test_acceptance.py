"""Acceptance gate; one summary line per criterion is printed at the end of the run."""

import math
import time

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import criterion
from rearrangement.diagnostics import (
    DEFAULT_PROBES,
    MONOTONE_SLACK,
    convergence_study,
    dirichlet_counterexample,
    equimeasurability_check,
    grid_fraction_check,
    hat_family,
    riemann_sum_check,
)
from rearrangement.domain import disk, rectangle
from rearrangement.expr import ScalarField
from rearrangement.grid import Grid, GridSpec, Rectangle, generate
from rearrangement.oracle import DistributionEstimate, empirical_cdf, generalized_inverse, oracle_quantile, tabulate
from rearrangement.rearrange import RearrangementSpline, SampleVector, StepRearrangement, rearrange_pipeline

PROBES = np.asarray(DEFAULT_PROBES)
SQUARE = Rectangle((-1.0, -1.0), (1.0, 1.0))
UNIT_DISK = disk((0.0, 0.0), 1.0)
R2 = "x1^2 + x2^2"
PROPERTY = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _report(k, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")


@criterion(1, "identity convergence, n=1000, error <= 2/1000, runtime < 1 s")
def test_criterion_1_identity():
    t0 = time.perf_counter()
    spline = rearrange_pipeline(ScalarField.identity(1), rectangle((0.0,), (1.0,)), Rectangle.unit(1), (1000,))
    err = float(np.max(np.abs(spline(PROBES) - PROBES)))
    dt = time.perf_counter() - t0
    _report(1, err <= 2e-3 and dt < 1.0, f"error {err:.3g}, {dt:.3f} s")
    assert err <= 2 / 1000
    assert dt < 1.0
    return f"error {err:.3g}, {dt:.3f} s"


def _sum_quantile(y):
    y = np.asarray(y)
    return np.where(y <= 0.5, np.sqrt(2 * y), 2 - np.sqrt(2 * np.clip(1 - y, 0, None)))


@criterion(2, "x1+x2 on [0,1]^2, n=(256,256), error <= 0.02, runtime < 5 s")
def test_criterion_2_sum():
    f = ScalarField.from_expression("x1 + x2", 2)
    box = rectangle((0.0, 0.0), (1.0, 1.0))
    t0 = time.perf_counter()
    spline = rearrange_pipeline(f, box, Rectangle.unit(2), (256, 256))
    err = float(np.max(np.abs(spline(PROBES) - _sum_quantile(PROBES))))
    dt = time.perf_counter() - t0
    # the closed form is cross-checked against the counting oracle
    cross = float(np.max(np.abs(oracle_quantile(f, box, PROBES, (1024, 1024)) - _sum_quantile(PROBES))))
    _report(2, err <= 0.02 and dt < 5.0 and cross <= 5e-3, f"error {err:.3g}, {dt:.3f} s, oracle gap {cross:.3g}")
    assert err <= 0.02
    assert dt < 5.0
    assert cross <= 5e-3
    return f"error {err:.3g}, {dt:.3f} s"


@criterion(3, "unit disk grid fraction at midpoint (512,512), gap <= 0.01, runtime < 2 s")
def test_criterion_3_disk_fraction():
    t0 = time.perf_counter()
    fraction, target, gap = grid_fraction_check(Grid(GridSpec(SQUARE, (512, 512), "midpoint")), UNIT_DISK)
    dt = time.perf_counter() - t0
    _report(3, gap <= 0.01 and dt < 2.0, f"fraction {fraction:.6f}, gap {gap:.3g}, {dt:.3f} s")
    assert target == math.pi / 4
    assert gap <= 0.01
    assert dt < 2.0
    return f"gap {gap:.3g}, {dt:.3f} s"


@criterion(4, "uniform convergence of r^2 on the disk, (32,32)..(256,256), non-increasing, final <= 0.03")
def test_criterion_4_uniform():
    probes = np.concatenate([[0.0], PROBES, [1.0]])
    report = convergence_study(ScalarField.from_expression(R2, 2), UNIT_DISK, SQUARE,
                               [(32, 32), (64, 64), (128, 128), (256, 256)], placement="midpoint",
                               probes=probes)
    errs = report.sup_errors()
    ok = report.is_non_increasing(MONOTONE_SLACK) and errs[-1] <= 0.03
    detail = "sup errors " + ", ".join(f"{e:.3g}" for e in errs)
    _report(4, ok, detail)
    assert None not in errs
    assert report.is_non_increasing(MONOTONE_SLACK)
    assert errs[-1] <= 0.03
    return detail


@criterion(5, "equimeasurability with 9 hats of width 0.25, n=(128,128), Simpson 2048, <= 0.02")
def test_criterion_5_equimeasurability():
    f = ScalarField.from_expression(R2, 2)
    grid = generate(GridSpec(SQUARE, (128, 128), "midpoint"))
    spline = rearrange_pipeline(f, UNIT_DISK, SQUARE, (128, 128), "midpoint")
    # r^2 takes values in [0, 1] on the disk
    worst = equimeasurability_check(f, UNIT_DISK, spline, hat_family(np.linspace(0, 1, 9), 0.25), 2048, grid=grid)
    _report(5, worst <= 0.02, f"max discrepancy {worst:.3g}")
    assert worst <= 0.02
    return f"max discrepancy {worst:.3g}"


@criterion(6, "Riemann sum of x1*x2 at midpoint (100,100), error <= 1e-4")
def test_criterion_6_riemann():
    grid = generate(GridSpec(Rectangle.unit(2), (100, 100), "midpoint"))
    err = riemann_sum_check(ScalarField.from_expression("x1 * x2", 2), grid, Rectangle.unit(2), 0.25)
    _report(6, err <= 1e-4, f"error {err:.3g}")
    assert err <= 1e-4
    return f"error {err:.3g}"


@criterion(7, "Dirichlet marker, n in {100, 10000}: spline == 1 exactly, non-convergent at every probe")
def test_criterion_7_dirichlet():
    report = dirichlet_counterexample((100, 10000))
    dev = max(rec.max_deviation_from_one for rec in report.records)
    ok = dev == 0.0 and report.reference_value == 0.0 and report.fails_everywhere
    _report(7, ok, f"max deviation {dev}, {len(report.nonconvergent_probes)}/{len(report.probes)} probes flagged")
    assert dev == 0.0
    assert report.reference_value == 0.0
    assert report.fails_everywhere
    return f"max deviation {dev}, all {len(report.probes)} probes flagged"


# criterion 8: property suites

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
raw_samples = st.lists(finite, min_size=2, max_size=200)
levels = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=50)


def _close(a, b, scale):
    return np.all(np.abs(np.asarray(a) - np.asarray(b)) <= 1e-12 * max(scale, 1e-300))


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(raw_samples, levels)
def test_criterion_8_monotonicity(raw, ys):
    spline = RearrangementSpline(SampleVector.from_unsorted(raw))
    y = np.sort(np.asarray(ys))
    assert np.all(np.diff(spline(y)) >= 0)


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(raw_samples)
def test_criterion_8_node_interpolation(raw):
    spline = RearrangementSpline(SampleVector.from_unsorted(raw))
    ell = np.arange(spline.omega + 1)
    assert np.array_equal(spline(ell / spline.omega), spline.values)


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(raw_samples)
def test_criterion_8_endpoints(raw):
    spline = RearrangementSpline(SampleVector.from_unsorted(raw))
    assert spline(0.0) == min(raw) and spline(1.0) == max(raw)


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(raw_samples, levels, st.floats(0.0, 1e3), st.floats(-1e3, 1e3))
def test_criterion_8_affine(raw, ys, alpha, beta):
    raw = np.asarray(raw)
    base = RearrangementSpline(SampleVector.from_unsorted(raw))
    moved = RearrangementSpline(SampleVector.from_unsorted(alpha * raw + beta))
    y = np.asarray(ys)
    scale = alpha * np.max(np.abs(raw)) + abs(beta)
    assert _close(moved(y), alpha * base(y) + beta, scale)


# monotone in floating point: each is a composition of correctly rounded monotone steps
MONOTONE = [lambda t: 2.5 * t - 1.0, lambda t: t * np.abs(t), np.floor, lambda t: np.maximum(t, 0.3), np.tanh]


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(raw_samples, st.integers(0, len(MONOTONE) - 1))
def test_criterion_8_monotone_composition(raw, which):
    g = MONOTONE[which]
    raw = np.asarray(raw) / 1e5
    f_spline = RearrangementSpline(SampleVector.from_unsorted(raw))
    gf_spline = RearrangementSpline(SampleVector.from_unsorted(g(raw)))
    nodes = f_spline.nodes()
    assert _close(gf_spline(nodes), g(f_spline(nodes)), np.max(np.abs(g(raw))))


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(st.lists(finite, min_size=2, max_size=5000))
def test_criterion_8_step_spline_nodes(raw):
    spline = RearrangementSpline(SampleVector.from_unsorted(raw))
    step = spline.step()
    nodes = np.arange(spline.omega + 1) / spline.omega
    assert np.array_equal(step(nodes), spline(nodes))


FIELDS = ["sin(5*x1) + x2", "x1 * x2", "abs(x1 - x2)", "floor(3*x1) + x2^2", "max(x1, x2)"]
REGIONS = [rectangle((0.0, 0.0), (1.0, 1.0)), disk((0.5, 0.5), 0.5), disk((0.2, 0.7), 0.4)]


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(st.integers(0, len(FIELDS) - 1), st.integers(0, len(REGIONS) - 1), st.integers(2, 24),
       st.integers(2, 24), st.sampled_from(["reference", "midpoint", "jittered", "corner"]),
       st.integers(0, 2**64 - 1), st.floats(-1, 2))
def test_criterion_8_discrete_equimeasurability(fi, ri, n1, n2, placement, seed, u):
    f, region = ScalarField.from_expression(FIELDS[fi], 2), REGIONS[ri]
    grid = generate(GridSpec(Rectangle.unit(2), (n1, n2), placement, seed))
    inside = region.mask(grid.points)
    if inside.sum() < 2:
        return
    raw = f(grid.points[inside])
    spline = rearrange_pipeline(f, region, Rectangle.unit(2), (n1, n2), placement, seed)
    assert np.count_nonzero(spline.values <= u) == np.count_nonzero(raw <= u)
    assert np.array_equal(np.sort(raw), spline.values)


@criterion(8, "property suites, 1000 cases each")
@PROPERTY
@given(st.integers(1, 3), st.lists(st.integers(1, 12), min_size=3, max_size=3),
       st.sampled_from(["reference", "midpoint", "jittered", "corner"]), st.integers(0, 2**64 - 1))
def test_criterion_8_grid_determinism(d, n, placement, seed):
    spec = GridSpec(Rectangle((-1.0,) * d, (2.0,) * d), tuple(n[:d]), placement, seed)
    once = generate(spec).points
    again = generate(GridSpec(spec.rect, spec.n, spec.placement, spec.seed)).points
    assert once.tobytes() == again.tobytes()
    chunked = np.concatenate([pts for _, pts in Grid(spec).chunks(size=7)])
    assert chunked.tobytes() == once.tobytes()


# criterion 9: oracle self-consistency

@criterion(9, "oracle self-consistency")
def test_criterion_9_inverse_monotone():
    rng = np.random.default_rng(20240601)
    y = np.sort(np.concatenate([rng.uniform(0, 1, 200), [1.0], rng.uniform(0, 1e-3, 10)]))
    y = y[y > 0]
    for trial in range(10_000):
        k = int(rng.integers(1, 60))
        u = np.cumsum(rng.exponential(size=k)) - rng.normal()
        mass = rng.exponential(size=k) * (rng.uniform(size=k) < 0.8)
        if mass.sum() == 0:
            mass[-1] = 1.0
        total = np.cumsum(mass)
        F = total / total[-1]
        q = generalized_inverse(DistributionEstimate(u, F), y)
        assert np.all(np.diff(q) >= 0), trial
        # inf{u_k : F(u_k) >= y}, by brute force
        brute = np.array([u[np.argmax(F >= t)] for t in y[::20]])
        assert np.array_equal(q[::20], brute), trial
    return "10000 random CDFs"


@criterion(9, "oracle self-consistency")
def test_criterion_9_shared_counts():
    f = ScalarField.from_expression("sin(3*x1) * x2 + floor(2*x2)", 2)
    region = disk((0.5, 0.5), 0.5)
    cdf = empirical_cdf(f, region, (300, 300))
    # the step rearrangement of the same samples, read back through its mass per level
    pts = generate(GridSpec(region.bounding, (300, 300), "midpoint")).points
    values = np.sort(f(pts[region.mask(pts)]))
    step = StepRearrangement(SampleVector(values))
    m = step.omega + 1
    mids = (np.arange(m) + 0.5) / m
    levels_of_step = step(mids)
    F_step = np.searchsorted(np.sort(levels_of_step), cdf.thresholds, side="right") / m
    assert np.array_equal(F_step, cdf.values)
    assert np.array_equal(tabulate(values).values, cdf.values)
    return "exact at every threshold"
