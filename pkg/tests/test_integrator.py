import math

import numpy as np
import pytest

from scaledlattice.errors import ComputationError, DomainError
from scaledlattice.integrator import (
    DecayCondition,
    IntegrandSpec,
    integrate,
    lattice_rule_on_box,
    select_box,
    total_error_bound_report,
    truncation_bound,
)
from scaledlattice.lattice import BoxDomain, GeneratingVector

NORMAL = DecayCondition.exponential(0.5, p=2.0, q=2.0)


def spec(fn, d=1, alpha=1, decay=NORMAL, **kw):
    return IntegrandSpec(fn, d, alpha, decay, **kw)


def normal_density(p):
    return np.exp(-0.5 * np.sum(p * p, axis=1)) / (2 * math.pi) ** (p.shape[1] / 2)


class TestSelectBox:
    def test_logistic_example(self):
        box = select_box(DecayCondition.exponential(0.5, q=1.0), 2, 1, 1024)
        assert box.upper[0] == pytest.approx(4 * math.log(1024), rel=1e-15)
        assert box.lower[0] == -box.upper[0]

    def test_normal_example(self):
        box = select_box(NORMAL, 1, 1, 1024)
        assert box.upper[0] == pytest.approx(math.sqrt(2 * math.log(1024)), rel=1e-15)
        assert box.upper[0] == pytest.approx(3.7233, abs=1e-4)

    def test_polynomial_example(self):
        box = select_box(DecayCondition.polynomial(2.0), 1, 1, 16)
        assert box.upper[0] == pytest.approx(16 ** (1 / 2.5), rel=1e-15)

    def test_polynomial_t_is_3_for_alpha_2(self):
        box = select_box(DecayCondition.polynomial(5.0), 2, 2, 4096)
        assert box.upper[0] == pytest.approx(4096 ** (2 / 8), rel=1e-15)

    def test_symmetric_cube(self):
        box = select_box(NORMAL, 2, 3, 256)
        assert box.d == 3
        assert np.all(box.lower == -box.upper)

    @pytest.mark.parametrize("decay", [NORMAL, DecayCondition.exponential(1.0, q=1.0), DecayCondition.polynomial(7.0)])
    def test_monotone(self, decay):
        for alpha in (1, 2, 3):
            widths = [select_box(decay, alpha, 2, 2 ** m).upper[0] for m in range(1, 20)]
            assert all(x <= y for x, y in zip(widths, widths[1:]))
        for m in (4, 10):
            widths = [select_box(decay, alpha, 2, 2 ** m).upper[0] for alpha in (1, 2, 3)]
            assert all(x < y for x, y in zip(widths, widths[1:]))

    def test_n_too_small(self):
        with pytest.raises(DomainError):
            select_box(NORMAL, 1, 1, 1)

    def test_polynomial_hypothesis(self):
        with pytest.raises(DomainError, match="beta > d"):
            select_box(DecayCondition.polynomial(2.0), 3, 1, 16)


class TestIntegrate:
    def test_zero(self):
        for n in (2, 7, 64):
            res = integrate(spec(lambda p: np.zeros(p.shape[0]), d=2), GeneratingVector(n, (1, 3)))
            assert res.estimate == 0.0

    def test_normal_density(self):
        res = integrate(spec(normal_density), GeneratingVector(1024, (1,)))
        a = res.half_width
        assert a == pytest.approx(3.7233, abs=1e-4)
        assert res.n == 1024
        # the 1D lattice is the left rectangle rule; with f(-a) = f(a) its error
        # is the Euler-Maclaurin term h^2/12 (f'(a) - f'(-a)).  What remains
        # is the normal mass outside [-a, a], about 2e-4 (above a 1e-4 target)
        h = 2 * a / 1024
        slope_jump = -2 * a * math.exp(-a * a / 2) / math.sqrt(2 * math.pi)
        inside = math.erf(a / math.sqrt(2))
        assert abs(res.estimate - (inside + h * h / 12 * slope_jump)) <= 1e-11
        assert abs(res.estimate - 1) <= 2.1e-4

    def test_f2_sigma1(self):
        f = spec(lambda p: np.prod((1 + np.abs(p)) * np.exp(-p * p / 2) / math.sqrt(2 * math.pi), axis=1), d=2)
        res = integrate(f, GeneratingVector.fixed(2 ** 14, 2))
        assert abs(res.estimate - (1 + math.sqrt(2 / math.pi)) ** 2) <= 1e-3

    @pytest.mark.parametrize("n", [1, 5, 64, 1000])
    def test_constant_gives_volume(self, n):
        box = BoxDomain(((-1.3, 2.9), (0.1, 0.7)))
        q = lattice_rule_on_box(lambda p: np.ones(p.shape[0]), GeneratingVector(n, (1, 3)), box)
        assert abs(q - box.volume) <= 8 * n * np.spacing(box.volume)

    def test_deterministic(self):
        f = spec(normal_density, d=2)
        gv = GeneratingVector.fixed(4096, 2)
        assert integrate(f, gv).estimate == integrate(f, gv).estimate

    def test_explicit_box_is_used(self):
        box = BoxDomain.cube(-2, 2, 1)
        res = integrate(spec(normal_density), GeneratingVector(64, (1,)), box=box)
        assert res.box is box

    def test_non_finite_reports_node(self):
        def f(p):
            out = np.ones(p.shape[0])
            out[5] = np.nan
            return out

        with pytest.raises(ComputationError, match="i = 6"):
            integrate(spec(f), GeneratingVector(16, (1,)))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            integrate(spec(normal_density, d=2), GeneratingVector(16, (1,)))

    def test_bounds_fields(self):
        f = spec(normal_density, decay=DecayCondition.exponential(0.4, p=2.0, q=2.0), decay_norm=0.5, sobolev_norm=1.0)
        res = integrate(f, GeneratingVector(256, (1,)), bounds=True)
        assert res.bound_truncation > 0 and res.bound_projection > 0 and res.bound_cubature_factor > 0
        assert integrate(f, GeneratingVector(256, (1,))).bound_truncation is None


class TestTruncationBound:
    def test_exponential_example(self):
        val = truncation_bound(DecayCondition.exponential(1.0, q=1.0), 1.0, 1, 1, 1.0)
        assert abs(val - 2 / math.e) <= 1e-12

    def test_polynomial_example(self):
        assert truncation_bound(DecayCondition.polynomial(2.0), 1.0, 1, 1, 10.0) == pytest.approx(0.2, rel=1e-15)

    @pytest.mark.parametrize("decay, widths", [
        (DecayCondition.exponential(0.7, q=2.0), (2.0, 4.0, 8.0, 16.0)),
        (DecayCondition.polynomial(4.0), (10.0, 1e2, 1e3, 1e5)),
    ])
    def test_vanishes(self, decay, widths):
        vals = [truncation_bound(decay, 1.0, 1, 2, a) for a in widths]
        assert all(x > y for x, y in zip(vals, vals[1:]))
        assert vals[-1] < 1e-8

    def test_polynomial_needs_beta_above_d(self):
        with pytest.raises(DomainError):
            truncation_bound(DecayCondition.polynomial(2.0), 1.0, 1, 2, 10.0)

    def test_bad_half_width(self):
        with pytest.raises(DomainError):
            truncation_bound(NORMAL, 1.0, 1, 1, 0.0)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 4.0])
    def test_dominates_laplace_tail(self, a):
        # f = exp(-|x|_1) / 4 on R^2: sup exp(|x|_inf) f <= 1/4, tail mass 1 - (1 - e^-a)^2
        tail = (1 - (1 - math.exp(-a)) ** 2)
        bound = truncation_bound(DecayCondition.exponential(1.0, p=math.inf, q=1.0), 1 / 4, 1, 2, a)
        assert tail <= bound


class TestReport:
    def test_zero_norms(self):
        f = spec(normal_density, d=2, alpha=2, decay_norm=0.0, sobolev_norm=0.0)
        rep = total_error_bound_report(f, GeneratingVector.fixed(256, 2))
        assert (rep.truncation, rep.cubature, rep.projection) == (0.0, 0.0, 0.0)
        assert rep.total == 0.0

    def test_parts_decrease_along_schedule(self):
        decay = DecayCondition.exponential(0.4, p=2.0, q=2.0)
        f = spec(normal_density, d=2, alpha=2, decay=decay, decay_norm=1.0, sobolev_norm=1.0)
        reps = [total_error_bound_report(f, GeneratingVector.fixed(2 ** m, 2)) for m in range(6, 18)]
        for part in ("truncation", "cubature", "projection"):
            seq = [getattr(r, part) for r in reps]
            assert all(x > y for x, y in zip(seq, seq[1:])), part

    def test_unit_box_single_point(self):
        f = spec(normal_density, decay_norm=0.0, sobolev_norm=2.0)
        rep = total_error_bound_report(f, GeneratingVector(1, (1,)), BoxDomain.cube(0, 1, 1))
        assert rep.cubature == pytest.approx(2 * math.sqrt(1 / 12), rel=1e-14)

    def test_box_touching_origin_has_infinite_truncation(self):
        f = spec(normal_density, decay_norm=1.0)
        rep = total_error_bound_report(f, GeneratingVector(8, (1,)), BoxDomain.cube(0, 1, 1))
        assert rep.truncation == math.inf
