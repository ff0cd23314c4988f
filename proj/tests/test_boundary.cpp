#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poisson_bv/boundary.hpp"

using namespace poisson_bv;

namespace {

const SpaceModel h2 = make_model(ModelId::h2);
const SpaceModel h3 = make_model(ModelId::h3);
const SpaceModel h2xh2 = make_model(ModelId::h2xh2);

}  // namespace

TEST(LeadingCoefficient, SyntheticRankOne) {
    // u = t^σ (A + a t + b t²) + t^{σ+2λ} (B + c t), σ = ½ − λ
    for (cplx lam : {cplx(0.7), cplx(0.3), cplx(0.4, 0.2), cplx(1.3, -0.1)}) {
        const cplx sigma = 0.5 - lam, A(1.3, -0.2), B(-2.0, 0.7);
        Eigenfunction u = [&](const BoundaryPoint&, const RVector& t) {
            const double x = t[0];
            return std::pow(x, sigma) * (A + 0.4 * x - 0.9 * x * x) + std::pow(x, sigma + 2.0 * lam) * (B + 0.3 * x);
        };
        const auto r = leading_coefficient(h2, {{lam}}, u, BoundaryPoint::h2(0.0));
        EXPECT_LT(std::abs(r.value - A), 1e-9) << lam;
        EXPECT_LT(r.condition, 1e8);
        EXPECT_LT(r.residual, 1e-10);
    }
}

TEST(LeadingCoefficient, SyntheticRankTwo) {
    const SpectralParameter lam{{0.7, 1.1}};
    Eigenfunction u = [&](const BoundaryPoint&, const RVector& t) {
        auto f1 = [&](double x) { return std::pow(x, 0.5 - 0.7) * (2.0 + x) + 0.5 * std::pow(x, 0.5 + 0.7); };
        auto f2 = [&](double x) { return std::pow(x, 0.5 - 1.1) * (1.5 - x * x) - std::pow(x, 0.5 + 1.1); };
        return f1(t[0]) * f2(t[1]);
    };
    const auto r = leading_coefficient(h2xh2, lam, u, BoundaryPoint::h2xh2(0.0, 0.0));
    EXPECT_LT(std::abs(r.value - 3.0), 1e-8);
}

TEST(LeadingCoefficient, Preconditions) {
    Eigenfunction one = [](const BoundaryPoint&, const RVector&) { return cplx(1.0); };
    const auto b = BoundaryPoint::h2(0.0);
    try {
        leading_coefficient(h2, {{-0.3}}, one, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
    }
    EXPECT_THROW(leading_coefficient(h2, {{-0.5}}, one, b), GenericityError);
    try {
        leading_coefficient(h2, {{1.0}}, one, b);  // shifts 0 and 2 collide after corrections
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
    }
    ExtractionConfig small;
    small.grid.n_points = 5;
    try {
        leading_coefficient(h2, {{0.7}}, one, b, small);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::usage);
    }
    ExtractionConfig strict;
    strict.condition_threshold = 10.0;
    try {
        leading_coefficient(h2, {{0.7}}, one, b, strict);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
    }
}

TEST(LeadingCoefficient, PerWallOverride) {
    ExtractionConfig cfg;
    cfg.overrides[1] = WallGrid{0.25, 0.6, 14, 3};
    EXPECT_EQ(cfg.wall(0).n_points, 12);
    EXPECT_EQ(cfg.wall(1).n_points, 14);
}

TEST(CFunctionViaBv, MatchesClosedForms) {
    for (cplx l : {cplx(0.7), cplx(0.4, 0.2)}) {
        const auto r = c_function_via_bv(h2, {{l}});
        EXPECT_LT(std::abs(r.value - oracle::c_h2(l)), 1e-6) << l;
    }
    const auto r3 = c_function_via_bv(h3, {{0.6}});
    EXPECT_LT(std::abs(r3.value - oracle::c_h3(0.6)), 1e-6);
}

TEST(BoundaryValue, GridAndDeterminism) {
    const auto f = BoundaryFunction::fourier({0.5, 0.0, 1.0, 0.0, 0.5});
    const PoissonEvaluator P(h2, {{0.7}}, f);
    const auto a = boundary_value(h2, {{0.7}}, eigenfunction(P), {8}, {}, 1);
    const auto b = boundary_value(h2, {{0.7}}, eigenfunction(P), {8}, {}, 4);
    ASSERT_EQ(a.points.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(a.fits[i].value, b.fits[i].value);
    const cplx c = oracle::c_h2(0.7);
    for (std::size_t i = 0; i < 8; ++i) {
        const cplx target = c * f(a.points[i]);
        EXPECT_LT(std::abs(a.fits[i].value - target), 1e-6 * std::abs(c) * 2.0);  // relative to sup|c f|
    }
    EXPECT_EQ(boundary_grid(ModelId::h2xh2, {3, 4}).size(), 12u);
    EXPECT_THROW(boundary_grid(ModelId::h3, {4}), Error);
}

TEST(VerifyInversion, PlaneConstant) {
    const auto rep = verify_inversion(h2, {{0.7}}, BoundaryFunction::constant(ModelId::h2, 1.0));
    EXPECT_LE(rep.residual_sup, 1e-4);
    EXPECT_EQ(rep.points.size(), 16u);
    EXPECT_LT(std::abs(rep.c_used - oracle::c_h2(0.7)), 1e-9);
    EXPECT_TRUE(rep.warnings.empty());
}

TEST(VerifyInversion, PlaneMixedModes) {
    const auto f = BoundaryFunction::fourier({0.5, 0.0, cplx(0, 0.25), 0.0, cplx(0, -0.25), 0.0, 0.5});
    const auto rep = verify_inversion(h2, {{cplx(0.4, 0.2)}}, f);
    EXPECT_LE(rep.residual_sup, 1e-4);
}

TEST(VerifyInversion, TargetsAreCTimesF) {
    const auto f = BoundaryFunction::fourier({0.5, 0.0, 0.5});
    const auto rep = verify_inversion(h2, {{1.3}}, f, {}, {4});
    for (const auto& p : rep.points) EXPECT_LT(std::abs(p.target - rep.c_used * std::cos(p.b.angles[0])), 1e-14);
}

TEST(SphericalExpansion, MatchesSphericalFunction) {
    for (cplx l : {cplx(0.7), cplx(0.4, 0.2)}) {
        const auto e = spherical_expansion(h2, {{l}});
        ASSERT_EQ(e.terms.size(), 2u);
        for (double t : {0.15, 0.25, 0.4}) {
            cplx v = 0.0;
            for (const auto& term : e.terms) v += term.coefficient * term.wall_series[0].evaluate(t);
            const cplx ref = spherical_function(h2, {{l}}, from_corner({BoundaryPoint::h2(0.0), {t}}));
            EXPECT_LT(std::abs(v - ref), 1e-9) << l << " " << t;
        }
        // leading coefficient of the σ term is c(λ)
        for (const auto& term : e.terms)
            if (std::abs(term.wall_series[0].offset - (0.5 - l)) < 1e-12) {
                EXPECT_LT(std::abs(term.coefficient - oracle::c_h2(l)), 1e-8);
            }
    }
}

TEST(SeriesDelta, PlaneValues) {
    const cplx l(0.7);
    const auto d = series_delta_extraction(h2, spherical_expansion(h2, {{l}}));
    ASSERT_EQ(d.q_values.size(), 1u);
    // q(0) = p'(σ) = σ − (ρ + λ) = −2λ
    EXPECT_LT(std::abs(d.q_values[0] + 2.0 * l), 1e-12);
    EXPECT_LT(std::abs(d.p_value + 2.0 * l), 1e-12);
    EXPECT_LT(std::abs(d.bv - oracle::c_h2(l)), 1e-8);
    EXPECT_LT(d.annihilation_residual, 1e-12);
}

TEST(SeriesDelta, ProductAndThreeSpace) {
    const SpectralParameter lam{{0.7, 1.1}};
    const auto d = series_delta_extraction(h2xh2, spherical_expansion(h2xh2, lam));
    EXPECT_LT(std::abs(d.bv - oracle::c_h2(0.7) * oracle::c_h2(1.1)), 1e-8);
    const auto d3 = series_delta_extraction(h3, spherical_expansion(h3, {{0.6}}));
    EXPECT_LT(std::abs(d3.bv - oracle::c_h3(0.6)), 1e-8);
}

TEST(SeriesDelta, RejectsNonSolutions) {
    auto e = spherical_expansion(h2, {{0.7}});
    e.terms[0].wall_series[0].coeffs[3] += 0.1;
    EXPECT_THROW(series_delta_extraction(h2, e), Error);
    auto bad = spherical_expansion(h2, {{0.7}});
    bad.terms[0].wall_series[0].offset += 0.25;
    EXPECT_THROW(series_delta_extraction(h2, bad), Error);
}

TEST(EmpiricalRate, PowerLaw) {
    RVector t, err;
    for (int i = 0; i < 8; ++i) {
        t.push_back(0.05 * std::pow(0.5, i));
        err.push_back(3.0 * std::pow(t.back(), 1.4));
    }
    EXPECT_NEAR(empirical_rate(t, err), 1.4, 1e-12);
    EXPECT_THROW(empirical_rate({0.1}, {0.2}), Error);
}
