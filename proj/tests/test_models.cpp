#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poisson_bv/models.hpp"

using namespace poisson_bv;

namespace {

/// Random SL(2, R) element a k-compatible way: k_φ · diag(e^{s/2}, e^{−s/2}) · n_x.
Mat2 random_sl2(double scale = 1.0) {
    const double phi = oracle::uniform(-pi, pi), s = oracle::uniform(-scale, scale), x = oracle::uniform(-scale, scale);
    Mat2 a{{std::exp(0.5 * s), 0.0}, {0.0, std::exp(-0.5 * s)}};
    Mat2 n{{1.0, x}, {0.0, 1.0}};
    return rotation(phi) * a * n;
}

cplx random_disk_point(double rmax = 0.9) {
    return std::polar(std::sqrt(oracle::uniform(0.01, rmax * rmax)), oracle::uniform(-pi, pi));
}

double angle_diff(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * pi)); }

}  // namespace

TEST(Iwasawa, Examples) {
    auto r = iwasawa(GroupElement::identity(ModelId::h2));
    EXPECT_LT((r.k.factors[0] - Mat2::Identity()).norm(), 1e-15);
    EXPECT_EQ(r.H[0], 0.0);
    const double s = 0.83;
    r = iwasawa(a_element(ModelId::h2, {s}));
    EXPECT_LT((r.k.factors[0] - Mat2::Identity()).norm(), 1e-15);
    EXPECT_NEAR(r.H[0], s, 1e-15);
}

TEST(Iwasawa, RandomReconstructionAgainstGramSchmidt) {
    for (int trial = 0; trial < 50; ++trial) {
        GroupElement g{ModelId::h2xh2, {random_sl2(2.0), random_sl2(2.0)}};
        const auto r = iwasawa(g);
        for (int i = 0; i < 2; ++i) {
            const auto qr = oracle::gram_schmidt(g.factors[i]);
            const Mat2& k = r.k.factors[i];
            EXPECT_LT((k * k.adjoint() - Mat2::Identity()).norm(), 1e-12);
            EXPECT_NEAR(k.determinant().real(), 1.0, 1e-12);
            EXPECT_EQ(r.n.factors[i](0, 0), cplx(1.0));
            EXPECT_EQ(r.n.factors[i](1, 0), cplx(0.0));
            EXPECT_EQ(r.n.factors[i](1, 1), cplx(1.0));
            EXPECT_NEAR(r.H[i], 2.0 * std::log(qr.R(0, 0).real()), 1e-12);
            const Mat2 a = a_element(ModelId::h2, {r.H[i]}).factors[0];
            EXPECT_LT((k * a * r.n.factors[i] - g.factors[i]).norm(), 1e-12 * g.factors[i].norm());
            EXPECT_LT((k - qr.Q).norm(), 1e-12);
        }
    }
}

TEST(Iwasawa, CompactPartHasZeroH) {
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = iwasawa(GroupElement{ModelId::h2, {rotation(oracle::uniform(-pi, pi))}});
        EXPECT_NEAR(r.H[0], 0.0, 1e-15);
    }
}

TEST(GroupElement, ValidationRejectsBadDeterminant) {
    GroupElement g{ModelId::h2, {Mat2{{2.0, 0.0}, {0.0, 1.0}}}};
    EXPECT_THROW(validate(g), Error);
    GroupElement c{ModelId::h2, {Mat2{{cplx(1, 1e-3), 0.0}, {0.0, 1.0 / cplx(1, 1e-3)}}}};
    EXPECT_THROW(validate(c), Error);
}

TEST(HorocycleBracket, OriginGivesZero) {
    for (double th : {0.0, 1.0, 4.0}) {
        EXPECT_NEAR(horocycle_bracket(SpacePoint::origin(ModelId::h2), BoundaryPoint::h2(th))[0], 0.0, 1e-15);
        EXPECT_NEAR(horocycle_bracket(SpacePoint::origin(ModelId::h3), BoundaryPoint::h3(th / 2, th))[0], 0.0, 1e-15);
    }
}

TEST(HorocycleBracket, MatchesClassicalDiskKernel) {
    for (int trial = 0; trial < 100; ++trial) {
        const cplx z = random_disk_point(0.95);
        const double th = oracle::uniform(0, 2 * pi);
        const double A = horocycle_bracket(SpacePoint::h2(z), BoundaryPoint::h2(th))[0];
        EXPECT_NEAR(std::exp(A), oracle::disk_poisson(z, th), 1e-11 * oracle::disk_poisson(z, th));
    }
}

TEST(HorocycleBracket, ProductIsPairOfFactors) {
    const cplx z1(0.3, -0.2), z2(-0.5, 0.1);
    const auto A = horocycle_bracket(SpacePoint::h2xh2(z1, z2), BoundaryPoint::h2xh2(1.0, 2.5));
    EXPECT_EQ(A[0], horocycle_bracket(SpacePoint::h2(z1), BoundaryPoint::h2(1.0))[0]);
    EXPECT_EQ(A[1], horocycle_bracket(SpacePoint::h2(z2), BoundaryPoint::h2(2.5))[0]);
}

TEST(GroupAction, IdentityAndRotation) {
    const auto x = SpacePoint::h2(cplx(0.3, 0.4));
    const auto y = group_action(GroupElement::identity(ModelId::h2), x);
    EXPECT_LT(std::abs(y.disk[0] - x.disk[0]), 1e-15);
    const double phi = 0.7;
    const GroupElement k{ModelId::h2, {rotation(phi)}};
    // k_φ rotates the disk by 2φ
    EXPECT_LT(std::abs(group_action(k, x).disk[0] - x.disk[0] * std::polar(1.0, 2 * phi)), 1e-14);
    const auto ba = boundary_action(k, BoundaryPoint::h2(1.0));
    EXPECT_NEAR(ba.factors[0], 1.0, 1e-14);
    EXPECT_LT(angle_diff(ba.b.angles[0], 1.0 - 2 * phi), 1e-14);
    const auto bi = boundary_action(GroupElement::identity(ModelId::h2), BoundaryPoint::h2(1.0));
    EXPECT_NEAR(bi.b.angles[0], 1.0, 1e-15);
    EXPECT_EQ(bi.factors[0], 1.0);
}

TEST(GroupAction, Composition) {
    for (int trial = 0; trial < 30; ++trial) {
        const GroupElement g1{ModelId::h2xh2, {random_sl2(), random_sl2()}};
        const GroupElement g2{ModelId::h2xh2, {random_sl2(), random_sl2()}};
        const auto x = SpacePoint::h2xh2(random_disk_point(), random_disk_point());
        const auto a = group_action(g1 * g2, x), b = group_action(g1, group_action(g2, x));
        for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(a.disk[i] - b.disk[i]), 1e-10);
        const auto bp = BoundaryPoint::h2xh2(oracle::uniform(0, 2 * pi), oracle::uniform(0, 2 * pi));
        const auto c = boundary_action(g1 * g2, bp).b, d = boundary_action(g2, boundary_action(g1, bp).b).b;
        for (int i = 0; i < 2; ++i) EXPECT_LT(angle_diff(c.angles[i], d.angles[i]), 1e-10);
    }
}

TEST(GroupAction, IsAnIsometry) {
    // cosh d(x, y) = 1 + 2|x − y|²/((1 − |x|²)(1 − |y|²))
    auto cd = [](cplx x, cplx y) { return 1 + 2 * std::norm(x - y) / ((1 - std::norm(x)) * (1 - std::norm(y))); };
    for (int trial = 0; trial < 20; ++trial) {
        const GroupElement g{ModelId::h2, {random_sl2()}};
        const cplx x = random_disk_point(0.7), y = random_disk_point(0.7);
        const cplx gx = group_action(g, SpacePoint::h2(x)).disk[0], gy = group_action(g, SpacePoint::h2(y)).disk[0];
        EXPECT_NEAR(cd(gx, gy), cd(x, y), 1e-9 * cd(x, y));
    }
}

TEST(BoundaryAction, MatchesMobiusOfInverse) {
    // b' is the boundary image under g⁻¹ and the factor is the Poisson kernel at g·o
    for (int trial = 0; trial < 30; ++trial) {
        const GroupElement g{ModelId::h2, {random_sl2()}};
        const double th = oracle::uniform(0, 2 * pi);
        const auto r = boundary_action(g, BoundaryPoint::h2(th));
        const cplx w = detail::cayley_inv(std::polar(1.0, th));
        const cplx img = detail::cayley(detail::mobius(g.inverse().factors[0], w));
        EXPECT_LT(angle_diff(r.b.angles[0], std::arg(img)), 1e-10);
        const cplx go = orbit_point(g).disk[0];
        EXPECT_NEAR(r.factors[0], oracle::disk_poisson(go, th), 1e-10 * r.factors[0]);
    }
}

TEST(CornerChart, Examples) {
    const double r = 1.3, th = 2.1;
    const auto x = SpacePoint::h2(std::polar(std::tanh(r / 2), th));
    const auto c = corner_coords(x);
    EXPECT_NEAR(c.b.angles[0], th, 1e-14);
    EXPECT_NEAR(c.t[0], std::exp(-r), 1e-14);
    EXPECT_NEAR(radial_distance(x)[0], r, 1e-14);
    EXPECT_THROW(corner_coords(SpacePoint::origin(ModelId::h2)), Error);
    EXPECT_THROW(corner_coords(SpacePoint::h2xh2(0.0, 0.5)), Error);
    const auto edge = from_corner({BoundaryPoint::h2(th), {0.0}});
    EXPECT_LT(std::abs(edge.disk[0] - std::polar(1.0, th)), 1e-15);
}

TEST(CornerChart, RoundTrip) {
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = SpacePoint::h2xh2(random_disk_point(0.99), random_disk_point(0.99));
        const auto y = from_corner(corner_coords(x));
        for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(y.disk[i] - x.disk[i]), 1e-10);
        Eigen::Vector3d v = Eigen::Vector3d::Random() * 0.5;
        const auto p = SpacePoint::h3(v);
        EXPECT_LT((from_corner(corner_coords(p)).ball - v).norm(), 1e-12);
    }
}

TEST(RadialOperator, IndicialMatchesWallPolynomial) {
    for (auto id : {ModelId::h2, ModelId::h3, ModelId::h2xh2}) {
        const auto model = make_model(id);
        for (int trial = 0; trial < 20; ++trial) {
            SpectralParameter lam;
            for (int j = 0; j < model.root_datum.rank; ++j) lam.lambda.push_back({oracle::uniform(-2, 2), oracle::uniform(-2, 2)});
            for (int j = 0; j < model.root_datum.rank; ++j) {
                const auto p = indicial_polynomial(radial_operator(model, lam, j)).poly;
                const auto q = wall_indicial_polynomial(model.root_datum, lam, j);
                for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(std::abs(p.coefficients()[k] - q.coefficients()[k]), 1e-12);
            }
        }
    }
}

TEST(RadialOperator, DoubleRootAtZero) {
    const auto p = indicial_polynomial(radial_operator(make_model(ModelId::h2), {{0.0}}, 0)).poly;
    EXPECT_EQ(p(0.5), cplx(0.0));
    EXPECT_EQ(p.derivative(0.5), cplx(0.0));
}

TEST(RadialOperator, AnnihilatesThreeSpaceSphericalFunction) {
    // apply the operator to φ(t) = sinh(λr)/(λ sinh r), r = −log t, by differences in log t
    const auto model = make_model(ModelId::h3);
    const cplx lam(0.6, 0.3);
    const auto P = radial_operator(model, {{lam}}, 0);
    auto phi = [&](double t) { return oracle::phi_h3(lam, -std::log(t)); };
    for (double t : {0.1, 0.3, 0.6}) {
        const double h = 1e-3, s = std::log(t);
        auto at = [&](double ds) { return phi(std::exp(s + ds)); };
        const cplx d0 = at(0), d1 = (at(h) - at(-h)) / (2 * h), d2 = (at(h) - 2.0 * at(0) + at(-h)) / (h * h);
        cplx acc = 0.0;
        for (const auto& [i, c] : P.slices()) {
            const double ti = std::pow(t, i);
            acc += ti * (c[0] * d0 + c[1] * d1 + (c.size() > 2 ? c[2] : cplx{}) * d2);
        }
        EXPECT_LT(std::abs(acc), 1e-5) << t;
    }
}
