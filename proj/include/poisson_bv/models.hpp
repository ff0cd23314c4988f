#pragma once

// Corner models: the hyperbolic plane as SL(2,R)/SO(2) realized on the unit
// disk, the product of two copies, and hyperbolic 3-space on the unit ball
// (bracket, corner chart and radial operator only).
//
// Conventions for one hyperbolic-plane factor:
//   o = i in the upper half plane, mapped to 0 in the disk by w ↦ (w − i)/(w + i);
//   the boundary angle θ is the K-orbit of k_{θ/2}, k_φ = [[cos φ, sin φ], [−sin φ, cos φ]];
//   H(g) = 2 log a_11 where g = k a n, so diag(e^{s/2}, e^{−s/2}) has H = s;
//   t = e^{−r} with r the distance to o in the curvature −1 metric.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "fuchsian.hpp"
#include "rootdata.hpp"
#include "types.hpp"

namespace poisson_bv {

using Mat2 = Eigen::Matrix2cd;

struct SpaceModel {
    ModelId id;
    RootDatum root_datum;
    double metric_normalization;  // c in t = e^{−c·r}
};

inline SpaceModel make_model(ModelId id) {
    // c = 1 is the value for which the radial indicial roots are ρ ∓ λ exactly.
    return {id, build_root_datum(id), 1.0};
}

inline int factor_count(ModelId id) { return id == ModelId::h2xh2 ? 2 : 1; }

/// One 2×2 determinant-one matrix per factor. Real entries for h2 factors.
struct GroupElement {
    ModelId model = ModelId::h2;
    std::vector<Mat2> factors;

    static GroupElement identity(ModelId id) {
        return {id, std::vector<Mat2>(factor_count(id), Mat2::Identity())};
    }

    GroupElement operator*(const GroupElement& o) const {
        GroupElement r{model, factors};
        for (std::size_t i = 0; i < factors.size(); ++i) r.factors[i] = factors[i] * o.factors[i];
        return r;
    }

    GroupElement inverse() const {
        GroupElement r{model, factors};
        for (auto& m : r.factors) m = Mat2{{m(1, 1), -m(0, 1)}, {-m(1, 0), m(0, 0)}};
        return r;
    }
};

inline void validate(const GroupElement& g) {
    if (static_cast<int>(g.factors.size()) != factor_count(g.model))
        fail(ErrorKind::usage, "group element has the wrong number of factors");
    for (const auto& m : g.factors) {
        if (std::abs(m.determinant() - cplx(1.0)) > 1e-12)
            fail(ErrorKind::precondition, "group element must have determinant 1");
        if (g.model != ModelId::h3 && m.imag().cwiseAbs().maxCoeff() > 0.0)
            fail(ErrorKind::precondition, "h2 group elements must be real");
    }
}

/// k_φ ∈ SO(2).
inline Mat2 rotation(double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return Mat2{{c, s}, {-s, c}};
}

/// Point of the model: one disk point (h2 factors) or one ball point (h3).
struct SpacePoint {
    ModelId model = ModelId::h2;
    std::vector<cplx> disk;     // h2, h2xh2
    Eigen::Vector3d ball{0, 0, 0};  // h3

    static SpacePoint origin(ModelId id) {
        SpacePoint p{id, {}, {0, 0, 0}};
        if (id != ModelId::h3) p.disk.assign(factor_count(id), cplx{});
        return p;
    }
    static SpacePoint h2(cplx z) { return {ModelId::h2, {z}, {0, 0, 0}}; }
    static SpacePoint h2xh2(cplx z1, cplx z2) { return {ModelId::h2xh2, {z1, z2}, {0, 0, 0}}; }
    static SpacePoint h3(const Eigen::Vector3d& x) { return {ModelId::h3, {}, x}; }
};

inline void validate(const SpacePoint& x) {
    if (x.model == ModelId::h3) {
        if (!(x.ball.norm() < 1.0)) fail(ErrorKind::precondition, "point outside the unit ball");
        return;
    }
    if (static_cast<int>(x.disk.size()) != factor_count(x.model))
        fail(ErrorKind::usage, "space point has the wrong number of factors");
    for (const auto& z : x.disk)
        if (!(std::abs(z) < 1.0)) fail(ErrorKind::precondition, "point outside the unit disk");
}

/// Angles: θ per circle factor, or (polar, azimuth) on the sphere for h3.
struct BoundaryPoint {
    ModelId model = ModelId::h2;
    RVector angles;

    static BoundaryPoint h2(double th) { return reduce({ModelId::h2, {th}}); }
    static BoundaryPoint h2xh2(double a, double b) { return reduce({ModelId::h2xh2, {a, b}}); }
    static BoundaryPoint h3(double polar, double azimuth) { return reduce({ModelId::h3, {polar, azimuth}}); }

    static double wrap(double a) {
        double r = std::fmod(a, 2.0 * pi);
        if (r < 0.0) r += 2.0 * pi;
        if (r >= 2.0 * pi) r = 0.0;
        return r;
    }

    static BoundaryPoint reduce(BoundaryPoint b) {
        if (b.model == ModelId::h3) {
            double th = wrap(b.angles.at(0)), ph = b.angles.at(1);
            if (th > pi) {
                th = 2.0 * pi - th;
                ph += pi;
            }
            b.angles = {th, wrap(ph)};
        } else {
            for (auto& a : b.angles) a = wrap(a);
        }
        return b;
    }

    Eigen::Vector3d sphere_point() const {
        return {std::sin(angles[0]) * std::cos(angles[1]), std::sin(angles[0]) * std::sin(angles[1]),
                std::cos(angles[0])};
    }
};

struct CornerCoordinates {
    BoundaryPoint b;
    RVector t;
};

// ---------------------------------------------------------------------------
// Iwasawa decomposition.

struct IwasawaResult {
    GroupElement k;
    RVector H;  // H_j coordinates of log a
    GroupElement n;
};

namespace detail {

struct Iwasawa2 {
    Mat2 k, n;
    double H;
};

/// Gram–Schmidt on the columns: g = k · diag(a, 1/a) · n.
inline Iwasawa2 iwasawa2(const Mat2& g) {
    const Eigen::Vector2cd c1 = g.col(0), c2 = g.col(1);
    const double r11 = c1.norm();
    const Eigen::Vector2cd q1 = c1 / r11;
    const cplx r12 = q1.dot(c2);
    const Eigen::Vector2cd v = c2 - r12 * q1;
    const double r22 = v.norm();
    Mat2 k;
    k.col(0) = q1;
    k.col(1) = v / r22;
    Mat2 n = Mat2::Identity();
    n(0, 1) = r12 / r11;
    return {k, n, 2.0 * std::log(r11)};
}

/// z in the disk ↦ g with g·i = Cayley⁻¹(z).
inline Mat2 disk_to_group(cplx z) {
    const cplx w = cplx(0, 1) * (1.0 + z) / (1.0 - z);
    const double x = w.real(), y = w.imag(), sy = std::sqrt(y);
    return Mat2{{sy, x / sy}, {0.0, 1.0 / sy}};
}

inline cplx mobius(const Mat2& g, cplx w) { return (g(0, 0) * w + g(0, 1)) / (g(1, 0) * w + g(1, 1)); }

inline cplx cayley(cplx w) { return (w - cplx(0, 1)) / (w + cplx(0, 1)); }
inline cplx cayley_inv(cplx z) { return cplx(0, 1) * (1.0 + z) / (1.0 - z); }

/// Boundary angle of kM for k ∈ SO(2).
inline double angle_of(const Mat2& k) { return BoundaryPoint::wrap(2.0 * std::atan2(k(0, 1).real(), k(0, 0).real())); }

/// −H(g_z⁻¹ k_{θ/2}) for one disk factor.
inline double bracket2(cplx z, double theta) {
    const Mat2 g = disk_to_group(z);
    const Mat2 ginv{{g(1, 1), -g(0, 1)}, {-g(1, 0), g(0, 0)}};
    return -iwasawa2(ginv * rotation(0.5 * theta)).H;
}

}  // namespace detail

inline IwasawaResult iwasawa(const GroupElement& g) {
    validate(g);
    IwasawaResult r{g, {}, g};
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        const auto d = detail::iwasawa2(g.factors[i]);
        r.k.factors[i] = d.k;
        r.n.factors[i] = d.n;
        r.H.push_back(d.H);
    }
    return r;
}

/// exp of Σ_j H_j H_j-basis element, as a group element.
inline GroupElement a_element(ModelId id, const RVector& H) {
    GroupElement g = GroupElement::identity(id);
    for (std::size_t i = 0; i < g.factors.size(); ++i)
        g.factors[i] = Mat2{{std::exp(0.5 * H.at(i)), 0.0}, {0.0, std::exp(-0.5 * H.at(i))}};
    return g;
}

// ---------------------------------------------------------------------------
// Actions and bracket.

/// g·o.
inline SpacePoint orbit_point(const GroupElement& g) {
    validate(g);
    if (g.model == ModelId::h3) fail(ErrorKind::usage, "group action is not implemented for h3");
    SpacePoint x = SpacePoint::origin(g.model);
    for (std::size_t i = 0; i < g.factors.size(); ++i)
        x.disk[i] = detail::cayley(detail::mobius(g.factors[i], cplx(0, 1)));
    return x;
}

inline SpacePoint group_action(const GroupElement& g, const SpacePoint& x) {
    validate(g);
    validate(x);
    if (g.model != x.model) fail(ErrorKind::usage, "model mismatch");
    if (g.model == ModelId::h3) fail(ErrorKind::usage, "group action is not implemented for h3");
    SpacePoint y = x;
    for (std::size_t i = 0; i < g.factors.size(); ++i)
        y.disk[i] = detail::cayley(detail::mobius(g.factors[i], detail::cayley_inv(x.disk[i])));
    return y;
}

/// A(x, b) in H_j coordinates.
inline RVector horocycle_bracket(const SpacePoint& x, const BoundaryPoint& b) {
    validate(x);
    if (x.model != b.model) fail(ErrorKind::usage, "model mismatch");
    if (x.model == ModelId::h3) {
        const double r2 = x.ball.squaredNorm();
        return {std::log((1.0 - r2) / (x.ball - b.sphere_point()).squaredNorm())};
    }
    RVector A;
    for (std::size_t i = 0; i < x.disk.size(); ++i) A.push_back(detail::bracket2(x.disk[i], b.angles[i]));
    return A;
}

struct BoundaryActionResult {
    BoundaryPoint b;
    RVector factors;  // τ_j = e^{α_j(A(g·o, b))}
};

/// b′ = κ(g⁻¹k)M together with the factors e^{α_j(A(g·o, b))}.
inline BoundaryActionResult boundary_action(const GroupElement& g, const BoundaryPoint& b) {
    validate(g);
    if (g.model == ModelId::h3) fail(ErrorKind::usage, "group action is not implemented for h3");
    BoundaryActionResult r{b, {}};
    const GroupElement ginv = g.inverse();
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
        const auto d = detail::iwasawa2(ginv.factors[i] * rotation(0.5 * b.angles[i]));
        r.b.angles[i] = detail::angle_of(d.k);
    }
    const RVector A = horocycle_bracket(orbit_point(g), b);
    for (double a : A) r.factors.push_back(std::exp(a));
    return r;
}

/// d_X(x, o) per factor.
inline RVector radial_distance(const SpacePoint& x) {
    validate(x);
    if (x.model == ModelId::h3) return {2.0 * std::atanh(x.ball.norm())};
    RVector d;
    for (const auto& z : x.disk) d.push_back(2.0 * std::atanh(std::abs(z)));
    return d;
}

// ---------------------------------------------------------------------------
// Corner chart.

inline CornerCoordinates corner_coords(const SpacePoint& x) {
    validate(x);
    CornerCoordinates c{{x.model, {}}, {}};
    if (x.model == ModelId::h3) {
        const double r = x.ball.norm();
        if (r == 0.0) fail(ErrorKind::precondition, "not in open corner chart: point is the origin");
        const Eigen::Vector3d u = x.ball / r;
        c.b = BoundaryPoint::h3(std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x()));
        c.t = {(1.0 - r) / (1.0 + r)};
        return c;
    }
    for (const auto& z : x.disk) {
        const double r = std::abs(z);
        if (r == 0.0) fail(ErrorKind::precondition, "not in open corner chart: a factor is at the origin");
        c.b.angles.push_back(BoundaryPoint::wrap(std::arg(z)));
        c.t.push_back((1.0 - r) / (1.0 + r));
    }
    return c;
}

/// Inverse chart; t_j = 0 gives the boundary point in the closure.
inline SpacePoint from_corner(const CornerCoordinates& c) {
    const int n = factor_count(c.b.model);
    if (static_cast<int>(c.t.size()) != n) fail(ErrorKind::usage, "corner coordinates have the wrong rank");
    for (double t : c.t)
        if (!(t >= 0.0 && t < 1.0)) fail(ErrorKind::precondition, "corner coordinate t outside [0, 1)");
    if (c.b.model == ModelId::h3) {
        const double r = (1.0 - c.t[0]) / (1.0 + c.t[0]);
        return SpacePoint::h3(r * c.b.sphere_point());
    }
    SpacePoint x = SpacePoint::origin(c.b.model);
    for (int i = 0; i < n; ++i) x.disk[i] = std::polar((1.0 - c.t[i]) / (1.0 + c.t[i]), c.b.angles[i]);
    return x;
}

// ---------------------------------------------------------------------------
// Radial operators.

/// P_j(λ) in t_j = e^{−r_j}: the radial part of Δ − (λ_j² − ρ_j²) on angular
/// mode `mode` (Fourier index for h2 factors, harmonic degree for h3),
/// multiplied by the unit (1 − t²)²:
///   (1−t²)²θ² − m(1+t²)(1−t²)θ − 4κ t² − (λ²−ρ²)(1−t²)²,
/// κ = n² or ℓ(ℓ+1), m the root multiplicity.
inline ThetaOperator radial_operator(const SpaceModel& model, const SpectralParameter& lam, int j, int mode = 0) {
    const RootDatum& rd = model.root_datum;
    detail::check_rank(rd, lam);
    if (j < 0 || j >= rd.rank) fail(ErrorKind::usage, "wall index out of range");
    const double m = rd.multiplicities[j].first;
    const cplx e = lam[j] * lam[j] - rd.rho[j] * rd.rho[j];
    const double kappa = model.id == ModelId::h3 ? static_cast<double>(mode) * (mode + 1.0)
                                                 : static_cast<double>(mode) * mode;
    std::map<int, CVector> s;
    s[0] = {-e, -m, 1.0};
    s[2] = {2.0 * e - 4.0 * kappa, 0.0, -2.0};
    s[4] = {-e, m, 1.0};
    return ThetaOperator::fuchsian(std::move(s));
}

}  // namespace poisson_bv
