#pragma once

// Poisson transform, spherical functions, principal series and the
// c-function integral.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <functional>
#include <map>
#include <mutex>
#include <utility>

#include "boundary_function.hpp"
#include "models.hpp"
#include "quadrature.hpp"
#include "rootdata.hpp"

namespace poisson_bv {

struct QuadratureOptions {
    double tol = 1e-13;            // relative to the mean kernel size
    std::size_t min_points = 64;
    std::size_t max_points = std::size_t{1} << 20;
};

/// e^{(ρ+λ)(A(x,b))}.
inline cplx poisson_kernel(const SpaceModel& model, const SpectralParameter& lam, const SpacePoint& x,
                           const BoundaryPoint& b) {
    detail::check_rank(model.root_datum, lam);
    const RVector A = horocycle_bracket(x, b);
    cplx e = 0.0;
    for (std::size_t j = 0; j < A.size(); ++j) e += (model.root_datum.rho[j] + lam[j]) * A[j];
    return std::exp(e);
}

namespace detail {

inline cplx real_power_exp(cplx s, double a) {
    return std::exp(s.real() * a) * std::polar(1.0, s.imag() * a);
}

/// ∫ e^{sA(r, θ)} e^{inθ} dθ/2π for |n| ≤ K, z = r on the positive axis,
/// by trapezoid sums on doubling grids.
inline CVector kernel_modes(cplx s, double r, int K, const QuadratureOptions& opt) {
    std::size_t M = opt.min_points;
    while (M < static_cast<std::size_t>(4 * K + 4)) M *= 2;
    auto add_points = [&](CVector& sums, double& mag, std::size_t Mtot, std::size_t start, std::size_t step) {
        for (std::size_t i = start; i < Mtot; i += step) {
            const double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(Mtot);
            const cplx k = real_power_exp(s, bracket2(cplx(r, 0.0), th));
            mag += std::abs(k);
            for (int n = -K; n <= K; ++n) sums[n + K] += k * std::polar(1.0, n * th);
        }
    };
    CVector sums(2 * K + 1, cplx{});
    double mag = 0.0;
    add_points(sums, mag, M, 0, 1);
    CVector prev = sums;
    for (auto& c : prev) c /= static_cast<double>(M);
    while (true) {
        if (2 * M > opt.max_points)
            fail(ErrorKind::numerical, "Poisson quadrature did not converge within the point budget");
        add_points(sums, mag, 2 * M, 1, 2);
        M *= 2;
        CVector cur = sums;
        for (auto& c : cur) c /= static_cast<double>(M);
        double diff = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
        if (diff <= opt.tol * (mag / static_cast<double>(M))) return cur;
        prev = std::move(cur);
    }
}

}  // namespace detail

/// Evaluates P_λf. Modal kernel integrals depend only on the radius of each
/// factor and are cached, so repeated evaluation on rotated points is cheap.
class PoissonEvaluator {
public:
    PoissonEvaluator(SpaceModel model, SpectralParameter lam, BoundaryFunction f, QuadratureOptions opt = {})
        : model_(std::move(model)), lam_(std::move(lam)), f_(std::move(f)), opt_(opt) {
        detail::check_rank(model_.root_datum, lam_);
        if (f_.model() != model_.id && !(model_.id == ModelId::h3 && f_.band_limits().size() == 1))
            fail(ErrorKind::usage, "boundary function does not match the model");
        if (model_.id == ModelId::h3 && f_.band_limit() != 0)
            fail(ErrorKind::usage, "only constant boundary functions are supported on h3");
    }

    const SpaceModel& model() const { return model_; }
    const SpectralParameter& lambda() const { return lam_; }
    const BoundaryFunction& function() const { return f_; }

    cplx operator()(const SpacePoint& x) const {
        validate(x);
        if (x.model != model_.id) fail(ErrorKind::usage, "space point does not match the model");
        if (model_.id == ModelId::h3) return f_.coefficient(0) * h3_spherical(x.ball.norm());
        const std::size_t nf = x.disk.size();
        std::vector<CVector> modes(nf);
        for (std::size_t j = 0; j < nf; ++j) {
            const double r = std::abs(x.disk[j]);
            const double beta = std::arg(x.disk[j]);
            modes[j] = radial_modes(j, r);
            const int K = f_.band_limit(j);
            // k̂_n(r e^{iβ}) = e^{inβ} k̂_n(r)
            for (int n = -K; n <= K; ++n) modes[j][n + K] *= std::polar(1.0, n * beta);
        }
        const int K1 = f_.band_limit(0);
        if (nf == 1) {
            cplx acc = 0.0;
            for (int n = -K1; n <= K1; ++n) acc += f_.coefficient(n) * modes[0][n + K1];
            return acc;
        }
        const int K2 = f_.band_limit(1);
        cplx acc = 0.0;
        for (int n1 = -K1; n1 <= K1; ++n1) {
            cplx row = 0.0;
            for (int n2 = -K2; n2 <= K2; ++n2) row += f_.coefficient(n1, n2) * modes[1][n2 + K2];
            acc += row * modes[0][n1 + K1];
        }
        return acc;
    }

    /// u(b, t) in corner coordinates.
    cplx at_corner(const BoundaryPoint& b, const RVector& t) const { return (*this)(from_corner({b, t})); }

private:
    // k̂_n(r) = ∫ K(r, θ) e^{inθ} dθ/2π, so that P_λf = Σ c_n k̂_n for f = Σ c_n e^{inθ}.
    CVector radial_modes(std::size_t j, double r) const {
        std::uint64_t key = 0;
        std::memcpy(&key, &r, sizeof r);
        {
            std::lock_guard<std::mutex> lock(*mutex_);
            auto it = cache_[j].find(key);
            if (it != cache_[j].end()) return it->second;
        }
        const cplx s = model_.root_datum.rho[j] + lam_[j];
        CVector m = detail::kernel_modes(s, r, f_.band_limit(j), opt_);
        std::lock_guard<std::mutex> lock(*mutex_);
        cache_[j].emplace(key, m);
        return m;
    }

    cplx h3_spherical(double r) const {
        const cplx s = model_.root_datum.rho[0] + lam_[0];
        auto integrand = [&](double g) {
            const SpacePoint x = SpacePoint::h3({0.0, 0.0, r});
            const double A = horocycle_bracket(x, BoundaryPoint{ModelId::h3, {g, 0.0}})[0];
            return detail::real_power_exp(s, A) * (0.5 * std::sin(g));
        };
        return quad::adaptive(integrand, 0.0, pi, 1e-15, 1e-13).value;
    }

    SpaceModel model_;
    SpectralParameter lam_;
    BoundaryFunction f_;
    QuadratureOptions opt_;
    mutable std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
    mutable std::map<std::uint64_t, CVector> cache_[2];
};

inline cplx poisson_transform(const SpaceModel& model, const SpectralParameter& lam, const BoundaryFunction& f,
                              const SpacePoint& x, const QuadratureOptions& opt = {}) {
    return PoissonEvaluator(model, lam, f, opt)(x);
}

inline cplx spherical_function(const SpaceModel& model, const SpectralParameter& lam, const SpacePoint& x,
                               const QuadratureOptions& opt = {}) {
    return poisson_transform(model, lam, BoundaryFunction::constant(model.id, 1.0), x, opt);
}

namespace detail {

/// ∫_{N̄} e^{−(λ+ρ)(H(n̄))} dn̄ for one factor, unnormalized. The integrand
/// is even (h2) or radial (h3) in the nilpotent coordinate x, and x = cot w
/// maps the half line onto (0, π/2] with an algebraic singularity at w = 0.
inline cplx nbar_integral(ModelId id, cplx s) {
    auto H_of = [&](double x) {
        Mat2 nbar = Mat2::Identity();
        nbar(1, 0) = x;
        return iwasawa2(nbar).H;
    };
    auto f = [&](double w) {
        const double x = 1.0 / std::tan(w), H = H_of(x);
        // dx = csc²w dw = (1 + x²) dw
        const cplx v = real_power_exp(-s, H) * (1.0 + x * x);
        return id == ModelId::h3 ? 2.0 * pi * x * v : 2.0 * v;
    };
    return quad::graded(f, 0.0, 0.5 * pi, 1e-15, 1e-14).value;
}

}  // namespace detail

/// c(λ), normalized so that c(ρ) = 1; products over factors.
inline cplx c_function_integral(const SpaceModel& model, const SpectralParameter& lam) {
    const RootDatum& rd = model.root_datum;
    detail::check_rank(rd, lam);
    for (int j = 0; j < rd.rank; ++j)
        if (!(lam[j].real() > 0.0))
            fail(ErrorKind::precondition, "c_function_integral needs Re lambda_j > 0 for every j");
    cplx c = 1.0;
    for (int j = 0; j < rd.rank; ++j) {
        const cplx s = lam[j] + rd.rho[j];
        c *= detail::nbar_integral(model.id, s) / detail::nbar_integral(model.id, 2.0 * rd.rho[j]);
    }
    return c;
}

/// π_λ(g)f sampled on a uniform grid (per factor), as a BoundaryFunction.
inline BoundaryFunction principal_series_action(const SpaceModel& model, const SpectralParameter& lam,
                                                const GroupElement& g, const BoundaryFunction& f,
                                                std::size_t grid = 512) {
    const RootDatum& rd = model.root_datum;
    detail::check_rank(rd, lam);
    if (g.model != model.id || f.model() != model.id) fail(ErrorKind::usage, "model mismatch");
    if (model.id == ModelId::h3) fail(ErrorKind::usage, "principal series action is not implemented for h3");
    validate(g);
    const GroupElement ginv = g.inverse();
    const std::size_t nf = g.factors.size();
    // per factor: factor value e^{−(ρ_j−λ_j)H_j} and image angle
    std::vector<CVector> weight(nf, CVector(grid));
    std::vector<RVector> image(nf, RVector(grid));
    for (std::size_t j = 0; j < nf; ++j)
        for (std::size_t i = 0; i < grid; ++i) {
            const double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(grid);
            const auto d = detail::iwasawa2(ginv.factors[j] * rotation(0.5 * th));
            weight[j][i] = detail::real_power_exp(-(rd.rho[j] - lam[j]), d.H);
            image[j][i] = detail::angle_of(d.k);
        }
    if (nf == 1) {
        CVector v(grid);
        for (std::size_t i = 0; i < grid; ++i) v[i] = weight[0][i] * f(BoundaryPoint{model.id, {image[0][i]}});
        return BoundaryFunction::samples(std::move(v));
    }
    CVector v(grid * grid);
    for (std::size_t i = 0; i < grid; ++i)
        for (std::size_t k = 0; k < grid; ++k)
            v[i * grid + k] =
                weight[0][i] * weight[1][k] * f(BoundaryPoint{model.id, {image[0][i], image[1][k]}});
    return BoundaryFunction::samples2(grid, grid, v);
}

}  // namespace poisson_bv
