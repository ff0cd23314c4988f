#pragma once

// Boundary values of eigenfunctions: least-squares extraction of the leading
// coefficient at the edge, the series-level delta extraction, and the
// inversion harness bv_{ρ−λ} P_λ f = c(λ) f.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "boundary_function.hpp"
#include "fuchsian.hpp"
#include "models.hpp"
#include "rootdata.hpp"
#include "transforms.hpp"

namespace poisson_bv {

/// u(b, t) in corner coordinates.
using Eigenfunction = std::function<cplx(const BoundaryPoint&, const RVector&)>;

struct WallGrid {
    double t0 = 0.2;
    double ratio = 0.7;
    int n_points = 12;
    int correction_orders = 3;
};

struct ExtractionConfig {
    WallGrid grid;
    std::map<int, WallGrid> overrides;  // 0-based wall index
    double condition_threshold = 1e8;
    double collision_tolerance = 1e-6;

    const WallGrid& wall(int j) const {
        auto it = overrides.find(j);
        return it == overrides.end() ? grid : it->second;
    }
};

struct LeadingCoefficient {
    cplx value;
    double condition = 0.0;       // largest per-wall condition number
    double residual = 0.0;        // relative Frobenius residual of the fit
    double error_estimate = 0.0;  // residual-based standard error of value
};

namespace detail {

/// Per-wall exponent shifts (λ − w·λ)(H_j) over W/W_j, first entry 0.
inline CVector wall_shifts(const RootDatum& rd, const SpectralParameter& lam, int j) {
    CVector out;
    for (const auto& v : wall_orbit(rd, j)) out.push_back(lam[j] - pair(lam, v));
    return out;
}

struct WallFit {
    RVector t;
    Eigen::MatrixXcd design;  // n × p
    Eigen::MatrixXcd pinv;    // p × n
    double condition;
};

inline WallFit build_wall_fit(const CVector& shifts, const WallGrid& g, const ExtractionConfig& cfg) {
    if (!(g.t0 > 0.0 && g.t0 < 1.0)) fail(ErrorKind::usage, "extraction grid: t0 must lie in (0, 1)");
    if (!(g.ratio > 0.0 && g.ratio < 1.0)) fail(ErrorKind::usage, "extraction grid: ratio must lie in (0, 1)");
    if (g.correction_orders < 0) fail(ErrorKind::usage, "extraction grid: correction_orders must be >= 0");
    CVector expo;
    for (const auto& s : shifts)
        for (int n = 0; n <= g.correction_orders; ++n) expo.push_back(s + static_cast<double>(n));
    const int p = static_cast<int>(expo.size());
    if (g.n_points < p + 2)
        fail(ErrorKind::usage, "extraction grid: n_points must be at least the basis size plus 2 (" +
                                   std::to_string(p + 2) + ")");
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (std::abs(expo[a] - expo[b]) < cfg.collision_tolerance)
                fail(ErrorKind::numerical, "fit exponents collide; no logarithmic basis is available");
    WallFit w;
    w.design.resize(g.n_points, p);
    double t = g.t0;
    for (int i = 0; i < g.n_points; ++i, t *= g.ratio) {
        w.t.push_back(t);
        for (int c = 0; c < p; ++c) w.design(i, c) = std::exp(expo[c] * std::log(t));
    }
    Eigen::VectorXd norms = w.design.colwise().norm().transpose();
    Eigen::MatrixXcd scaled = w.design;
    for (int c = 0; c < p; ++c) scaled.col(c) /= norms(c);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    w.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(w.condition <= cfg.condition_threshold))
        fail(ErrorKind::numerical, "ill-conditioned boundary fit (condition number " +
                                       std::to_string(w.condition) + ")");
    Eigen::VectorXd inv = sv.cwiseInverse();
    Eigen::MatrixXcd pinv_scaled = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    w.pinv = pinv_scaled;
    for (int c = 0; c < p; ++c) w.pinv.row(c) /= norms(c);
    return w;
}

inline void require_positive_chamber(const SpectralParameter& lam) {
    for (std::size_t j = 0; j < lam.rank(); ++j)
        if (!(lam[j].real() > 0.0))
            fail(ErrorKind::precondition,
                 "boundary extraction needs Re lambda_j > 0 so that rho - lambda is the leading exponent");
}

}  // namespace detail

/// v_0|_{t=0+} for v_0 = t^{−σ}u, σ = ρ − λ, by exponent-aware least squares.
inline LeadingCoefficient leading_coefficient(const SpaceModel& model, const SpectralParameter& lam,
                                              const Eigenfunction& u, const BoundaryPoint& b,
                                              const ExtractionConfig& cfg = {}) {
    const RootDatum& rd = model.root_datum;
    require_generic(rd, lam);
    detail::require_positive_chamber(lam);
    std::vector<detail::WallFit> fits;
    for (int j = 0; j < rd.rank; ++j)
        fits.push_back(detail::build_wall_fit(detail::wall_shifts(rd, lam, j), cfg.wall(j), cfg));
    CVector sigma(rd.rank);
    for (int j = 0; j < rd.rank; ++j) sigma[j] = rd.rho[j] - lam[j];
    auto scaled_u = [&](const RVector& t) {
        cplx w = 1.0;
        for (int j = 0; j < rd.rank; ++j) w *= std::exp(-sigma[j] * std::log(t[j]));
        return w * u(b, t);
    };

    LeadingCoefficient out;
    if (rd.rank == 1) {
        const auto& F = fits[0];
        Eigen::VectorXcd y(F.t.size());
        for (std::size_t i = 0; i < F.t.size(); ++i) y(i) = scaled_u({F.t[i]});
        const Eigen::VectorXcd c = F.pinv * y;
        const Eigen::VectorXcd r = y - F.design * c;
        out.value = c(0);
        out.condition = F.condition;
        out.residual = y.norm() > 0.0 ? r.norm() / y.norm() : r.norm();
        const double dof = std::max<double>(1.0, static_cast<double>(F.design.rows() - F.design.cols()));
        out.error_estimate = r.norm() / std::sqrt(dof) * F.pinv.row(0).norm();
        return out;
    }
    const auto &F1 = fits[0], &F2 = fits[1];
    Eigen::MatrixXcd Y(F1.t.size(), F2.t.size());
    for (std::size_t i = 0; i < F1.t.size(); ++i)
        for (std::size_t k = 0; k < F2.t.size(); ++k) Y(i, k) = scaled_u({F1.t[i], F2.t[k]});
    // separable least squares: C = P1 Y P2ᵀ
    const Eigen::MatrixXcd C = F1.pinv * Y * F2.pinv.transpose();
    const Eigen::MatrixXcd R = Y - F1.design * C * F2.design.transpose();
    out.value = C(0, 0);
    out.condition = std::max(F1.condition, F2.condition);
    out.residual = Y.norm() > 0.0 ? R.norm() / Y.norm() : R.norm();
    const double dof = std::max<double>(
        1.0, static_cast<double>(Y.size() - F1.design.cols() * F2.design.cols()));
    out.error_estimate = R.norm() / std::sqrt(dof) * F1.pinv.row(0).norm() * F2.pinv.row(0).norm();
    return out;
}

/// Worker count: hardware concurrency, capped by POISSON_BV_THREADS.
inline unsigned default_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("POISSON_BV_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

namespace detail {

/// Runs body(i) for i < count on up to `threads` workers; each index owns its output slot.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Uniform boundary grid with `sizes[j]` points on circle j.
inline std::vector<BoundaryPoint> boundary_grid(ModelId id, const std::vector<std::size_t>& sizes) {
    if (static_cast<int>(sizes.size()) != factor_count(id) || id == ModelId::h3)
        fail(ErrorKind::usage, "boundary grid needs one size per circle factor");
    std::vector<BoundaryPoint> pts;
    auto ang = [](std::size_t i, std::size_t n) { return 2.0 * pi * static_cast<double>(i) / static_cast<double>(n); };
    if (sizes.size() == 1) {
        for (std::size_t i = 0; i < sizes[0]; ++i) pts.push_back({id, {ang(i, sizes[0])}});
    } else {
        for (std::size_t i = 0; i < sizes[0]; ++i)
            for (std::size_t k = 0; k < sizes[1]; ++k) pts.push_back({id, {ang(i, sizes[0]), ang(k, sizes[1])}});
    }
    return pts;
}

struct BoundaryValueResult {
    std::vector<BoundaryPoint> points;
    std::vector<LeadingCoefficient> fits;
    BoundaryFunction function;  // samples plus their discrete Fourier coefficients
};

inline BoundaryValueResult boundary_value(const SpaceModel& model, const SpectralParameter& lam,
                                          const Eigenfunction& u, const std::vector<std::size_t>& grid,
                                          const ExtractionConfig& cfg = {}, unsigned threads = default_threads()) {
    BoundaryValueResult res;
    res.points = boundary_grid(model.id, grid);
    res.fits.resize(res.points.size());
    detail::parallel_for(res.points.size(), threads,
                         [&](std::size_t i) { res.fits[i] = leading_coefficient(model, lam, u, res.points[i], cfg); });
    CVector v;
    for (const auto& f : res.fits) v.push_back(f.value);
    res.function = grid.size() == 1 ? BoundaryFunction::samples(v) : BoundaryFunction::samples2(grid[0], grid[1], v);
    return res;
}

inline Eigenfunction eigenfunction(const PoissonEvaluator& P) {
    auto shared = std::make_shared<PoissonEvaluator>(P);
    return [shared](const BoundaryPoint& b, const RVector& t) { return shared->at_corner(b, t); };
}

/// c(λ) as the leading coefficient of φ_λ at the base boundary point.
inline LeadingCoefficient c_function_via_bv(const SpaceModel& model, const SpectralParameter& lam,
                                            const ExtractionConfig& cfg = {}) {
    const PoissonEvaluator phi(model, lam, BoundaryFunction::constant(model.id, 1.0));
    const BoundaryPoint b{model.id, RVector(model.id == ModelId::h3 ? 2 : factor_count(model.id), 0.0)};
    return leading_coefficient(model, lam, eigenfunction(phi), b, cfg);
}

// ---------------------------------------------------------------------------
// Series-level extraction.

/// coefficient · Π_j wall_series[j](t_j), with offsets (ρ − w·λ)(H_j).
struct ExpansionTerm {
    std::size_t weyl_index = 0;
    cplx coefficient = 1.0;
    std::vector<FormalSeries> wall_series;
};

struct AsymptoticExpansion {
    ModelId model = ModelId::h2;
    SpectralParameter lambda;
    std::vector<ExpansionTerm> terms;
};

/// Checks the offsets against the characteristic exponents and that distinct
/// offsets on a wall are not congruent modulo non-negative integers.
inline void validate_expansion(const SpaceModel& model, const AsymptoticExpansion& e) {
    const RootDatum& rd = model.root_datum;
    const auto ex = characteristic_exponents(rd, e.lambda);
    for (const auto& term : e.terms) {
        if (term.weyl_index >= rd.weyl_order()) fail(ErrorKind::usage, "expansion term has a bad Weyl index");
        if (static_cast<int>(term.wall_series.size()) != rd.rank)
            fail(ErrorKind::usage, "expansion term needs one series per wall");
        for (int j = 0; j < rd.rank; ++j)
            if (std::abs(term.wall_series[j].offset - ex[term.weyl_index][j]) > 1e-12)
                fail(ErrorKind::precondition, "expansion offset differs from the characteristic exponent");
    }
    for (int j = 0; j < rd.rank; ++j)
        for (const auto& a : e.terms)
            for (const auto& b : e.terms) {
                const cplx d = b.wall_series[j].offset - a.wall_series[j].offset;
                if (std::abs(d) <= 1e-12) continue;
                const double n = std::round(d.real());
                if (n >= 0.0 && std::abs(d - n) <= kIntegerTolerance)
                    fail(ErrorKind::precondition, "expansion exponents are congruent modulo integers");
            }
}

/// Frobenius expansion of φ_λ: on each wall the radial operator's two
/// solutions at σ_j and ρ_j + λ_j, joined to the spherical function of that
/// factor at two radii.
inline AsymptoticExpansion spherical_expansion(const SpaceModel& model, const SpectralParameter& lam,
                                               std::size_t N = 60, double t_a = 0.3, double t_b = 0.5) {
    const RootDatum& rd = model.root_datum;
    require_generic(rd, lam);
    std::vector<std::array<FormalSeries, 2>> sols(rd.rank);
    std::vector<std::array<cplx, 2>> coef(rd.rank);
    for (int j = 0; j < rd.rank; ++j) {
        const ThetaOperator P = radial_operator(model, lam, j);
        const cplx s_minus = rd.rho[j] - lam[j], s_plus = rd.rho[j] + lam[j];
        sols[j] = {homogeneous_solution(P, s_minus, N), homogeneous_solution(P, s_plus, N)};
        const ModelId fid = model.id == ModelId::h2xh2 ? ModelId::h2 : model.id;
        const SpaceModel fm = make_model(fid);
        const SpectralParameter fl{{lam[j]}};
        const BoundaryPoint b0{fid, RVector(fid == ModelId::h3 ? 2 : 1, 0.0)};
        Eigen::Matrix2cd A;
        Eigen::Vector2cd y;
        int row = 0;
        for (double t : {t_a, t_b}) {
            A(row, 0) = sols[j][0].evaluate(t);
            A(row, 1) = sols[j][1].evaluate(t);
            y(row) = spherical_function(fm, fl, from_corner({b0, {t}}));
            ++row;
        }
        const Eigen::Vector2cd c = A.fullPivLu().solve(y);
        coef[j] = {c(0), c(1)};
    }
    AsymptoticExpansion e{model.id, lam, {}};
    const auto ex = characteristic_exponents(rd, lam);
    for (std::size_t w = 0; w < rd.weyl_order(); ++w) {
        ExpansionTerm term{w, 1.0, {}};
        for (int j = 0; j < rd.rank; ++j) {
            const int pick = ex[w][j] == rd.rho[j] - lam[j] ? 0 : 1;
            term.coefficient *= coef[j][pick];
            term.wall_series.push_back(sols[j][pick]);
        }
        e.terms.push_back(std::move(term));
    }
    return e;
}

struct DeltaExtraction {
    cplx delta_coefficient;    // u_σ in P v_0 = u_σ ⊗ δ(t)
    cplx leading_coefficient;  // v_0|_{t=0+}
    cplx bv;                   // delta_coefficient / p(λ)
    cplx p_value;
    CVector q_values;          // q_j(0) per wall
    double annihilation_residual = 0.0;  // relative size of the classical parts
};

/// Applies t_j^{−1} P_j^{σ} wall by wall to t^{−σ}·expansion, collecting the
/// δ(t_j) coefficients. `modes` selects the angular mode of each radial operator.
inline DeltaExtraction series_delta_extraction(const SpaceModel& model, const AsymptoticExpansion& e,
                                               const std::vector<int>& modes = {},
                                               double annihilation_tol = 1e-9) {
    const RootDatum& rd = model.root_datum;
    const SpectralParameter& lam = e.lambda;
    require_generic(rd, lam);
    validate_expansion(model, e);
    for (const auto& term : e.terms)
        for (const auto& s : term.wall_series)
            if (s.truncation() < 1) fail(ErrorKind::usage, "expansion truncation must be at least 1");

    DeltaExtraction out;
    out.p_value = genericity_value(rd, lam);

    struct Partial {
        cplx coefficient;
        std::vector<FormalSeries> rest;  // series in t_{j}, t_{j+1}, ... with offsets relative to σ
    };
    std::vector<Partial> current;
    for (const auto& term : e.terms) {
        Partial p{term.coefficient, {}};
        for (int j = 0; j < rd.rank; ++j) {
            FormalSeries s = term.wall_series[j];
            s.offset -= rd.rho[j] - lam[j];
            if (std::abs(s.offset) < 1e-12) s.offset = 0.0;
            p.rest.push_back(std::move(s));
        }
        current.push_back(std::move(p));
    }

    double worst = 0.0;
    for (int j = 0; j < rd.rank; ++j) {
        const int mode = j < static_cast<int>(modes.size()) ? modes[j] : 0;
        const ThetaOperator T = divide_by_t(shift_conjugate(radial_operator(model, lam, j, mode), rd.rho[j] - lam[j]));
        const CVector& low = T.slice(-1);
        out.q_values.push_back(low.size() > 1 ? low[1] : cplx{});
        std::vector<Partial> next;
        for (const auto& p : current) {
            const FormalSeries& s = p.rest.front();
            const HeavisideImage img = apply_to_heaviside_series(T, s);
            // size of the individual contributions that should cancel
            double scale = 0.0;
            for (const auto& [i, c] : T.slices())
                for (std::size_t n = 0; n < s.coeffs.size(); ++n)
                    scale = std::max(scale, std::abs(poly_eval(c, s.offset + static_cast<double>(n)) * s.coeffs[n]));
            double cls = 0.0;
            for (const auto& c : img.classical.coeffs) cls = std::max(cls, std::abs(c));
            if (scale > 0.0) worst = std::max(worst, cls / scale);
            if (img.delta != cplx{})
                next.push_back({p.coefficient * img.delta, std::vector<FormalSeries>(p.rest.begin() + 1, p.rest.end())});
        }
        current = std::move(next);
    }
    out.annihilation_residual = worst;
    if (worst > annihilation_tol)
        fail(ErrorKind::numerical, "expansion is not annihilated by the wall operators (relative residual " +
                                       std::to_string(worst) + ")");
    out.delta_coefficient = 0.0;
    for (const auto& p : current) out.delta_coefficient += p.coefficient;

    out.leading_coefficient = 0.0;
    for (const auto& term : e.terms) {
        bool leading = true;
        cplx v = term.coefficient;
        for (int j = 0; j < rd.rank; ++j) {
            leading = leading && std::abs(term.wall_series[j].offset - (rd.rho[j] - lam[j])) < 1e-12;
            v *= term.wall_series[j].coeff(0);
        }
        if (leading) out.leading_coefficient += v;
    }
    const cplx expect = out.p_value * out.leading_coefficient;
    if (std::abs(out.delta_coefficient - expect) > 1e-8 * std::max(1.0, std::abs(expect)))
        fail(ErrorKind::numerical, "delta coefficient differs from p(lambda) times the leading coefficient");
    out.bv = out.delta_coefficient / out.p_value;
    return out;
}

// ---------------------------------------------------------------------------
// Inversion harness.

struct InversionPoint {
    BoundaryPoint b;
    cplx bv;
    cplx target;
};

struct InversionReport {
    double residual_sup = 0.0;  // sup |bv − c f| / sup |f|
    cplx c_used;
    std::optional<cplx> c_integral;
    std::optional<cplx> c_bv;
    std::vector<InversionPoint> points;
    std::vector<std::string> warnings;
};

inline std::vector<std::size_t> default_inversion_grid(ModelId id) {
    if (id == ModelId::h2xh2) return {8, 8};
    return {16};
}

inline InversionReport verify_inversion(const SpaceModel& model, const SpectralParameter& lam,
                                        const BoundaryFunction& f, const ExtractionConfig& cfg = {},
                                        std::vector<std::size_t> grid = {}, unsigned threads = default_threads()) {
    const RootDatum& rd = model.root_datum;
    require_generic(rd, lam);
    if (grid.empty()) grid = default_inversion_grid(model.id);
    InversionReport rep;
    bool dominant = true;
    for (int j = 0; j < rd.rank; ++j) dominant = dominant && lam[j].real() > 0.0;
    if (dominant) rep.c_integral = c_function_integral(model, lam);
    rep.c_bv = c_function_via_bv(model, lam, cfg).value;
    rep.c_used = rep.c_integral ? *rep.c_integral : *rep.c_bv;
    if (rep.c_integral && std::abs(*rep.c_integral - *rep.c_bv) > 1e-4)
        rep.warnings.push_back("c(lambda) from the integral and from bv(phi_lambda) differ by more than 1e-4");

    const PoissonEvaluator P(model, lam, f);
    const BoundaryValueResult bv = boundary_value(model, lam, eigenfunction(P), grid, cfg, threads);
    double fmax = 0.0, err = 0.0;
    for (std::size_t i = 0; i < bv.points.size(); ++i) {
        const cplx fb = f(bv.points[i]);
        const cplx target = rep.c_used * fb;
        rep.points.push_back({bv.points[i], bv.fits[i].value, target});
        fmax = std::max(fmax, std::abs(fb));
        err = std::max(err, std::abs(bv.fits[i].value - target));
    }
    rep.residual_sup = fmax > 0.0 ? err / fmax : err;
    return rep;
}

/// Least-squares slope of log|err| against log t.
inline double empirical_rate(const RVector& t, const RVector& err) {
    if (t.size() != err.size() || t.size() < 2) fail(ErrorKind::usage, "empirical_rate needs matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = std::log(t[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace poisson_bv
