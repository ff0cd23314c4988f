#pragma once

// Fuchsian-form operators P = p(θ) + tQ(t, θ), θ = t d/dt, acting on truncated
// series t^σ Σ u_k t^k and on layers Σ f_k δ^(k)(t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "error.hpp"
#include "polynomial.hpp"
#include "types.hpp"

namespace poisson_bv {

/// t^offset · Σ_k coeffs[k] t^k, truncated after coeffs.size() terms.
struct FormalSeries {
    cplx offset = 0.0;
    CVector coeffs;

    FormalSeries() = default;
    FormalSeries(cplx off, CVector c) : offset(off), coeffs(std::move(c)) {}

    static FormalSeries zero(std::size_t truncation, cplx off = 0.0) {
        return FormalSeries(off, CVector(truncation + 1, cplx{}));
    }

    std::size_t truncation() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    cplx coeff(std::size_t k) const { return k < coeffs.size() ? coeffs[k] : cplx{}; }

    /// Σ |u_k| r^k, a majorant of the supremum of the polynomial part on |t| <= r.
    double majorant_norm(double r) const {
        double acc = 0.0, rk = 1.0;
        for (const auto& c : coeffs) {
            acc += std::abs(c) * rk;
            rk *= r;
        }
        return acc;
    }

    cplx evaluate(cplx t) const { return std::pow(t, offset) * poly_eval(coeffs, t); }
};

/// Σ_k coeffs[k] ⊗ δ^(k)(t).
struct DeltaLayer {
    CVector coeffs;
    std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

/// Σ_i t^i c_i(θ), powers of t to the left. Slices are ascending coefficient
/// lists in θ. The lowest slice index is 0 for Fuchsian-form operators and -1
/// after divide_by_t.
class ThetaOperator {
public:
    ThetaOperator() = default;

    explicit ThetaOperator(std::map<int, CVector> slices) : slices_(std::move(slices)) {
        for (auto it = slices_.begin(); it != slices_.end();) {
            for (const auto& c : it->second)
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                    fail(ErrorKind::precondition, "ThetaOperator: non-finite coefficient");
            if (it->first < -1) fail(ErrorKind::precondition, "ThetaOperator: t-power below -1");
            if (poly_degree(it->second) < 0 && it->first != 0)
                it = slices_.erase(it);
            else
                ++it;
        }
    }

    /// Validates the Fuchsian form: slice 0 has degree equal to the order.
    static ThetaOperator fuchsian(std::map<int, CVector> slices) {
        ThetaOperator op(std::move(slices));
        if (!op.is_fuchsian())
            fail(ErrorKind::precondition,
                 "operator is not of Fuchsian form (t^0 slice degree below the operator order)");
        return op;
    }

    const std::map<int, CVector>& slices() const { return slices_; }

    const CVector& slice(int i) const {
        static const CVector empty;
        auto it = slices_.find(i);
        return it == slices_.end() ? empty : it->second;
    }

    int min_power() const { return slices_.empty() ? 0 : slices_.begin()->first; }
    int max_power() const { return slices_.empty() ? 0 : slices_.rbegin()->first; }

    int order() const {
        int m = 0;
        for (const auto& [i, c] : slices_) m = std::max(m, poly_degree(c));
        return m;
    }

    bool is_fuchsian() const {
        if (slices_.empty() || min_power() < 0) return false;
        return poly_degree(slice(0)) == order();
    }

    /// c_i(s) for one slice.
    cplx symbol(int i, cplx s) const { return poly_eval(slice(i), s); }

private:
    std::map<int, CVector> slices_;
};

struct IndicialPolynomial {
    MonicPolynomial poly;
    cplx normalization;  // leading coefficient of the t^0 slice
};

/// p(s) = (t^{-s} P t^s)|_{t=0}, made monic.
inline IndicialPolynomial indicial_polynomial(const ThetaOperator& P) {
    if (!P.is_fuchsian())
        fail(ErrorKind::precondition, "indicial_polynomial: operator is not of Fuchsian form");
    auto [poly, lead] = MonicPolynomial::normalize(P.slice(0));
    return {std::move(poly), lead};
}

/// t^{-λ} P t^{λ}: every slice re-expanded with θ → θ + λ.
inline ThetaOperator shift_conjugate(const ThetaOperator& P, cplx lambda) {
    std::map<int, CVector> out;
    for (const auto& [i, c] : P.slices()) out[i] = taylor_shift(c, lambda);
    return ThetaOperator(std::move(out));
}

/// Multiplies by a scalar.
inline ThetaOperator scale(const ThetaOperator& P, cplx factor) {
    std::map<int, CVector> out;
    for (const auto& [i, c] : P.slices()) {
        CVector s = c;
        for (auto& x : s) x *= factor;
        out[i] = std::move(s);
    }
    return ThetaOperator(std::move(out));
}

/// t^{-1} P. Requires p(0) = 0 so that the new t^{-1} slice s·q(s) is the
/// differential operator ∂_t q(θ).
inline ThetaOperator divide_by_t(const ThetaOperator& P, double tol = 1e-10) {
    if (P.min_power() < 0) fail(ErrorKind::precondition, "divide_by_t: operator already divided");
    const CVector& s0 = P.slice(0);
    double scale_ref = 0.0;
    for (const auto& c : s0) scale_ref = std::max(scale_ref, std::abs(c));
    if (!s0.empty() && std::abs(s0[0]) > tol * std::max(1.0, scale_ref))
        fail(ErrorKind::precondition, "divide_by_t: indicial polynomial does not vanish at 0");
    std::map<int, CVector> out;
    for (const auto& [i, c] : P.slices()) out[i - 1] = c;
    if (!out[-1].empty()) out[-1][0] = 0.0;
    return ThetaOperator(std::move(out));
}

/// P(t^σ Σ u_n t^n) t^{-σ-min_power}, truncated at the input truncation.
/// The result has offset σ + min_power.
inline FormalSeries apply_to_shifted_series(const ThetaOperator& P, const FormalSeries& u) {
    const int lo = P.min_power();
    FormalSeries out = FormalSeries::zero(u.truncation(), u.offset + static_cast<double>(lo));
    const long N = static_cast<long>(u.truncation());
    for (long k = 0; k <= N; ++k) {
        // exponent σ + lo + k collects u_n with n + i = k + lo
        cplx acc = 0.0;
        for (const auto& [i, c] : P.slices()) {
            const long n = k + lo - i;
            if (n < 0 || n > N) continue;
            acc += poly_eval(c, u.offset + static_cast<double>(n)) * u.coeffs[n];
        }
        out.coeffs[k] = acc;
    }
    return out;
}

/// Result of applying an operator to Y(t)·t^μ·series, Y the Heaviside function.
struct HeavisideImage {
    FormalSeries classical;  // the part supported in t > 0
    cplx delta = 0.0;        // coefficient of δ(t)
};

/// Distributional application to Y(t) t^μ Σ u_n t^n. Only the t^{-1} slice
/// s·q(s) can produce a delta: ∂_t q(θ)(Y g) = q(0) g(0) δ + Y ∂_t q(θ) g.
inline HeavisideImage apply_to_heaviside_series(const ThetaOperator& P, const FormalSeries& u) {
    HeavisideImage img{apply_to_shifted_series(P, u), 0.0};
    if (P.min_power() < 0) {
        if (u.offset == cplx{}) {
            const CVector& s = P.slice(-1);
            img.delta = (s.size() > 1 ? s[1] : cplx{}) * u.coeff(0);
        } else if (u.offset.real() <= 0.0) {
            fail(ErrorKind::precondition,
                 "apply_to_heaviside_series: t^(mu-1) is not locally integrable for Re mu <= 0");
        }
    }
    return img;
}

inline FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) {
    if (a.offset != b.offset) fail(ErrorKind::precondition, "series offsets differ");
    FormalSeries out = a;
    out.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()), cplx{});
    for (std::size_t k = 0; k < b.coeffs.size(); ++k) out.coeffs[k] -= b.coeffs[k];
    return out;
}

inline double resonance_threshold(long k, int m) {
    return 1e-10 * std::pow(1.0 + std::abs(static_cast<double>(k)), m);
}

/// H_p f for f with offset 0: t^n ↦ t^n / p(n). All roots need Re < 0.
inline FormalSeries hp_apply(const MonicPolynomial& p, const FormalSeries& f) {
    if (f.offset != cplx{}) fail(ErrorKind::precondition, "hp_apply: series must have offset 0");
    for (const auto& r : p.roots())
        if (r.real() >= 0.0)
            fail(ErrorKind::precondition, "hp_apply: indicial root with non-negative real part");
    FormalSeries out = f;
    for (std::size_t n = 0; n < out.coeffs.size(); ++n) out.coeffs[n] /= p(static_cast<double>(n));
    return out;
}

/// q(θ) applied to a series: t^{σ+n} ↦ q(σ+n) t^{σ+n}.
inline FormalSeries theta_apply(const MonicPolynomial& q, const FormalSeries& f) {
    FormalSeries out = f;
    for (std::size_t n = 0; n < out.coeffs.size(); ++n) out.coeffs[n] *= q(f.offset + static_cast<double>(n));
    return out;
}

/// Unique truncated solution of P u = f + O(t^{N+1}) through the recursion
/// p(k) u_k = f_k − Σ_{i≥1} c_i(k−i) u_{k−i}.
inline FormalSeries solve_formal(const ThetaOperator& P, const FormalSeries& f, std::size_t N) {
    const auto ip = indicial_polynomial(P);
    if (f.offset != cplx{}) fail(ErrorKind::precondition, "solve_formal: right-hand side must have offset 0");
    const int m = ip.poly.degree();
    FormalSeries u = FormalSeries::zero(N);
    for (std::size_t k = 0; k <= N; ++k) {
        const cplx pk = ip.poly(static_cast<double>(k));
        if (std::abs(pk) < resonance_threshold(static_cast<long>(k), m))
            throw ResonanceError("solve_formal: resonance, p(" + std::to_string(k) + ") = 0",
                                 static_cast<long>(k));
        cplx rhs = f.coeff(k);
        for (const auto& [i, c] : P.slices()) {
            if (i < 1 || static_cast<std::size_t>(i) > k) continue;
            rhs -= poly_eval(c, static_cast<double>(k - i)) * u.coeffs[k - i];
        }
        u.coeffs[k] = rhs / (pk * ip.normalization);
    }
    return u;
}

/// P u − f on the common truncation.
inline FormalSeries formal_residual(const ThetaOperator& P, const FormalSeries& u, const FormalSeries& f) {
    FormalSeries pu = apply_to_shifted_series(P, u);
    FormalSeries rhs = FormalSeries::zero(pu.truncation(), pu.offset);
    for (std::size_t k = 0; k <= rhs.truncation(); ++k) rhs.coeffs[k] = f.coeff(k);
    return pu - rhs;
}

/// Frobenius solution t^μ (1 + Σ_{k≥1} g_k t^k) of P u = 0 at a simple
/// indicial root μ, built from solve_formal on t^{-μ-1} P t^{μ+1}.
inline FormalSeries homogeneous_solution(const ThetaOperator& P, cplx mu, std::size_t N) {
    const auto ip = indicial_polynomial(P);
    if (std::abs(ip.poly(mu)) > 1e-9 * std::max(1.0, std::abs(mu)) * ip.poly.degree())
        fail(ErrorKind::precondition, "homogeneous_solution: exponent is not an indicial root");
    FormalSeries g = FormalSeries::zero(N, mu);
    g.coeffs[0] = 1.0;
    if (N == 0) return g;
    // P^μ(1 + t h) = 0  ⇔  P^{μ+1} h = −t^{-1} P^μ 1
    const ThetaOperator Pmu = shift_conjugate(P, mu);
    FormalSeries r = FormalSeries::zero(N);
    r.coeffs[0] = 1.0;
    r = apply_to_shifted_series(Pmu, r);
    FormalSeries rhs = FormalSeries::zero(N - 1);
    for (std::size_t k = 0; k + 1 <= N; ++k) rhs.coeffs[k] = -r.coeff(k + 1);
    try {
        const FormalSeries h = solve_formal(shift_conjugate(P, mu + 1.0), rhs, N - 1);
        for (std::size_t k = 1; k <= N; ++k) g.coeffs[k] = h.coeffs[k - 1];
    } catch (const ResonanceError& e) {
        throw ResonanceError("homogeneous_solution: exponent mu + " + std::to_string(e.index() + 1) +
                                 " is also indicial",
                             e.index() + 1);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Successive approximation with a certified radius.

struct FixedPointResult {
    FormalSeries solution;
    double certified_radius = 0.0;
    double ratio = 0.0;        // geometric factor of the majorant on the certified disk
    double K = 1.0;            // coefficient sup bound on the certified disk
    int shift = 0;             // k with roots of p(k + ·) in Re s <= -2
    int iterations = 0;
    RVector increment_norms;   // majorant norms of w_n on the certified disk
    double initial_norm = 0.0; // norm of the shifted right-hand side
};

namespace detail {

/// Newton-form coefficients a_j with q(s) = Σ_j a_j Π_{k<j}(s − nodes[k]).
inline CVector newton_coefficients(CVector q, const CVector& nodes) {
    CVector a;
    for (std::size_t j = 0; j <= nodes.size(); ++j) {
        if (q.empty()) {
            a.push_back(0.0);
            continue;
        }
        if (j == nodes.size()) {
            // remaining quotient is a constant when deg q <= number of nodes
            a.push_back(q[0]);
            for (std::size_t k = 1; k < q.size(); ++k)
                if (std::abs(q[k]) > 0.0)
                    fail(ErrorKind::precondition, "perturbation slice exceeds the indicial degree");
            break;
        }
        // synthetic division by (s − node)
        const cplx z = nodes[j];
        const std::size_t n = q.size();
        CVector quot(n > 1 ? n - 1 : 0);
        cplx carry = 0.0;
        for (std::size_t k = n; k-- > 1;) {
            carry = q[k] + carry * z;
            quot[k - 1] = carry;
        }
        a.push_back(q[0] + (n > 1 ? quot[0] * z : cplx{}));
        q = std::move(quot);
    }
    return a;
}

}  // namespace detail

/// Solves P u = f by the shifted fixed-point iteration v = f̃ − tQ̃ H v,
/// u = head + t^k H v, on series truncated at f's truncation.
///
/// The certified radius is the largest r <= radius_hint (found by bisection)
/// with K(r)(m+1)e^m r <= 1/2, where K(r) bounds the coefficients of Q̃ in the
/// Newton basis of the shifted indicial polynomial. On that disk the
/// increments obey ‖w_n‖ <= ‖f̃‖ 2^{-n} in the majorant norm.
inline FixedPointResult solve_fixed_point(const ThetaOperator& P, const FormalSeries& f, double radius_hint,
                                          double tol, int max_iter = 1000) {
    if (!(radius_hint > 0.0)) fail(ErrorKind::usage, "solve_fixed_point: radius_hint must be positive");
    const auto ip = indicial_polynomial(P);
    const ThetaOperator Pn = scale(P, 1.0 / ip.normalization);
    const int m = ip.poly.degree();
    const std::size_t N = f.truncation();
    FormalSeries fn = f;
    for (auto& c : fn.coeffs) c /= ip.normalization;

    const CVector roots = ip.poly.roots();
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) max_re = std::max(max_re, r.real());
    for (long k = 0; k <= static_cast<long>(std::ceil(std::max(max_re, 0.0))) + 1; ++k)
        if (std::abs(ip.poly(static_cast<double>(k))) < resonance_threshold(k, m))
            throw ResonanceError("solve_fixed_point: non-negative integer indicial root " + std::to_string(k), k);

    FixedPointResult res;
    res.shift = roots.empty() ? 0 : std::max(0, static_cast<int>(std::ceil(max_re + 2.0)));
    const std::size_t k = static_cast<std::size_t>(res.shift);

    FormalSeries head = FormalSeries::zero(N);
    if (k > 0) {
        const FormalSeries h = solve_formal(Pn, fn, std::min(k - 1, N));
        for (std::size_t n = 0; n < h.coeffs.size(); ++n) head.coeffs[n] = h.coeffs[n];
    }
    const FormalSeries rem = formal_residual(Pn, head, fn);
    FormalSeries ftil = FormalSeries::zero(N >= k ? N - k : 0);
    for (std::size_t n = 0; n + k <= N; ++n) ftil.coeffs[n] = -rem.coeff(n + k);
    if (N < k) ftil.coeffs.assign(1, cplx{});

    const ThetaOperator Ps = shift_conjugate(Pn, static_cast<double>(k));
    CVector sroots = roots;
    for (auto& r : sroots) r -= static_cast<double>(k);
    const MonicPolynomial ps = MonicPolynomial::from_roots(sroots);

    // Newton-basis coefficients of every perturbation slice
    std::map<int, CVector> newton;
    for (const auto& [i, c] : Ps.slices())
        if (i >= 1) newton[i] = detail::newton_coefficients(c, sroots);
    auto K_of = [&](double r) {
        double K = 1.0;
        for (int j = 0; j <= m; ++j) {
            double s = 0.0;
            for (const auto& [i, a] : newton)
                if (static_cast<std::size_t>(j) < a.size()) s += std::abs(a[j]) * std::pow(r, i - 1);
            K = std::max(K, s);
        }
        return K;
    };
    const double em = std::exp(static_cast<double>(m)) * (m + 1);
    auto ratio_of = [&](double r) { return K_of(r) * em * r; };
    double r = radius_hint;
    if (ratio_of(r) > 0.5) {
        double lo = 0.0, hi = radius_hint;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ratio_of(mid) <= 0.5 ? lo : hi) = mid;
        }
        r = lo;
    }
    if (!(r > 0.0) || !std::isfinite(r))
        fail(ErrorKind::numerical, "solve_fixed_point: could not certify a positive radius");
    res.certified_radius = r;
    res.K = K_of(r);
    res.ratio = ratio_of(r);

    FormalSeries v = FormalSeries::zero(ftil.truncation());
    FormalSeries w = ftil;
    res.initial_norm = ftil.majorant_norm(r);
    for (int n = 0; n < max_iter; ++n) {
        const double wn = w.majorant_norm(r);
        res.increment_norms.push_back(wn);
        for (std::size_t q = 0; q < v.coeffs.size(); ++q) v.coeffs[q] += w.coeffs[q];
        res.iterations = n + 1;
        if (wn < tol || wn == 0.0) break;
        // w ← −Σ_{i≥1} t^i q̃_i(θ) H w
        const FormalSeries hw = hp_apply(ps, w);
        FormalSeries next = FormalSeries::zero(w.truncation());
        for (const auto& [i, c] : Ps.slices()) {
            if (i < 1) continue;
            for (std::size_t q = 0; q + i <= next.truncation(); ++q)
                next.coeffs[q + i] -= poly_eval(c, static_cast<double>(q)) * hw.coeffs[q];
        }
        w = std::move(next);
    }
    const FormalSeries tail = hp_apply(ps, v);
    res.solution = head;
    for (std::size_t n = 0; n + k <= N; ++n) res.solution.coeffs[n + k] += tail.coeffs[n];
    return res;
}

/// Taylor coefficients of an analytic callback by the trapezoid rule on |t| = radius.
inline FormalSeries taylor_coefficients(const std::function<cplx(cplx)>& f, std::size_t N, double radius) {
    const std::size_t M = std::max<std::size_t>(64, 4 * (N + 1));
    CVector samples(M);
    for (std::size_t j = 0; j < M; ++j) samples[j] = f(std::polar(radius, 2.0 * pi * j / M));
    FormalSeries out = FormalSeries::zero(N);
    for (std::size_t k = 0; k <= N; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) acc += samples[j] * std::polar(1.0, -2.0 * pi * double(k * j % M) / M);
        out.coeffs[k] = acc / static_cast<double>(M) / std::pow(radius, static_cast<double>(k));
    }
    return out;
}

inline FixedPointResult solve_fixed_point(const ThetaOperator& P, const std::function<cplx(cplx)>& f,
                                          std::size_t N, double radius_hint, double tol) {
    return solve_fixed_point(P, taylor_coefficients(f, N, radius_hint), radius_hint, tol);
}

// ---------------------------------------------------------------------------
// Delta layers.

namespace detail {

/// k! / (k − i)!
inline double falling(long k, long i) {
    double r = 1.0;
    for (long q = 0; q < i; ++q) r *= static_cast<double>(k - q);
    return r;
}

/// t^i δ^(k) = (−1)^i k!/(k−i)! δ^(k−i), zero for i > k.
inline double t_power_on_delta(long k, long i) {
    if (i > k) return 0.0;
    return (i % 2 ? -1.0 : 1.0) * falling(k, i);
}

}  // namespace detail

/// P applied to Σ v_k δ^(k), using c(θ)δ^(k) = c(−k−1)δ^(k).
inline DeltaLayer apply_to_delta_layer(const ThetaOperator& P, const DeltaLayer& v) {
    if (P.min_power() < 0) fail(ErrorKind::precondition, "t^{-1} is not defined on delta layers");
    DeltaLayer out{CVector(v.coeffs.size(), cplx{})};
    for (long k = 0; k < static_cast<long>(v.coeffs.size()); ++k)
        for (const auto& [i, c] : P.slices()) {
            const double tk = detail::t_power_on_delta(k, i);
            if (tk == 0.0) continue;
            out.coeffs[k - i] += tk * poly_eval(c, -static_cast<double>(k) - 1.0) * v.coeffs[k];
        }
    return out;
}

/// Unique layer v with P v = f, by back substitution from the top layer.
inline DeltaLayer solve_delta_layer(const ThetaOperator& P, const DeltaLayer& f) {
    const auto ip = indicial_polynomial(P);
    const int m = ip.poly.degree();
    const long K = static_cast<long>(f.coeffs.size()) - 1;
    DeltaLayer v{CVector(f.coeffs.size(), cplx{})};
    for (long k = K; k >= 0; --k) {
        const cplx pk = ip.poly(-static_cast<double>(k) - 1.0);
        if (std::abs(pk) < resonance_threshold(k + 1, m))
            throw ResonanceError("solve_delta_layer: p(" + std::to_string(-k - 1) + ") = 0", -k - 1);
        cplx rhs = f.coeffs[k];
        for (const auto& [i, c] : P.slices()) {
            if (i < 1 || k + i > K) continue;
            rhs -= detail::t_power_on_delta(k + i, i) * poly_eval(c, -static_cast<double>(k + i) - 1.0) *
                   v.coeffs[k + i];
        }
        v.coeffs[k] = rhs / (pk * ip.normalization);
    }
    return v;
}

}  // namespace poisson_bv
