#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "error.hpp"
#include "types.hpp"

namespace poisson_bv {

// Coefficient lists are ascending: c[k] multiplies s^k.

inline cplx poly_eval(std::span<const cplx> c, cplx s) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

/// Coefficients of q(s) = c(s + a).
inline CVector taylor_shift(std::span<const cplx> c, cplx a) {
    CVector out(c.begin(), c.end());
    const std::size_t n = out.size();
    // repeated synthetic division by (s - (-a))
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) out[i - 1] += a * out[i];
    return out;
}

inline CVector poly_mul(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.empty() || b.empty()) return {};
    CVector out(a.size() + b.size() - 1, cplx{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Index of the highest nonzero coefficient, or -1 for the zero polynomial.
inline int poly_degree(std::span<const cplx> c) {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (c[k] != cplx{}) return k;
    return -1;
}

/// Monic polynomial s^m + c_{m-1}s^{m-1} + ... + c_0.
///
/// When built from roots the roots are kept, so that root-dependent
/// preconditions do not go through a numerical eigenvalue solve.
class MonicPolynomial {
public:
    MonicPolynomial() : coeffs_{cplx{1.0}} {}

    /// Takes ascending coefficients whose last entry must be exactly 1.
    explicit MonicPolynomial(CVector coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty() || coeffs_.back() != cplx{1.0})
            fail(ErrorKind::precondition, "MonicPolynomial: leading coefficient must be 1");
        for (const auto& c : coeffs_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                fail(ErrorKind::precondition, "MonicPolynomial: non-finite coefficient");
    }

    static MonicPolynomial from_roots(const CVector& roots) {
        CVector c{cplx{1.0}};
        for (const auto& r : roots) {
            const CVector lin{-r, cplx{1.0}};
            c = poly_mul(c, lin);
        }
        MonicPolynomial p(std::move(c));
        p.roots_ = roots;
        return p;
    }

    /// Divides by the leading coefficient; returns the polynomial and that factor.
    static std::pair<MonicPolynomial, cplx> normalize(std::span<const cplx> c) {
        const int deg = poly_degree(c);
        if (deg < 0) fail(ErrorKind::precondition, "cannot normalize the zero polynomial");
        const cplx lead = c[deg];
        CVector m(deg + 1);
        for (int k = 0; k < deg; ++k) m[k] = c[k] / lead;
        m[deg] = 1.0;
        return {MonicPolynomial(std::move(m)), lead};
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const CVector& coefficients() const { return coeffs_; }

    cplx operator()(cplx s) const { return poly_eval(coeffs_, s); }

    /// p'(s) from the coefficient form.
    cplx derivative(cplx s) const {
        cplx acc = 0.0;
        for (int k = degree(); k >= 1; --k) acc = acc * s + static_cast<double>(k) * coeffs_[k];
        return acc;
    }

    /// Stored roots when available, otherwise eigenvalues of the companion matrix.
    CVector roots() const {
        if (roots_) return *roots_;
        const int m = degree();
        if (m == 0) return {};
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
        for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < m; ++i) comp(i, m - 1) = -coeffs_[i];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        CVector r(m);
        for (int i = 0; i < m; ++i) r[i] = es.eigenvalues()[i];
        std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return r;
    }

    bool has_stored_roots() const { return roots_.has_value(); }

    /// p(s + a), monic again.
    MonicPolynomial shifted(cplx a) const {
        MonicPolynomial q(taylor_shift(coeffs_, a));
        q.coeffs_.back() = 1.0;
        if (roots_) {
            CVector r = *roots_;
            for (auto& x : r) x -= a;
            q.roots_ = std::move(r);
        }
        return q;
    }

private:
    CVector coeffs_;
    std::optional<CVector> roots_;
};

}  // namespace poisson_bv
