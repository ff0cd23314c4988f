#pragma once

// n×n systems p(θ) I_n + Σ_{i≥1,k} t^i A_{ik} θ^k with constant matrices A_{ik}.

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fuchsian.hpp"

namespace poisson_bv {

using CMatrix = Eigen::MatrixXcd;
using CColumn = Eigen::VectorXcd;

struct VectorSeries {
    std::vector<CColumn> coeffs;  // u_0 .. u_N, offset 0

    static VectorSeries zero(int n, std::size_t N) { return {std::vector<CColumn>(N + 1, CColumn::Zero(n))}; }
    std::size_t truncation() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

struct VectorDeltaLayer {
    std::vector<CColumn> coeffs;  // Σ_k coeffs[k] δ^(k)
};

class MatrixThetaOperator {
public:
    MatrixThetaOperator(int n, MonicPolynomial p, std::map<std::pair<int, int>, CMatrix> perturbation)
        : n_(n), p_(std::move(p)), pert_(std::move(perturbation)) {
        for (const auto& [key, A] : pert_) {
            if (key.first < 1) fail(ErrorKind::precondition, "MatrixThetaOperator: perturbation needs t-power >= 1");
            if (key.second < 0 || key.second > p_.degree())
                fail(ErrorKind::precondition, "MatrixThetaOperator: perturbation theta-degree exceeds deg p");
            if (A.rows() != n_ || A.cols() != n_)
                fail(ErrorKind::precondition, "MatrixThetaOperator: matrix size mismatch");
        }
    }

    int size() const { return n_; }
    const MonicPolynomial& indicial() const { return p_; }
    const std::map<std::pair<int, int>, CMatrix>& perturbation() const { return pert_; }

    /// Σ_k A_{ik} s^k for one t-power.
    CMatrix slice_symbol(int i, cplx s) const {
        CMatrix out = CMatrix::Zero(n_, n_);
        for (const auto& [key, A] : pert_)
            if (key.first == i) out += A * std::pow(s, key.second);
        return out;
    }

    int max_power() const {
        int m = 0;
        for (const auto& [key, A] : pert_) m = std::max(m, key.first);
        return m;
    }

    /// Scalar operator when n = 1.
    ThetaOperator as_scalar() const {
        if (n_ != 1) fail(ErrorKind::usage, "as_scalar needs a 1x1 system");
        std::map<int, CVector> slices;
        slices[0] = p_.coefficients();
        for (const auto& [key, A] : pert_) {
            auto& s = slices[key.first];
            if (static_cast<int>(s.size()) <= key.second) s.resize(key.second + 1, cplx{});
            s[key.second] += A(0, 0);
        }
        return ThetaOperator(std::move(slices));
    }

private:
    int n_;
    MonicPolynomial p_;
    std::map<std::pair<int, int>, CMatrix> pert_;
};

inline VectorSeries apply_system(const MatrixThetaOperator& M, const VectorSeries& u) {
    const long N = static_cast<long>(u.truncation());
    VectorSeries out = VectorSeries::zero(M.size(), u.truncation());
    for (long k = 0; k <= N; ++k) {
        out.coeffs[k] = M.indicial()(static_cast<double>(k)) * u.coeffs[k];
        for (int i = 1; i <= M.max_power() && i <= k; ++i)
            out.coeffs[k] += M.slice_symbol(i, static_cast<double>(k - i)) * u.coeffs[k - i];
    }
    return out;
}

inline VectorSeries solve_formal_system(const MatrixThetaOperator& M, const VectorSeries& f, std::size_t N) {
    const int m = M.indicial().degree();
    VectorSeries u = VectorSeries::zero(M.size(), N);
    for (std::size_t k = 0; k <= N; ++k) {
        const cplx pk = M.indicial()(static_cast<double>(k));
        if (std::abs(pk) < resonance_threshold(static_cast<long>(k), m))
            throw ResonanceError("solve_formal_system: resonance, p(" + std::to_string(k) + ") = 0",
                                 static_cast<long>(k));
        CColumn rhs = k < f.coeffs.size() ? f.coeffs[k] : CColumn::Zero(M.size());
        for (int i = 1; i <= M.max_power() && static_cast<std::size_t>(i) <= k; ++i)
            rhs -= M.slice_symbol(i, static_cast<double>(k - i)) * u.coeffs[k - i];
        u.coeffs[k] = rhs / pk;
    }
    return u;
}

inline VectorDeltaLayer apply_system_to_delta_layer(const MatrixThetaOperator& M, const VectorDeltaLayer& v) {
    const long K = static_cast<long>(v.coeffs.size()) - 1;
    VectorDeltaLayer out{std::vector<CColumn>(v.coeffs.size(), CColumn::Zero(M.size()))};
    for (long k = 0; k <= K; ++k) {
        const double s = -static_cast<double>(k) - 1.0;
        out.coeffs[k] += M.indicial()(s) * v.coeffs[k];
        for (int i = 1; i <= M.max_power() && i <= k; ++i)
            out.coeffs[k - i] += detail::t_power_on_delta(k, i) * (M.slice_symbol(i, s) * v.coeffs[k]);
    }
    return out;
}

inline VectorDeltaLayer solve_delta_layer_system(const MatrixThetaOperator& M, const VectorDeltaLayer& f) {
    const int m = M.indicial().degree();
    const long K = static_cast<long>(f.coeffs.size()) - 1;
    VectorDeltaLayer v{std::vector<CColumn>(f.coeffs.size(), CColumn::Zero(M.size()))};
    for (long k = K; k >= 0; --k) {
        const cplx pk = M.indicial()(-static_cast<double>(k) - 1.0);
        if (std::abs(pk) < resonance_threshold(k + 1, m))
            throw ResonanceError("solve_delta_layer_system: p(" + std::to_string(-k - 1) + ") = 0", -k - 1);
        CColumn rhs = f.coeffs[k];
        for (int i = 1; i <= M.max_power() && k + i <= K; ++i)
            rhs -= detail::t_power_on_delta(k + i, i) *
                   (M.slice_symbol(i, -static_cast<double>(k + i) - 1.0) * v.coeffs[k + i]);
        v.coeffs[k] = rhs / pk;
    }
    return v;
}

}  // namespace poisson_bv
