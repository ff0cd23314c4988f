#pragma once

// Functions on the boundary circle or torus, held as centered Fourier
// coefficients c_n, |n| ≤ K, per circle factor. Sampled input is converted by
// the discrete Fourier transform and keeps its samples.

#include <cmath>
#include <optional>
#include <vector>

#include "error.hpp"
#include "models.hpp"
#include "types.hpp"

namespace poisson_bv {

class BoundaryFunction {
public:
    BoundaryFunction() = default;

    /// c_{−K..K} on the circle.
    static BoundaryFunction fourier(CVector centered) {
        if (centered.size() % 2 == 0) fail(ErrorKind::usage, "centered Fourier list must have odd length");
        BoundaryFunction f;
        f.model_ = ModelId::h2;
        f.band_ = {static_cast<int>(centered.size() / 2)};
        f.coeffs_ = std::move(centered);
        f.check_finite();
        return f;
    }

    /// rows[n1 + K1][n2 + K2] = c_{n1, n2} on the torus.
    static BoundaryFunction fourier2(const std::vector<CVector>& rows) {
        if (rows.empty() || rows.size() % 2 == 0) fail(ErrorKind::usage, "Fourier row count must be odd");
        const std::size_t w = rows.front().size();
        if (w % 2 == 0) fail(ErrorKind::usage, "Fourier row length must be odd");
        BoundaryFunction f;
        f.model_ = ModelId::h2xh2;
        f.band_ = {static_cast<int>(rows.size() / 2), static_cast<int>(w / 2)};
        f.coeffs_.clear();
        for (const auto& r : rows) {
            if (r.size() != w) fail(ErrorKind::usage, "Fourier rows must have equal length");
            f.coeffs_.insert(f.coeffs_.end(), r.begin(), r.end());
        }
        f.check_finite();
        return f;
    }

    /// Values at θ_i = 2πi/N.
    static BoundaryFunction samples(CVector values) {
        const std::size_t N = values.size();
        if (N < 1) fail(ErrorKind::usage, "need at least one sample");
        BoundaryFunction f;
        f.model_ = ModelId::h2;
        f.grid_ = {N};
        f.samples_ = values;
        f.band_ = {static_cast<int>(N / 2)};
        f.coeffs_ = dft(values, f.band_[0]);
        f.check_finite();
        return f;
    }

    /// Values at (2πi/N1, 2πj/N2), row-major in i.
    static BoundaryFunction samples2(std::size_t N1, std::size_t N2, const CVector& values) {
        if (values.size() != N1 * N2 || N1 == 0 || N2 == 0)
            fail(ErrorKind::usage, "sample count does not match the grid");
        BoundaryFunction f;
        f.model_ = ModelId::h2xh2;
        f.grid_ = {N1, N2};
        f.samples_ = values;
        f.band_ = {static_cast<int>(N1 / 2), static_cast<int>(N2 / 2)};
        const int K1 = f.band_[0], K2 = f.band_[1];
        // transform along the second index, then the first
        std::vector<CVector> partial(N1);
        for (std::size_t i = 0; i < N1; ++i)
            partial[i] = dft(CVector(values.begin() + i * N2, values.begin() + (i + 1) * N2), K2);
        f.coeffs_.assign((2 * K1 + 1) * (2 * K2 + 1), cplx{});
        for (int n2 = 0; n2 < 2 * K2 + 1; ++n2) {
            CVector col(N1);
            for (std::size_t i = 0; i < N1; ++i) col[i] = partial[i][n2];
            const CVector c = dft(col, K1);
            for (int n1 = 0; n1 < 2 * K1 + 1; ++n1) f.coeffs_[n1 * (2 * K2 + 1) + n2] = c[n1];
        }
        f.check_finite();
        return f;
    }

    static BoundaryFunction constant(ModelId id, cplx c) {
        if (id == ModelId::h2xh2) return fourier2(std::vector<CVector>{CVector{c}});
        BoundaryFunction f = fourier({c});
        f.model_ = id;
        return f;
    }

    ModelId model() const { return model_; }
    int band_limit(std::size_t factor = 0) const { return band_.at(factor); }
    const std::vector<int>& band_limits() const { return band_; }
    bool has_samples() const { return !samples_.empty(); }
    const CVector& sample_values() const { return samples_; }
    const std::vector<std::size_t>& grid() const { return grid_; }

    /// c_n (rank one) or c_{n1,n2}; zero outside the band.
    cplx coefficient(int n1, int n2 = 0) const {
        if (std::abs(n1) > band_[0]) return 0.0;
        if (band_.size() == 1) return n2 == 0 ? coeffs_[n1 + band_[0]] : cplx{};
        if (std::abs(n2) > band_[1]) return 0.0;
        return coeffs_[(n1 + band_[0]) * (2 * band_[1] + 1) + (n2 + band_[1])];
    }

    /// Trigonometric interpolant at b.
    cplx operator()(const BoundaryPoint& b) const {
        if (b.model != model_) fail(ErrorKind::usage, "boundary point model mismatch");
        if (model_ == ModelId::h3) {
            if (band_[0] != 0) fail(ErrorKind::usage, "only constant boundary functions are supported on h3");
            return coeffs_[0];
        }
        const int K1 = band_[0];
        CVector e1(2 * K1 + 1);
        for (int n = -K1; n <= K1; ++n) e1[n + K1] = std::polar(1.0, n * b.angles[0]);
        if (band_.size() == 1) {
            cplx acc = 0.0;
            for (int n = 0; n < 2 * K1 + 1; ++n) acc += coeffs_[n] * e1[n];
            return acc;
        }
        const int K2 = band_[1];
        cplx acc = 0.0;
        for (int n1 = 0; n1 < 2 * K1 + 1; ++n1) {
            cplx row = 0.0;
            for (int n2 = -K2; n2 <= K2; ++n2)
                row += coeffs_[n1 * (2 * K2 + 1) + n2 + K2] * std::polar(1.0, n2 * b.angles[1]);
            acc += row * e1[n1];
        }
        return acc;
    }

    /// Centered coefficient table, row-major over factors.
    const CVector& coefficients() const { return coeffs_; }

    /// Largest |f| on a grid fine enough for the band.
    double sup_norm_estimate(int per_factor = 0) const {
        const int n1 = per_factor > 0 ? per_factor : 4 * band_[0] + 8;
        double m = 0.0;
        if (band_.size() == 1) {
            for (int i = 0; i < n1; ++i)
                m = std::max(m, std::abs((*this)(BoundaryPoint{model_, {2.0 * pi * i / n1}})));
            return m;
        }
        const int n2 = per_factor > 0 ? per_factor : 4 * band_[1] + 8;
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                m = std::max(m, std::abs((*this)(BoundaryPoint{model_, {2.0 * pi * i / n1, 2.0 * pi * j / n2}})));
        return m;
    }

private:
    /// c_n = (1/N) Σ f_i e^{−inθ_i}, |n| ≤ K; the Nyquist mode of an even grid
    /// is split evenly between ±N/2.
    static CVector dft(const CVector& v, int K) {
        const std::size_t N = v.size();
        CVector c(2 * K + 1, cplx{});
        for (int n = -K; n <= K; ++n) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < N; ++i)
                acc += v[i] * std::polar(1.0, -2.0 * pi * static_cast<double>((static_cast<long>(n) * static_cast<long>(i)) % static_cast<long>(N)) / static_cast<double>(N));
            acc /= static_cast<double>(N);
            if (N % 2 == 0 && static_cast<std::size_t>(std::abs(n)) * 2 == N) acc *= 0.5;
            c[n + K] = acc;
        }
        return c;
    }

    void check_finite() const {
        for (const auto& c : coeffs_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                fail(ErrorKind::usage, "boundary function has non-finite values");
    }

    ModelId model_ = ModelId::h2;
    std::vector<int> band_{0};
    CVector coeffs_{cplx{}};
    std::vector<std::size_t> grid_;
    CVector samples_;
};

}  // namespace poisson_bv
