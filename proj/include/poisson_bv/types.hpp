#pragma once

#include <complex>
#include <vector>

namespace poisson_bv {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Spectral parameter λ in the simple-root coordinates, λ_j = λ(H_j).
struct SpectralParameter {
    CVector lambda;

    std::size_t rank() const { return lambda.size(); }
    const cplx& operator[](std::size_t j) const { return lambda[j]; }
};

}  // namespace poisson_bv
