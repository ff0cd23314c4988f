#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "polynomial.hpp"
#include "types.hpp"

namespace poisson_bv {

enum class ModelId { h2, h3, h2xh2 };

inline std::string_view to_string(ModelId id) {
    switch (id) {
        case ModelId::h2: return "h2";
        case ModelId::h3: return "h3";
        case ModelId::h2xh2: return "h2xh2";
    }
    return "?";
}

inline ModelId parse_model(std::string_view s) {
    if (s == "h2") return ModelId::h2;
    if (s == "h3") return ModelId::h3;
    if (s == "h2xh2") return ModelId::h2xh2;
    fail(ErrorKind::usage, "unknown model id '" + std::string(s) + "'");
}

/// Restricted root data of one of the supported models, in the basis H_j
/// dual to the simple roots.
struct RootDatum {
    ModelId model;
    int rank = 0;
    std::vector<std::string> simple_roots;
    std::vector<std::pair<int, int>> multiplicities;  // (m_α, m_2α) per simple root
    CVector rho;                                      // ρ_j = ρ(H_j)
    std::vector<Eigen::MatrixXi> weyl_elements;       // action on H-coordinates
    std::vector<std::string> weyl_labels;
    std::vector<std::vector<std::size_t>> wall_stabilizers;

    std::size_t weyl_order() const { return weyl_elements.size(); }

    /// m_j = |W| / |W_j|.
    int wall_degree(int j) const {
        return static_cast<int>(weyl_elements.size() / wall_stabilizers.at(j).size());
    }

    /// Index of the inverse of element w.
    std::size_t inverse_of(std::size_t w) const {
        const Eigen::MatrixXi id = Eigen::MatrixXi::Identity(rank, rank);
        for (std::size_t v = 0; v < weyl_elements.size(); ++v)
            if (weyl_elements[w] * weyl_elements[v] == id) return v;
        fail(ErrorKind::precondition, "Weyl element list is not closed under inverses");
    }

    /// (w·λ)(H_j) for every j.
    CVector act(std::size_t w, const SpectralParameter& lam) const {
        const Eigen::MatrixXi& inv = weyl_elements[inverse_of(w)];
        CVector out(rank, cplx{});
        for (int j = 0; j < rank; ++j)
            for (int k = 0; k < rank; ++k) out[j] += static_cast<double>(inv(k, j)) * lam.lambda[k];
        return out;
    }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> stabilizers(const std::vector<Eigen::MatrixXi>& ws, int rank) {
    std::vector<std::vector<std::size_t>> out(rank);
    for (int j = 0; j < rank; ++j) {
        Eigen::VectorXi e = Eigen::VectorXi::Zero(rank);
        e(j) = 1;
        for (std::size_t w = 0; w < ws.size(); ++w)
            if (ws[w].col(j) == e) out[j].push_back(w);
    }
    return out;
}

inline void check_rank(const RootDatum& rd, const SpectralParameter& lam) {
    if (static_cast<int>(lam.rank()) != rd.rank)
        fail(ErrorKind::usage, "spectral parameter has " + std::to_string(lam.rank()) +
                                   " components, model rank is " + std::to_string(rd.rank));
    for (const auto& c : lam.lambda)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            fail(ErrorKind::usage, "spectral parameter must be finite");
}

}  // namespace detail

inline RootDatum build_root_datum(ModelId id) {
    RootDatum rd;
    rd.model = id;
    switch (id) {
        case ModelId::h2:
        case ModelId::h3: {
            const int m = id == ModelId::h2 ? 1 : 2;
            rd.rank = 1;
            rd.simple_roots = {"alpha"};
            rd.multiplicities = {{m, 0}};
            rd.rho = {cplx(0.5 * m)};
            Eigen::MatrixXi e(1, 1), s(1, 1);
            e << 1;
            s << -1;
            rd.weyl_elements = {e, s};
            rd.weyl_labels = {"1", "-1"};
            break;
        }
        case ModelId::h2xh2: {
            rd.rank = 2;
            rd.simple_roots = {"alpha1", "alpha2"};
            rd.multiplicities = {{1, 0}, {1, 0}};
            rd.rho = {cplx(0.5), cplx(0.5)};
            for (int a : {1, -1})
                for (int b : {1, -1}) {
                    Eigen::MatrixXi w = Eigen::MatrixXi::Zero(2, 2);
                    w(0, 0) = a;
                    w(1, 1) = b;
                    rd.weyl_elements.push_back(w);
                    rd.weyl_labels.push_back("(" + std::to_string(a) + "," + std::to_string(b) + ")");
                }
            break;
        }
    }
    rd.wall_stabilizers = detail::stabilizers(rd.weyl_elements, rd.rank);
    return rd;
}

struct OrbitPoint {
    CVector value;
    long duplicate_of = -1;  // index of an earlier element with the same image, or -1
};

/// {w·λ : w ∈ W}, indexed like rd.weyl_elements. Repeated images are kept and flagged.
inline std::vector<OrbitPoint> weyl_orbit(const RootDatum& rd, const SpectralParameter& lam) {
    detail::check_rank(rd, lam);
    std::vector<OrbitPoint> out;
    for (std::size_t w = 0; w < rd.weyl_order(); ++w) {
        OrbitPoint p{rd.act(w, lam), -1};
        for (std::size_t v = 0; v < out.size(); ++v)
            if (out[v].value == p.value) {
                p.duplicate_of = static_cast<long>(v);
                break;
            }
        out.push_back(std::move(p));
    }
    return out;
}

/// {ρ − w·λ : w ∈ W}, indexed like rd.weyl_elements.
inline std::vector<CVector> characteristic_exponents(const RootDatum& rd, const SpectralParameter& lam) {
    detail::check_rank(rd, lam);
    std::vector<CVector> out;
    for (std::size_t w = 0; w < rd.weyl_order(); ++w) {
        CVector wl = rd.act(w, lam);
        for (int j = 0; j < rd.rank; ++j) wl[j] = rd.rho[j] - wl[j];
        out.push_back(std::move(wl));
    }
    return out;
}

/// Orbit of H_j under W as integer coordinate vectors, first-occurrence order
/// over the Weyl element list (one vector per coset).
inline std::vector<Eigen::VectorXi> wall_orbit(const RootDatum& rd, int j) {
    std::vector<Eigen::VectorXi> orbit;
    for (std::size_t w = 0; w < rd.weyl_order(); ++w) {
        Eigen::VectorXi v = rd.weyl_elements[rd.inverse_of(w)].col(j);
        bool seen = false;
        for (const auto& o : orbit) seen = seen || o == v;
        if (!seen) orbit.push_back(v);
    }
    return orbit;
}

namespace detail {

inline cplx pair(const SpectralParameter& lam, const Eigen::VectorXi& v) {
    cplx s = 0.0;
    for (int k = 0; k < v.size(); ++k)
        if (v(k) != 0) s += static_cast<double>(v(k)) * lam.lambda[k];
    return s;
}

}  // namespace detail

/// p_{j,λ}(s) = Π_{[w] ∈ W/W_j} (s − (ρ − w·λ)(H_j)); j is 0-based.
inline MonicPolynomial wall_indicial_polynomial(const RootDatum& rd, const SpectralParameter& lam, int j) {
    detail::check_rank(rd, lam);
    if (j < 0 || j >= rd.rank) fail(ErrorKind::usage, "wall index out of range");
    CVector roots;
    for (const auto& v : wall_orbit(rd, j)) roots.push_back(rd.rho[j] - detail::pair(lam, v));
    return MonicPolynomial::from_roots(roots);
}

/// p(λ) = Π_j p'_{j,λ}(σ_j), σ = ρ − λ, differentiating the product form
/// term by term. Root differences are formed as λ(v) − λ_j so that exact
/// coincidences give exact zeros.
inline cplx genericity_value(const RootDatum& rd, const SpectralParameter& lam) {
    detail::check_rank(rd, lam);
    cplx total = 1.0;
    for (int j = 0; j < rd.rank; ++j) {
        const auto orbit = wall_orbit(rd, j);
        CVector diffs;
        for (const auto& v : orbit) diffs.push_back(detail::pair(lam, v) - lam.lambda[j]);
        cplx deriv = 0.0;
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            cplx term = 1.0;
            for (std::size_t k = 0; k < diffs.size(); ++k)
                if (k != i) term *= diffs[k];
            deriv += term;
        }
        total *= deriv;
    }
    return total;
}

inline constexpr double kIntegerTolerance = 1e-9;
inline constexpr double kIntegerWarning = 1e-6;

struct GenericityViolation {
    int wall;  // 1-based
    std::string weyl_label;
    std::string condition;  // "i" or "ii"
    cplx value;      // λ(H_j − w·H_j)
};

struct GenericityReport {
    bool cond_i = true;
    bool cond_ii = true;
    bool p_nonzero = true;
    cplx p_value;
    std::vector<GenericityViolation> violations;
    std::vector<std::string> warnings;

    bool ok() const { return cond_i && cond_ii && p_nonzero; }
};

/// Distance from x to the nearest negative integer, or +inf when x is not close
/// to the negative real axis.
inline double negative_integer_distance(cplx x) {
    if (x.real() > -0.5) return std::numeric_limits<double>::infinity();
    const double n = std::round(x.real());
    return std::max(std::abs(x.real() - n), std::abs(x.imag()));
}

inline GenericityReport genericity_check(const RootDatum& rd, const SpectralParameter& lam) {
    detail::check_rank(rd, lam);
    GenericityReport rep;
    for (int j = 0; j < rd.rank; ++j) {
        for (std::size_t w = 0; w < rd.weyl_order(); ++w) {
            const Eigen::VectorXi wh = rd.weyl_elements[w].col(j);
            Eigen::VectorXi diff = -wh;
            diff(j) += 1;
            const cplx x = detail::pair(lam, diff);
            const bool stabilizes = diff.isZero();
            if (!stabilizes && std::abs(x) <= kIntegerTolerance) {
                rep.cond_i = false;
                rep.violations.push_back({j + 1, rd.weyl_labels[w], "i", x});
            }
            const double d = negative_integer_distance(x);
            if (d <= kIntegerTolerance) {
                rep.cond_ii = false;
                rep.violations.push_back({j + 1, rd.weyl_labels[w], "ii", x});
            } else if (d <= kIntegerWarning) {
                rep.warnings.push_back("lambda(H_" + std::to_string(j + 1) + " - w.H_" + std::to_string(j + 1) +
                                       ") is within 1e-6 of a negative integer for w=" + rd.weyl_labels[w]);
            }
        }
    }
    rep.p_value = genericity_value(rd, lam);
    rep.p_nonzero = rep.p_value != cplx{};
    return rep;
}

/// Throws GenericityError naming the first violated (j, w) pair.
inline void require_generic(const RootDatum& rd, const SpectralParameter& lam) {
    const auto rep = genericity_check(rd, lam);
    if (!rep.violations.empty()) {
        const auto& v = rep.violations.front();
        throw GenericityError("spectral parameter violates genericity condition (" +
                                  v.condition + ") at j=" +
                                  std::to_string(v.wall) + ", w=" + v.weyl_label,
                              v.wall, v.weyl_label);
    }
    if (!rep.p_nonzero) throw GenericityError("p(lambda) vanishes", 0, "");
}

}  // namespace poisson_bv
