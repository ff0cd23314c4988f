#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "types.hpp"

namespace poisson_bv::quad {

struct Rule {
    RVector nodes;    // on [-1, 1]
    RVector weights;
};

/// n-point Gauss–Legendre rule by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
    Rule r{RVector(n), RVector(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const Rule& gauss_legendre_20() {
    static const Rule r = gauss_legendre(20);
    return r;
}

template <class F>
cplx fixed(F&& f, double a, double b, const Rule& rule) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(c + h * rule.nodes[i]);
    return acc * h;
}

struct Result {
    cplx value;
    double error = 0.0;
    long panels = 0;
};

/// Adaptive bisection with a 20-point Gauss–Legendre rule on each panel; a panel
/// is accepted when its value agrees with the sum over its halves to
/// max(abs_tol, rel_tol·|panel|)·(panel width share).
template <class F>
Result adaptive(F&& f, double a, double b, double abs_tol, double rel_tol, int max_depth = 60) {
    const Rule& rule = gauss_legendre_20();
    Result res{0.0, 0.0, 0};
    struct Panel {
        double a, b;
        cplx whole;
        int depth;
    };
    std::vector<Panel> stack{{a, b, fixed(f, a, b, rule), 0}};
    const double width = b - a;
    bool failed = false;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const cplx left = fixed(f, p.a, m, rule), right = fixed(f, m, p.b, rule);
        const cplx refined = left + right;
        const double err = std::abs(refined - p.whole);
        const double share = (p.b - p.a) / width;
        const double allowed = std::max(abs_tol * share, rel_tol * std::abs(refined));
        if (err <= allowed || p.depth >= max_depth) {
            if (err > allowed) failed = true;
            res.value += refined;
            res.error += err;
            ++res.panels;
            continue;
        }
        stack.push_back({m, p.b, right, p.depth + 1});
        stack.push_back({p.a, m, left, p.depth + 1});
    }
    if (failed && res.error > std::max(abs_tol, rel_tol * std::abs(res.value)) * 10.0)
        fail(ErrorKind::numerical, "adaptive quadrature did not converge");
    return res;
}

/// ∫_a^b f for f with an algebraic endpoint singularity at a: dyadic panels
/// graded toward a, each integrated adaptively, until the geometric tail
/// estimate falls below rel_tol·|total|.
template <class F>
Result graded(F&& f, double a, double b, double abs_tol, double rel_tol, int max_panels = 2000) {
    Result res{0.0, 0.0, 0};
    const double h = b - a;
    double hi = 1.0;
    double prev = 0.0;
    for (int k = 0; k < max_panels; ++k) {
        const double lo = 0.5 * hi;
        const Result p = adaptive(f, a + lo * h, a + hi * h, abs_tol * lo, rel_tol);
        res.value += p.value;
        res.error += p.error;
        res.panels += p.panels;
        const double cur = std::abs(p.value);
        if (k >= 4 && prev > 0.0) {
            const double ratio = cur / prev;
            if (ratio < 1.0 && cur * ratio / (1.0 - ratio) <= std::max(abs_tol, rel_tol * std::abs(res.value)))
                return res;
        }
        if (k >= 4 && cur == 0.0 && prev == 0.0) return res;
        prev = cur;
        hi = lo;
    }
    fail(ErrorKind::numerical, "graded quadrature: endpoint tail did not decay");
}

}  // namespace poisson_bv::quad
