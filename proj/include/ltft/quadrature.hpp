#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ltft {

/// 8-point Gauss-Legendre rule on [lo, hi].
template <typename F>
auto gauss_legendre(F&& f, double lo, double hi) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // 8 is even: abscissa()[0] is the first positive node, no centre node.
    auto acc = w[0] * (f(mid + half * x[0]) + f(mid - half * x[0]));
    for (std::size_t i = 1; i < x.size(); ++i) acc += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    return acc * half;
}

/// Composite 8-point Gauss-Legendre with `panels` equal panels.
template <typename F>
auto composite_gauss_legendre(F&& f, double lo, double hi, int panels) {
    const double width = (hi - lo) / panels;
    auto acc = gauss_legendre(f, lo, lo + width);
    for (int p = 1; p < panels; ++p) acc += gauss_legendre(f, lo + width * p, lo + width * (p + 1));
    return acc;
}

/// Nodes and weights of a composite Gauss-Legendre rule, for callers that need
/// to reuse the same quadrature points across many integrands.
struct QuadratureNodes {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureNodes composite_gauss_nodes(double lo, double hi, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    QuadratureNodes q;
    const double width = (hi - lo) / panels;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + width * (p + 0.5);
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            q.nodes.push_back(mid - half * x[i]);
            q.weights.push_back(w[i] * half);
            q.nodes.push_back(mid + half * x[i]);
            q.weights.push_back(w[i] * half);
        }
    }
    return q;
}

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
template <typename F>
double adaptive_integral(F&& f, double lo, double hi, double rel_tol = 1e-10, unsigned max_depth = 15) {
    if (hi == lo) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, max_depth, rel_tol,
                                                                         &error);
}

}  // namespace ltft
