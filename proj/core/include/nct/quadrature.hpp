#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace nct {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals_used = 0;
    bool converged = false;
};

/// One Gauss(7)/Kronrod(15) panel on [a, b]. Returns the K15 value and
/// writes the |G7 - K15| based error estimate.
double gauss_kronrod_panel(const std::function<double(double)>& f, double a, double b,
                           double& error_estimate);

/// Adaptive Gauss-Kronrod on [a, b]: worst-interval bisection until the
/// summed error estimate meets rel_tol * |integral| or abs_tol.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// As integrate_adaptive, but throws numeric_failure (carrying the last
/// estimate) instead of returning an unconverged result.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
struct GaussLegendreRule {
    explicit GaussLegendreRule(int n);
    double integrate(const std::function<double(double)>& f, double a, double b) const;

    std::vector<double> nodes;
    std::vector<double> weights;
};

} // namespace nct
