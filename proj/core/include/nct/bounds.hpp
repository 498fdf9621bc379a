#pragma once

#include "nct/analytic.hpp"
#include "nct/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace nct {

enum class BoundRoute {
    CouplingTV,
    Laplace,
    SteinGeneral,
    SteinLower,
    SteinSmallR,
    SteinModerateR,
};

const char* route_name(BoundRoute route);

/// The universal constants the theory leaves unspecified. Every report
/// lists the values it used; defaults are 1 so totals stay honest about
/// what is actually proved.
struct BoundConstants {
    double stein_C_d = 1.0;      // correlation-integral coefficient (upper bounds)
    double laplace_C_d = 1.0;    // Laplace-functional coefficient
    double laplace_c_d = 1.0;    // validity threshold lambda r^d <= c_d
    double lower_c_d = 1.0;      // lower-bound correlation coefficient
    double lower_Cprime_d = 1.0; // lower-bound perimeter coefficient
};

struct HypothesisCheck {
    std::string description;
    bool satisfied = true;
};

/// Structured record of one Poisson-approximation bound: the named term
/// contributions, their documented combination in `total`, the configured
/// constants that entered, and any hypothesis checks. `applicable` is
/// false when the route is undefined for the rule (total is then NaN).
struct BoundReport {
    BoundRoute route = BoundRoute::CouplingTV;
    std::map<std::string, double> terms;
    double total = 0.0;
    std::map<std::string, double> constants_used;
    std::vector<HypothesisCheck> validity_notes;
    bool applicable = true;
};

/// Total-variation coupling bound lambda |W| E|p(N) - m_p|, with the
/// small-mu Lipschitz relaxation 2 L lambda |W| mu reported alongside.
BoundReport bound_coupling_tv(const Model& model, const Window& window, double tol = 1e-12);

/// Inhomogeneous version: integral over W of
/// lambda(x) E|p(Pois(mu_x(r))) - m_p(mu_x(r))| dx by nested quadrature.
BoundReport bound_coupling_tv_inhomog(const Model& model, const Window& window,
                                      double quad_tol = 1e-6);

/// Laplace-functional discrepancy shape C_d lambda^2 ||g||_inf |W| (2r)^d,
/// with the validity check lambda r^d <= c_d recorded.
BoundReport bound_laplace(const Model& model, const Window& window, double g_sup,
                          const BoundConstants& constants = {});

/// Pieces of the short-range correlation integral over ||h|| <= 2r.
struct CorrelationIntegral {
    double total;   // S_{d-1} r^d * int_0^2 t^{d-1} |g(t) - 1| dt
    double contact; // contribution from t in (0, 1]
    double ring;    // contribution from t in (1, 2]
};

/// Adaptive quadrature of |g - 1|, split at the jump t = 1.
CorrelationIntegral correlation_integral(const Model& model, double quad_tol = 1e-8);

/// Stein upper bound lambda'^2 |W| [C_d * integral + v_d (2r)^d].
BoundReport bound_stein_general(const Model& model, const Window& window, double quad_tol = 1e-8,
                                const BoundConstants& constants = {});

/// Structural lower bound max(0, c_d lambda'^2 integral
///                              - C'_d lambda'^2 Per(W) r).
BoundReport bound_stein_lower(const Model& model, const Window& window, double quad_tol = 1e-8,
                              const BoundConstants& constants = {});

/// Small-radius explicit rate. Case (a) needs p(0), p(1) > 0; case (b)
/// needs p(0) = 0 < p(1); anything else throws unsupported_rule.
BoundReport bound_stein_smallr(const Model& model, const Window& window,
                               const BoundConstants& constants = {});

/// Moderate-radius bound with the Lipschitz surrogate for the correlation
/// integral (Poincare route); valid uniformly in mu.
BoundReport bound_stein_moderate(const Model& model, const Window& window,
                                 const BoundConstants& constants = {});

/// Pointwise upper bound on |g(t) - 1|:
/// mu omega_d(t) ||dp||^2 / m_p^2 + 1{t<=1} |m_+^2/m_p^2 - 1|.
double pointwise_g_bound(const Model& model, double t, double tol = 1e-12);

/// Rule-by-route comparison table: the model's own rule plus the four
/// showcase rules (flat on {0,1,2}, Matern-type, soft logistic, parity).
struct RouteComparison {
    std::vector<std::string> rule_names;
    std::vector<BoundRoute> routes;
    // reports[i][j]: rule i, route j.
    std::vector<std::vector<BoundReport>> reports;
};

RouteComparison compare_routes(const Model& model, const Window& window,
                               const BoundConstants& constants = {}, double g_sup = 1.0,
                               double quad_tol = 1e-8, int threads = 0);

} // namespace nct
