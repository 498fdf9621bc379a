#pragma once

#include "nct/geometry.hpp"
#include "nct/rules.hpp"

#include <functional>
#include <span>
#include <vector>

namespace nct {

using DensityFn = std::function<double(std::span<const double>)>;

/// Input model: a Poisson process (constant intensity, or a bounded
/// density with a declared upper bound) together with the interaction
/// radius and the retention rule applied to neighbour counts at that
/// radius.
class Model {
public:
    static Model homogeneous(int dimension, double radius, double lambda, RetentionRule rule);
    static Model inhomogeneous(int dimension, double radius, DensityFn density,
                               double density_bound, RetentionRule rule);

    int dimension() const { return dimension_; }
    double radius() const { return radius_; }
    const RetentionRule& rule() const { return rule_; }

    bool is_homogeneous() const { return !density_; }
    double lambda() const; // homogeneous only
    const DensityFn& density() const { return density_; }
    double density_bound() const { return density_bound_; }
    double density_at(std::span<const double> x) const;

    /// Mean number of neighbours mu = lambda * v_d * r^d (homogeneous only).
    double mean_neighbours() const;

    Model with_rule(RetentionRule rule) const;
    Model with_radius(double radius) const;

private:
    Model(int dimension, double radius, double lambda, DensityFn density, double density_bound,
          RetentionRule rule);

    int dimension_;
    double radius_;
    double lambda_;
    DensityFn density_;
    double density_bound_;
    RetentionRule rule_;
};

/// Smallest n such that P{Poisson(t) > n} < tol, by incremental cdf
/// accumulation, capped at t + 40 sqrt(t) + 60.
int poisson_truncation(double t, double tol);

/// E[p(N + shift)] for N ~ Poisson(t), truncated once the accumulated
/// Poisson mass reaches 1 - tol (absolute error <= tol since p <= 1).
double shifted_poisson_mixture(const RetentionRule& rule, int shift, double t, double tol);

/// m_p(t) = E[p(N_t)].
double poisson_mixture(const RetentionRule& rule, double t, double tol = 1e-12);

/// m_+(t) = E[p(N_t + 1)].
double poisson_mixture_shifted(const RetentionRule& rule, double t, double tol = 1e-12);

/// E|p(N_t) - m_p(t)|, the coupling discrepancy per point.
double mean_abs_dev(const RetentionRule& rule, double t, double tol = 1e-12);

/// Intensity of the thinned process for homogeneous input: lambda * m_p(mu).
double intensity_homogeneous(const Model& model, double tol = 1e-12);

/// mu_x(r) = integral of the density over B(x, r), by iterated adaptive
/// quadrature with exact chord limits in each dimension.
double local_mass(const Model& model, std::span<const double> x, double rel_tol = 1e-8);

/// Intensity density of the thinned process at x: lambda(x) * m_p(mu_x(r)).
double intensity_at(const Model& model, std::span<const double> x, double quad_tol = 1e-8);

struct IntensityExpansion {
    double partial_sum;     // lambda(x) * sum_{k<=K} mu^k d^k p(0) / k!
    double remainder_bound; // C_K * lambda_bound * mu^{K+1}
    double local_mean;      // the mu_x(r) used
};

/// Truncated finite-difference expansion of the thinned intensity with
/// its explicit remainder bound, C_K = 2^{K+1} e^{2 mu} / (K+1)!.
IntensityExpansion intensity_expansion(const Model& model, std::span<const double> x, int order,
                                       double quad_tol = 1e-8);
/// Homogeneous shorthand (no location argument needed).
IntensityExpansion intensity_expansion(const Model& model, int order);

/// One draw from the directing measure of a Cox model, evaluated at a
/// fixed location: the random density value and the random ball mass.
struct CoxSample {
    double lambda_at_x;
    double ball_mass;
};

struct CoxIntensity {
    double mc_estimate;
    double std_error;
    double expansion_value;              // sum of expansion_terms
    std::vector<double> expansion_terms; // d^k p(0)/k! * E-hat[lambda M^k]
};

/// Monte Carlo intensity for Cox input from caller-supplied samples of
/// (lambda(x), M_x(r)), with the optional finite-difference moment
/// expansion over the same samples.
CoxIntensity intensity_cox(const RetentionRule& rule, std::span<const CoxSample> samples,
                           int expansion_order, double tol = 1e-12);

/// Conditional moments of the pair-correlation decomposition at relative
/// distance t = ||h|| / r: conditioning on the shared count U leaves
/// g_I(U)^2, with g_I(k) = E[p(k + I + V)].
struct PairMoments {
    int indicator;        // 1{t <= 1}
    double overlap;       // omega_d(t)
    double m_p;           // E[p(N_mu)]
    double mean;          // E[g_I(U)]   (= m_p for t > 1, m_+ for t <= 1)
    double second_moment; // E[g_I(U)^2]
    double variance;      // second_moment - mean^2
};

PairMoments pair_moments(const Model& model, double t, double tol = 1e-12);

/// Exact radial pair correlation of the thinned process at distance t*r,
/// via the conditional decomposition. Exactly 1 for t > 2.
double g_exact(const Model& model, double t, double tol = 1e-12);

/// Reference evaluator: the raw triple series over the three independent
/// Poisson counts of the two-ball diagram. Cubic cost; kept as an
/// independent cross-check for g_exact.
double g_oracle_triple_sum(const Model& model, double t, double tail_tol = 1e-12);

struct GExpansion {
    double value;
    bool valid; // contact-scale hypothesis mu <= p(0)/4
};

/// First-order contact-scale expansion, valid for rules with
/// p(0), p(1) > 0. The flag records whether mu <= p(0)/4 holds.
GExpansion g_expansion_generic(const Model& model, double t);

/// Leading contact-scale behaviour for rules with p(0) = 0 < p(1):
/// omega_d(t)/mu on the ring, mu^{-2}{1 + mu[s + omega (1-s)^2]} at contact.
double g_expansion_p0zero(const Model& model, double t);

/// Tabulated radial pair-correlation curve.
struct GCurve {
    std::vector<double> t_grid;
    std::vector<double> values;
};

/// Vectorized g_exact over a sorted grid, parallel across grid points
/// with deterministic ordering.
GCurve g_curve(const Model& model, std::span<const double> t_grid, double tol = 1e-12,
               int threads = 0);

/// 400 uniform points on (0, 2.2] plus the jump probes t = 1 and
/// t = 1 + 1e-9.
std::vector<double> default_t_grid();

} // namespace nct
