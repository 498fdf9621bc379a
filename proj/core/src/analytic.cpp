#include "nct/analytic.hpp"

#include "nct/errors.hpp"
#include "nct/parallel.hpp"
#include "nct/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nct {

namespace {

constexpr double kTailFloor = 1e-15;
constexpr double kDenominatorFloor = 1e-300;

double effective_tail(double tol) {
    if (!(tol > 0.0) || tol > 1e-6)
        throw config_error("poisson mixture tolerance must lie in (0, 1e-6]");
    return std::max(tol, kTailFloor);
}

int hard_cap(double t) { return static_cast<int>(t + 40.0 * std::sqrt(t) + 60.0); }

} // namespace

Model::Model(int dimension, double radius, double lambda, DensityFn density, double density_bound,
             RetentionRule rule)
    : dimension_(dimension),
      radius_(radius),
      lambda_(lambda),
      density_(std::move(density)),
      density_bound_(density_bound),
      rule_(std::move(rule)) {
    if (dimension_ < 1) throw config_error("Model: dimension must be >= 1");
    if (!(radius_ > 0.0)) throw config_error("Model: radius must be > 0");
}

Model Model::homogeneous(int dimension, double radius, double lambda, RetentionRule rule) {
    if (!(lambda > 0.0)) throw config_error("Model: lambda must be > 0");
    return Model(dimension, radius, lambda, nullptr, lambda, std::move(rule));
}

Model Model::inhomogeneous(int dimension, double radius, DensityFn density, double density_bound,
                           RetentionRule rule) {
    if (!density) throw config_error("Model: density function missing");
    if (!(density_bound > 0.0) || !std::isfinite(density_bound))
        throw config_error("Model: density bound must be finite and > 0");
    return Model(dimension, radius, 0.0, std::move(density), density_bound, std::move(rule));
}

double Model::lambda() const {
    if (!is_homogeneous()) throw config_error("Model: lambda requested from inhomogeneous model");
    return lambda_;
}

double Model::density_at(std::span<const double> x) const {
    if (is_homogeneous()) return lambda_;
    const double value = density_(x);
    if (!(value >= 0.0) || value > density_bound_ * (1.0 + 1e-12))
        throw config_error("Model: density value outside [0, declared bound]");
    return value;
}

double Model::mean_neighbours() const {
    return lambda() * unit_ball_volume(dimension_) * std::pow(radius_, dimension_);
}

Model Model::with_rule(RetentionRule rule) const {
    Model copy = *this;
    copy.rule_ = std::move(rule);
    return copy;
}

Model Model::with_radius(double radius) const {
    if (!(radius > 0.0)) throw config_error("Model: radius must be > 0");
    Model copy = *this;
    copy.radius_ = radius;
    return copy;
}

int poisson_truncation(double t, double tol) {
    const double tail = effective_tail(tol);
    if (t <= 0.0) return 0;
    double pmf = std::exp(-t);
    double cdf = pmf;
    int n = 0;
    const int cap = hard_cap(t);
    while (1.0 - cdf >= tail && n < cap) {
        ++n;
        pmf *= t / n;
        cdf += pmf;
    }
    return n;
}

double shifted_poisson_mixture(const RetentionRule& rule, int shift, double t, double tol) {
    const double tail = effective_tail(tol);
    if (t < 0.0) throw config_error("poisson mixture: mean must be >= 0");
    if (t == 0.0) return rule(shift);
    double pmf = std::exp(-t);
    double cdf = pmf;
    double sum = rule(shift) * pmf;
    int n = 0;
    const int cap = hard_cap(t);
    while (1.0 - cdf >= tail && n < cap) {
        ++n;
        pmf *= t / n;
        cdf += pmf;
        sum += rule(n + shift) * pmf;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double poisson_mixture(const RetentionRule& rule, double t, double tol) {
    return shifted_poisson_mixture(rule, 0, t, tol);
}

double poisson_mixture_shifted(const RetentionRule& rule, double t, double tol) {
    return shifted_poisson_mixture(rule, 1, t, tol);
}

double mean_abs_dev(const RetentionRule& rule, double t, double tol) {
    const double tail = effective_tail(tol);
    if (t < 0.0) throw config_error("mean_abs_dev: mean must be >= 0");
    if (t == 0.0) return 0.0;
    // First pass: truncated mean, normalized by the accumulated mass so a
    // constant rule cancels exactly in the second pass.
    double pmf = std::exp(-t);
    double cdf = pmf;
    double mean = rule(0) * pmf;
    int n = 0;
    const int cap = hard_cap(t);
    while (1.0 - cdf >= tail && n < cap) {
        ++n;
        pmf *= t / n;
        cdf += pmf;
        mean += rule(n) * pmf;
    }
    const int truncation = n;
    const double m = cdf > 0.0 ? mean / cdf : rule(0);

    pmf = std::exp(-t);
    double sum = std::fabs(rule(0) - m) * pmf;
    for (n = 1; n <= truncation; ++n) {
        pmf *= t / n;
        sum += std::fabs(rule(n) - m) * pmf;
    }
    return sum;
}

double intensity_homogeneous(const Model& model, double tol) {
    return model.lambda() * poisson_mixture(model.rule(), model.mean_neighbours(), tol);
}

double local_mass(const Model& model, std::span<const double> x, double rel_tol) {
    const int d = model.dimension();
    if (static_cast<int>(x.size()) != d) throw config_error("local_mass: point dimension mismatch");
    const double r = model.radius();
    if (model.is_homogeneous())
        return model.lambda() * unit_ball_volume(d) * std::pow(r, d);

    // Scale for the absolute floor: the ball mass can never exceed this.
    const double mass_bound =
        model.density_bound() * unit_ball_volume(d) * std::pow(r, d);
    QuadratureOptions opts;
    opts.rel_tol = 0.5 * rel_tol;
    opts.abs_tol = 0.1 * rel_tol * mass_bound;
    opts.max_intervals = 2000;

    std::vector<double> y(x.begin(), x.end());
    // Integrate dimension k over the chord of the ball determined by the
    // already-fixed coordinates; radius2 is what remains of r^2.
    std::function<double(int, double)> level = [&](int k, double radius2) -> double {
        const double half_chord = std::sqrt(std::max(0.0, radius2));
        const auto integrand = [&](double u) -> double {
            y[k] = u;
            if (k == d - 1) return model.density_at(y);
            const double du = u - x[k];
            return level(k + 1, radius2 - du * du);
        };
        return integrate_or_throw(integrand, x[k] - half_chord, x[k] + half_chord, opts);
    };
    return level(0, r * r);
}

double intensity_at(const Model& model, std::span<const double> x, double quad_tol) {
    const double mass = local_mass(model, x, quad_tol);
    return model.density_at(x) * poisson_mixture(model.rule(), mass, 1e-12);
}

IntensityExpansion intensity_expansion(const Model& model, std::span<const double> x, int order,
                                       double quad_tol) {
    if (order < 0) throw config_error("intensity_expansion: order must be >= 0");
    const double mass = local_mass(model, x, quad_tol);
    const double lambda_x = model.density_at(x);
    const double lambda_bound = model.is_homogeneous() ? model.lambda() : model.density_bound();

    double sum = 0.0;
    double mass_power = 1.0;
    double factorial = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            mass_power *= mass;
            factorial *= k;
        }
        sum += model.rule().finite_difference(k) * mass_power / factorial;
    }
    const double c_k =
        std::pow(2.0, order + 1) * std::exp(2.0 * mass) / (factorial * (order + 1));
    IntensityExpansion out{};
    out.partial_sum = lambda_x * sum;
    out.remainder_bound = c_k * lambda_bound * std::pow(mass, order + 1);
    out.local_mean = mass;
    return out;
}

IntensityExpansion intensity_expansion(const Model& model, int order) {
    if (!model.is_homogeneous())
        throw config_error("intensity_expansion: homogeneous overload needs a location for "
                           "inhomogeneous models");
    return intensity_expansion(model, std::vector<double>(model.dimension(), 0.0), order, 1e-8);
}

CoxIntensity intensity_cox(const RetentionRule& rule, std::span<const CoxSample> samples,
                           int expansion_order, double tol) {
    if (samples.size() < 100) throw config_error("intensity_cox: need at least 100 samples");
    if (expansion_order < 0) throw config_error("intensity_cox: expansion order must be >= 0");

    const double n = static_cast<double>(samples.size());
    std::vector<double> values;
    values.reserve(samples.size());
    for (const CoxSample& s : samples) {
        if (!std::isfinite(s.lambda_at_x) || !std::isfinite(s.ball_mass) || s.lambda_at_x < 0.0 ||
            s.ball_mass < 0.0)
            throw config_error("intensity_cox: non-finite or negative sample rejected");
        values.push_back(s.lambda_at_x * poisson_mixture(rule, s.ball_mass, tol));
    }
    CoxIntensity out{};
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mc_estimate = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - out.mc_estimate) * (v - out.mc_estimate);
    out.std_error = std::sqrt(sq / std::max(1.0, n - 1.0) / n);

    double factorial = 1.0;
    for (int k = 0; k <= expansion_order; ++k) {
        if (k > 0) factorial *= k;
        double moment = 0.0;
        for (const CoxSample& s : samples)
            moment += s.lambda_at_x * std::pow(s.ball_mass, k);
        moment /= n;
        out.expansion_terms.push_back(rule.finite_difference(k) / factorial * moment);
    }
    out.expansion_value = 0.0;
    for (double term : out.expansion_terms) out.expansion_value += term;
    return out;
}

PairMoments pair_moments(const Model& model, double t, double tol) {
    if (!(t >= 0.0)) throw config_error("pair_moments: t must be >= 0");
    const double mu = model.mean_neighbours();
    const OverlapKernel omega(model.dimension());
    const double overlap = omega(std::min(t, 2.0));
    const int indicator = t <= 1.0 ? 1 : 0;
    const double theta_shared = mu * overlap;
    const double theta_private = mu * (1.0 - overlap);
    const RetentionRule& rule = model.rule();

    const double m_p = poisson_mixture(rule, mu, tol);
    if (m_p < kDenominatorFloor)
        throw degenerate_denominator("pair_moments: E[p(N)] underflowed; pair correlation "
                                     "ratio is not representable");

    PairMoments out{};
    out.indicator = indicator;
    out.overlap = overlap;
    out.m_p = m_p;

    // Condition on the shared count U: the two retentions decouple into
    // g_I(U)^2 with g_I(k) = E[p(k + I + V)], V ~ Poisson(theta_private).
    const int cap_shared = poisson_truncation(theta_shared, tol);
    double pmf = std::exp(-theta_shared);
    double mean = 0.0, second = 0.0;
    for (int u = 0; u <= cap_shared; ++u) {
        if (u > 0) pmf *= theta_shared / u;
        const double g_u = shifted_poisson_mixture(rule, u + indicator, theta_private, tol);
        mean += g_u * pmf;
        second += g_u * g_u * pmf;
    }
    out.mean = mean;
    out.second_moment = second;
    out.variance = std::max(0.0, second - mean * mean);
    return out;
}

double g_exact(const Model& model, double t, double tol) {
    if (!(t > 0.0)) throw config_error("g_exact: t must be > 0");
    if (t > 2.0) return 1.0;
    const PairMoments m = pair_moments(model, t, tol);
    return m.second_moment / (m.m_p * m.m_p);
}

double g_oracle_triple_sum(const Model& model, double t, double tail_tol) {
    if (!(t > 0.0)) throw config_error("g_oracle_triple_sum: t must be > 0");
    if (t > 2.0) return 1.0;
    const double mu = model.mean_neighbours();
    const OverlapKernel omega(model.dimension());
    const double shared_mean = mu * omega(t);
    const double private_mean = mu * (1.0 - omega(t));
    const int add = t <= 1.0 ? 1 : 0;
    const RetentionRule& rule = model.rule();

    const auto pmf_table = [&](double mean) {
        const int cap = poisson_truncation(mean, tail_tol);
        std::vector<double> w(cap + 1);
        w[0] = std::exp(-mean);
        for (int n = 1; n <= cap; ++n) w[n] = w[n - 1] * mean / n;
        return w;
    };
    const std::vector<double> wa = pmf_table(private_mean);
    const std::vector<double> wb = pmf_table(private_mean);
    const std::vector<double> wc = pmf_table(shared_mean);

    double numerator = 0.0;
    for (std::size_t k = 0; k < wc.size(); ++k) {
        for (std::size_t i = 0; i < wa.size(); ++i) {
            const double left = rule(static_cast<int>(i + k) + add) * wa[i];
            for (std::size_t j = 0; j < wb.size(); ++j)
                numerator += left * rule(static_cast<int>(j + k) + add) * wb[j] * wc[k];
        }
    }
    const double m_p = poisson_mixture(rule, mu, tail_tol);
    if (m_p < kDenominatorFloor)
        throw degenerate_denominator("g_oracle_triple_sum: E[p(N)] underflowed");
    return numerator / (m_p * m_p);
}

GExpansion g_expansion_generic(const Model& model, double t) {
    const RetentionRule& p = model.rule();
    if (!(p(0) > 0.0) || !(p(1) > 0.0))
        throw unsupported_rule("g_expansion_generic requires p(0) > 0 and p(1) > 0");
    if (!(t > 0.0)) throw config_error("g_expansion_generic: t must be > 0");
    const double mu = model.mean_neighbours();
    const OverlapKernel omega(model.dimension());
    const double w = t >= 2.0 ? 0.0 : omega(t);
    const int indicator = t <= 1.0 ? 1 : 0;

    const double head = p(indicator) / p(0);
    const double step = p(indicator + 1) / p(indicator);
    const double bracket =
        w * (1.0 - step) * (1.0 - step) + 2.0 * indicator * (step - p(1) / p(0));
    GExpansion out{};
    out.value = head * head * (1.0 + mu * bracket);
    out.valid = mu <= p(0) / 4.0;
    return out;
}

double g_expansion_p0zero(const Model& model, double t) {
    const RetentionRule& p = model.rule();
    if (p(0) != 0.0 || !(p(1) > 0.0))
        throw unsupported_rule("g_expansion_p0zero requires p(0) = 0 and p(1) > 0");
    if (!(t > 0.0)) throw config_error("g_expansion_p0zero: t must be > 0");
    const double mu = model.mean_neighbours();
    const OverlapKernel omega(model.dimension());
    const double w = t >= 2.0 ? 0.0 : omega(t);
    if (t > 1.0) return w / mu;
    const double s = p(2) / p(1);
    return (1.0 + mu * (s + w * (1.0 - s) * (1.0 - s))) / (mu * mu);
}

GCurve g_curve(const Model& model, std::span<const double> t_grid, double tol, int threads) {
    GCurve curve;
    curve.t_grid.assign(t_grid.begin(), t_grid.end());
    curve.values.assign(t_grid.size(), 0.0);
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        curve.values[i] = g_exact(model, curve.t_grid[i], tol);
    });
    return curve;
}

std::vector<double> default_t_grid() {
    std::vector<double> grid;
    grid.reserve(402);
    for (int k = 1; k <= 400; ++k) grid.push_back(2.2 * (k / 400.0));
    grid.push_back(1.0);
    grid.push_back(1.0 + 1e-9);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

} // namespace nct
