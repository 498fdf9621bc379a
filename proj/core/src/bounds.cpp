#include "nct/bounds.hpp"

#include "nct/errors.hpp"
#include "nct/parallel.hpp"
#include "nct/quadrature.hpp"

#include <cmath>
#include <limits>

namespace nct {

namespace {

constexpr double kDenominatorFloor = 1e-300;

double geometry_remainder(const Model& model) {
    return unit_ball_volume(model.dimension()) *
           std::pow(2.0 * model.radius(), model.dimension());
}

BoundReport not_applicable(BoundRoute route, const std::string& why) {
    BoundReport report;
    report.route = route;
    report.applicable = false;
    report.total = std::numeric_limits<double>::quiet_NaN();
    report.validity_notes.push_back({why, false});
    return report;
}

} // namespace

const char* route_name(BoundRoute route) {
    switch (route) {
        case BoundRoute::CouplingTV: return "CouplingTV";
        case BoundRoute::Laplace: return "Laplace";
        case BoundRoute::SteinGeneral: return "SteinGeneral";
        case BoundRoute::SteinLower: return "SteinLower";
        case BoundRoute::SteinSmallR: return "SteinSmallR";
        case BoundRoute::SteinModerateR: return "SteinModerateR";
    }
    return "unknown";
}

BoundReport bound_coupling_tv(const Model& model, const Window& window, double tol) {
    const double mu = model.mean_neighbours();
    const double delta1 = mean_abs_dev(model.rule(), mu, tol);
    const double lambda_volume = model.lambda() * window.volume();
    const double lipschitz =
        model.rule().lipschitz_modulus(poisson_truncation(mu, 1e-15) + 2);

    BoundReport report;
    report.route = BoundRoute::CouplingTV;
    report.terms["delta1"] = delta1;
    report.terms["lambda_volume"] = lambda_volume;
    report.terms["lipschitz_modulus"] = lipschitz;
    report.terms["small_mu_form"] = 2.0 * lipschitz * lambda_volume * mu;
    report.total = lambda_volume * delta1;
    return report;
}

BoundReport bound_coupling_tv_inhomog(const Model& model, const Window& window, double quad_tol) {
    if (model.dimension() != window.dimension())
        throw config_error("bound_coupling_tv_inhomog: model/window dimension mismatch");
    const int d = model.dimension();

    // Iterated adaptive quadrature of
    //   lambda(x) E|p(Pois(mu_x(r))) - m_p(mu_x(r))|  over the box W.
    const double scale = model.density_bound() * window.volume();
    QuadratureOptions opts;
    opts.rel_tol = 0.5 * quad_tol;
    opts.abs_tol = 0.1 * quad_tol * std::max(scale, 1e-30);
    opts.max_intervals = 1000;

    std::vector<double> x(d);
    std::function<double(int)> level = [&](int k) -> double {
        const auto integrand = [&](double u) -> double {
            x[k] = u;
            if (k == d - 1) {
                const double lambda_x = model.density_at(x);
                if (lambda_x == 0.0) return 0.0;
                const double mass = local_mass(model, x, quad_tol);
                return lambda_x * mean_abs_dev(model.rule(), mass, 1e-12);
            }
            return level(k + 1);
        };
        return integrate_or_throw(integrand, window.lower(k), window.upper(k), opts);
    };
    const double integral = model.is_homogeneous()
                                ? window.volume() * model.lambda() *
                                      mean_abs_dev(model.rule(), model.mean_neighbours(), 1e-12)
                                : level(0);

    BoundReport report;
    report.route = BoundRoute::CouplingTV;
    report.terms["integrated_discrepancy"] = integral;
    report.total = integral;
    return report;
}

BoundReport bound_laplace(const Model& model, const Window& window, double g_sup,
                          const BoundConstants& constants) {
    if (!(g_sup >= 0.0)) throw config_error("bound_laplace: ||g||_inf must be >= 0");
    const double lambda = model.lambda();
    const double r = model.radius();
    const int d = model.dimension();

    BoundReport report;
    report.route = BoundRoute::Laplace;
    report.constants_used["C_d"] = constants.laplace_C_d;
    report.constants_used["c_d"] = constants.laplace_c_d;
    const double range_volume = std::pow(2.0 * r, d);
    report.terms["g_sup"] = g_sup;
    report.terms["lambda_sq_volume"] = lambda * lambda * window.volume();
    report.terms["range_volume"] = range_volume;
    report.total = constants.laplace_C_d * lambda * lambda * g_sup * window.volume() *
                   range_volume;
    const bool in_regime = lambda * std::pow(r, d) <= constants.laplace_c_d;
    report.validity_notes.push_back(
        {"lambda r^d <= c_d (dilute regime for the cumulant series)", in_regime});
    return report;
}

CorrelationIntegral correlation_integral(const Model& model, double quad_tol) {
    const int d = model.dimension();
    const double r = model.radius();

    QuadratureOptions opts;
    opts.rel_tol = quad_tol;
    opts.abs_tol = quad_tol * 1e-3;
    const auto deviation = [&](double t) {
        return std::pow(t, d - 1) * std::fabs(g_exact(model, t, 1e-12) - 1.0);
    };
    // |g - 1| jumps at t = 1 (mutual-inclusion indicator), so integrate
    // the two pieces separately.
    const double contact = integrate_or_throw(deviation, 0.0, 1.0, opts);
    const double ring = integrate_or_throw(deviation, 1.0, 2.0, opts);

    const double shell = unit_sphere_area(d) * std::pow(r, d);
    CorrelationIntegral out{};
    out.contact = shell * contact;
    out.ring = shell * ring;
    out.total = out.contact + out.ring;
    return out;
}

BoundReport bound_stein_general(const Model& model, const Window& window, double quad_tol,
                                const BoundConstants& constants) {
    const CorrelationIntegral integral = correlation_integral(model, quad_tol);
    const double thinned_intensity = intensity_homogeneous(model);
    const double prefactor = thinned_intensity * thinned_intensity * window.volume();

    BoundReport report;
    report.route = BoundRoute::SteinGeneral;
    report.constants_used["C_d"] = constants.stein_C_d;
    report.terms["correlation_integral"] = integral.total;
    report.terms["correlation_contact"] = integral.contact;
    report.terms["correlation_ring"] = integral.ring;
    report.terms["geometry_term"] = geometry_remainder(model);
    report.terms["intensity_sq_volume"] = prefactor;
    report.total = prefactor * (constants.stein_C_d * integral.total +
                                report.terms["geometry_term"]);
    return report;
}

BoundReport bound_stein_lower(const Model& model, const Window& window, double quad_tol,
                              const BoundConstants& constants) {
    const CorrelationIntegral integral = correlation_integral(model, quad_tol);
    const double thinned_intensity = intensity_homogeneous(model);
    const double intensity_sq = thinned_intensity * thinned_intensity;

    BoundReport report;
    report.route = BoundRoute::SteinLower;
    report.constants_used["c_d"] = constants.lower_c_d;
    report.constants_used["Cprime_d"] = constants.lower_Cprime_d;
    report.terms["correlation_integral"] = integral.total;
    report.terms["correlation_term"] = constants.lower_c_d * intensity_sq * integral.total;
    report.terms["perimeter_term"] =
        constants.lower_Cprime_d * intensity_sq * window.perimeter() * model.radius();
    report.total = std::max(0.0, report.terms["correlation_term"] -
                                     report.terms["perimeter_term"]);
    report.validity_notes.push_back(
        {"structural lower bound: mollification constants set by configuration", true});
    return report;
}

BoundReport bound_stein_smallr(const Model& model, const Window& window,
                               const BoundConstants& constants) {
    const RetentionRule& p = model.rule();
    const double p0 = p(0), p1 = p(1), p2 = p(2);
    const bool case_a = p0 > 0.0 && p1 > 0.0;
    const bool case_b = p0 == 0.0 && p1 > 0.0;
    if (!case_a && !case_b)
        throw unsupported_rule("bound_stein_smallr: needs p(0), p(1) > 0 or p(0) = 0 < p(1)");

    const double mu = model.mean_neighbours();
    const RadialIntegrals radial = radial_integrals(model.dimension());
    const double r_d = std::pow(model.radius(), model.dimension());
    const double thinned_intensity = intensity_homogeneous(model);
    const double prefactor = thinned_intensity * thinned_intensity * window.volume();

    BoundReport report;
    report.route = BoundRoute::SteinSmallR;
    report.constants_used["C_d"] = constants.stein_C_d;
    report.terms["geometry_term"] = geometry_remainder(model);

    double braces = 0.0;
    if (case_a) {
        const double ratio10 = p1 / p0;
        const double ratio21 = p2 / p1;
        const double xi0 = std::fabs(ratio10 * ratio10 - 1.0);
        const double xi1 = (1.0 - ratio10) * (1.0 - ratio10) +
                           (1.0 - ratio21) * (1.0 - ratio21) +
                           2.0 * std::fabs(ratio21 - ratio10);
        report.terms["xi0"] = xi0;
        report.terms["xi1"] = xi1;
        report.terms["contact_term"] = radial.B_d * xi0;
        report.terms["linear_term"] = mu * xi1;
        braces = radial.B_d * xi0 + mu * xi1;
        report.validity_notes.push_back(
            {"mu <= p(0)/4 (contact-scale expansion regime)", mu <= p0 / 4.0});
    } else {
        report.terms["contact_term"] = radial.B_d / (mu * mu);
        report.terms["ring_term"] = radial.M_gt1 / mu;
        braces = report.terms["contact_term"] + report.terms["ring_term"];
        report.validity_notes.push_back({"contact-favouring case p(0) = 0 < p(1)", true});
    }
    report.terms["surrogate_integral"] = radial.S_dminus1 * r_d * braces;
    report.total = prefactor * (constants.stein_C_d * report.terms["surrogate_integral"] +
                                report.terms["geometry_term"]);
    return report;
}

BoundReport bound_stein_moderate(const Model& model, const Window& window,
                                 const BoundConstants& constants) {
    const double mu = model.mean_neighbours();
    const RetentionRule& rule = model.rule();
    const double m_p = poisson_mixture(rule, mu, 1e-12);
    if (m_p < kDenominatorFloor)
        throw degenerate_denominator("bound_stein_moderate: m_p underflowed");
    const double m_plus = poisson_mixture_shifted(rule, mu, 1e-12);
    const double lipschitz = rule.lipschitz_modulus(poisson_truncation(mu, 1e-15) + 2);

    const RadialIntegrals radial = radial_integrals(model.dimension());
    const double r_d = std::pow(model.radius(), model.dimension());
    const double mean_shift = std::fabs(m_plus * m_plus / (m_p * m_p) - 1.0);
    const double variance_part = mu * lipschitz * lipschitz / (m_p * m_p) * radial.J_d;
    const double surrogate =
        radial.S_dminus1 * r_d * (variance_part + mean_shift * radial.B_d);

    const double thinned_intensity = model.lambda() * m_p;
    const double prefactor = thinned_intensity * thinned_intensity * window.volume();

    BoundReport report;
    report.route = BoundRoute::SteinModerateR;
    report.constants_used["C_d"] = constants.stein_C_d;
    report.terms["lipschitz_modulus"] = lipschitz;
    report.terms["m_p"] = m_p;
    report.terms["m_plus"] = m_plus;
    report.terms["variance_part"] = variance_part;
    report.terms["mean_shift_part"] = mean_shift * radial.B_d;
    report.terms["surrogate_integral"] = surrogate;
    report.terms["geometry_term"] = geometry_remainder(model);
    report.total =
        prefactor * (constants.stein_C_d * surrogate + report.terms["geometry_term"]);
    return report;
}

double pointwise_g_bound(const Model& model, double t, double tol) {
    if (!(t >= 0.0)) throw config_error("pointwise_g_bound: t must be >= 0");
    const double mu = model.mean_neighbours();
    const RetentionRule& rule = model.rule();
    const double m_p = poisson_mixture(rule, mu, tol);
    if (m_p < kDenominatorFloor)
        throw degenerate_denominator("pointwise_g_bound: m_p underflowed");
    const OverlapKernel omega(model.dimension());
    const double w = t >= 2.0 ? 0.0 : omega(t);
    const double lipschitz =
        rule.lipschitz_modulus(poisson_truncation(mu, 1e-15) + 2);
    double bound = mu * w * lipschitz * lipschitz / (m_p * m_p);
    if (t <= 1.0) {
        const double m_plus = poisson_mixture_shifted(rule, mu, tol);
        bound += std::fabs(m_plus * m_plus / (m_p * m_p) - 1.0);
    }
    return bound;
}

RouteComparison compare_routes(const Model& model, const Window& window,
                               const BoundConstants& constants, double g_sup, double quad_tol,
                               int threads) {
    RouteComparison table;
    table.routes = {BoundRoute::CouplingTV, BoundRoute::Laplace, BoundRoute::SteinGeneral,
                    BoundRoute::SteinLower, BoundRoute::SteinSmallR,
                    BoundRoute::SteinModerateR};

    std::vector<Model> models;
    models.push_back(model);
    table.rule_names.push_back(model.rule().name());
    const auto add_showcase = [&](RetentionRule rule) {
        if (rule.name() == model.rule().name()) return;
        models.push_back(model.with_rule(rule));
        table.rule_names.push_back(models.back().rule().name());
    };
    // The four showcase rules of the regime comparison.
    add_showcase(RetentionRule::table({0.8, 0.8, 0.8}, 0.2)); // flat on {0,1,2}
    add_showcase(RetentionRule::table({1.0, 1.0}, 0.0));      // Matern-type p(0)=p(1)=1
    add_showcase(RetentionRule::logistic(0.1, 3.0));          // soft Lipschitz rule
    add_showcase(RetentionRule::parity());

    table.reports.resize(models.size());
    parallel_for(models.size(), threads, [&](std::size_t i) {
        const Model& m = models[i];
        std::vector<BoundReport> row;
        row.push_back(bound_coupling_tv(m, window));
        row.push_back(bound_laplace(m, window, g_sup, constants));
        row.push_back(bound_stein_general(m, window, quad_tol, constants));
        row.push_back(bound_stein_lower(m, window, quad_tol, constants));
        try {
            row.push_back(bound_stein_smallr(m, window, constants));
        } catch (const unsupported_rule& e) {
            row.push_back(not_applicable(BoundRoute::SteinSmallR, e.what()));
        }
        try {
            row.push_back(bound_stein_moderate(m, window, constants));
        } catch (const degenerate_denominator& e) {
            row.push_back(not_applicable(BoundRoute::SteinModerateR, e.what()));
        }
        table.reports[i] = std::move(row);
    });
    return table;
}

} // namespace nct
