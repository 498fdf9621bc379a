#include "nct/geometry.hpp"

#include "nct/errors.hpp"
#include "nct/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nct {

double unit_ball_volume(int dimension) {
    if (dimension < 1) throw config_error("unit_ball_volume: dimension must be >= 1");
    return std::pow(M_PI, 0.5 * dimension) / std::tgamma(0.5 * dimension + 1.0);
}

double unit_sphere_area(int dimension) {
    return static_cast<double>(dimension) * unit_ball_volume(dimension);
}

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
        throw config_error("Window: lower/upper must be non-empty and equal length");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (!(lower_[i] < upper_[i]))
            throw config_error("Window: lower[" + std::to_string(i) + "] must be < upper[" +
                               std::to_string(i) + "]");
    }
}

Window Window::unit_cube(int dimension) { return cube(dimension, 0.0, 1.0); }

Window Window::cube(int dimension, double lower, double upper) {
    if (dimension < 1) throw config_error("Window: dimension must be >= 1");
    return Window(std::vector<double>(dimension, lower), std::vector<double>(dimension, upper));
}

double Window::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) v *= upper_[i] - lower_[i];
    return v;
}

double Window::perimeter() const {
    double total = 0.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        double face = 1.0;
        for (std::size_t j = 0; j < lower_.size(); ++j)
            if (j != i) face *= upper_[j] - lower_[j];
        total += 2.0 * face;
    }
    return total;
}

Window Window::dilated(double r) const {
    if (r < 0.0) throw config_error("Window::dilated: radius must be >= 0");
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] -= r;
        hi[i] += r;
    }
    return Window(std::move(lo), std::move(hi));
}

Window Window::translated(std::span<const double> shift) const {
    if (shift.size() != lower_.size()) throw config_error("Window::translated: dimension mismatch");
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] += shift[i];
        hi[i] += shift[i];
    }
    return Window(std::move(lo), std::move(hi));
}

bool Window::contains(std::span<const double> point) const {
    if (point.size() != lower_.size()) return false;
    for (std::size_t i = 0; i < lower_.size(); ++i)
        if (point[i] < lower_[i] || point[i] > upper_[i]) return false;
    return true;
}

double Window::shift_overlap(std::span<const double> h) const {
    if (h.size() != lower_.size()) throw config_error("Window::shift_overlap: dimension mismatch");
    double v = 1.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        const double len = (upper_[i] - lower_[i]) - std::fabs(h[i]);
        if (len <= 0.0) return 0.0;
        v *= len;
    }
    return v;
}

OverlapKernel::OverlapKernel(int dimension)
    : dimension_(dimension),
      method_(dimension <= 3 ? Method::ClosedForm : Method::Quadrature),
      slice_normalizer_(0.0) {
    if (dimension < 1) throw config_error("OverlapKernel: dimension must be >= 1");
    const double v_slice = dimension == 1 ? 1.0 : unit_ball_volume(dimension - 1);
    slice_normalizer_ = 2.0 * v_slice / unit_ball_volume(dimension);
}

double OverlapKernel::operator()(double t) const {
    if (t < 0.0) throw config_error("OverlapKernel: t must be >= 0");
    if (t >= 2.0) return 0.0;
    if (t == 0.0) return 1.0;
    switch (dimension_) {
        case 1:
            return 1.0 - 0.5 * t;
        case 2:
            // Normalized lens area of two unit discs.
            return (2.0 / M_PI) *
                   (std::acos(0.5 * t) - 0.5 * t * std::sqrt(1.0 - 0.25 * t * t));
        case 3:
            // (16 - 12 t + t^3) / 16.
            return 1.0 - 0.75 * t + t * t * t / 16.0;
        default:
            return via_quadrature(t);
    }
}

double OverlapKernel::via_quadrature(double t) const {
    if (t >= 2.0) return 0.0;
    if (t == 0.0) return 1.0;
    // The intersection is two equal spherical caps of height 1 - t/2; each
    // cap is a stack of (d-1)-balls of radius sqrt(1 - y^2), y in [t/2, 1].
    const double exponent = 0.5 * (dimension_ - 1);
    QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-15;
    const double cap = integrate_or_throw(
        [exponent](double y) { return std::pow(1.0 - y * y, exponent); }, 0.5 * t, 1.0, opts);
    return std::min(1.0, slice_normalizer_ * cap);
}

RadialIntegrals radial_integrals(int dimension) {
    if (dimension < 1) throw config_error("radial_integrals: dimension must be >= 1");
    const OverlapKernel omega(dimension);
    const GaussLegendreRule rule(128);
    const auto moment = [&](double t) {
        return std::pow(t, dimension - 1) * omega(t);
    };
    RadialIntegrals out{};
    out.B_d = 1.0 / dimension;
    out.M_le1 = rule.integrate(moment, 0.0, 1.0);
    out.M_gt1 = rule.integrate(moment, 1.0, 2.0);
    out.J_d = out.M_le1 + out.M_gt1;
    out.S_dminus1 = unit_sphere_area(dimension);
    return out;
}

} // namespace nct
