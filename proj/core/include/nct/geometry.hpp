#pragma once

#include <span>
#include <vector>

namespace nct {

/// Volume of the unit ball in R^d, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int dimension);

/// Surface measure of the unit sphere S^{d-1}, d * v_d.
double unit_sphere_area(int dimension);

/// Axis-aligned box window in R^d. The only window shape supported: it
/// keeps dilation, perimeter and shift overlaps exact.
class Window {
public:
    Window(std::vector<double> lower, std::vector<double> upper);

    static Window unit_cube(int dimension);
    static Window cube(int dimension, double lower, double upper);

    int dimension() const { return static_cast<int>(lower_.size()); }
    double lower(int i) const { return lower_[i]; }
    double upper(int i) const { return upper_[i]; }
    double side(int i) const { return upper_[i] - lower_[i]; }

    double volume() const;

    /// Surface measure of the boundary: 2 * sum_i prod_{j != i} side_j.
    double perimeter() const;

    /// Minkowski dilation by the closed ball B(0, r).
    Window dilated(double r) const;

    Window translated(std::span<const double> shift) const;

    bool contains(std::span<const double> point) const;

    /// Volume of W intersect (W - h): prod_i max(0, side_i - |h_i|),
    /// exact for boxes.
    double shift_overlap(std::span<const double> h) const;

    const std::vector<double>& lower_bounds() const { return lower_; }
    const std::vector<double>& upper_bounds() const { return upper_; }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Normalized overlap of two unit balls at centre distance t, i.e. the
/// intersection volume divided by v_d. Closed forms for d <= 3; for d >= 4 the
/// spherical-cap slice integral is evaluated by adaptive quadrature to
/// 1e-10 relative accuracy. Identically 0 for t >= 2, 1 at t = 0.
class OverlapKernel {
public:
    enum class Method { ClosedForm, Quadrature };

    explicit OverlapKernel(int dimension);

    int dimension() const { return dimension_; }
    Method method() const { return method_; }

    double operator()(double t) const;

    /// The quadrature path regardless of dimension; exposed so the closed
    /// forms can be cross-checked against it.
    double via_quadrature(double t) const;

private:
    int dimension_;
    Method method_;
    double slice_normalizer_; // 2 v_{d-1} / v_d
};

/// The radial moments of the overlap kernel used by the window bounds.
struct RadialIntegrals {
    double B_d;        // int_0^1 t^{d-1} dt = 1/d
    double M_le1;      // int_0^1 t^{d-1} omega_d(t) dt
    double M_gt1;      // int_1^2 t^{d-1} omega_d(t) dt
    double J_d;        // M_le1 + M_gt1
    double S_dminus1;  // d * v_d
};

/// Gauss-Legendre evaluation (128 nodes per piece) of the radial moments.
RadialIntegrals radial_integrals(int dimension);

} // namespace nct
