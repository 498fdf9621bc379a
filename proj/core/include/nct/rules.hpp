#pragma once

#include <string>
#include <vector>

namespace nct {

/// A retention rule p mapping a neighbour count n >= 0 to a keep
/// probability in [0, 1]. Immutable value type; the named analytic
/// families carry their parameters, arbitrary rules enter through the
/// table kinds with an explicit constant tail.
class RetentionRule {
public:
    enum class Kind {
        MaternI,          // p(n) = 1{n == 0}
        GeometricSoftCore,// p(n) = q s^n
        CountFavouring,   // table with p(1) > p(0)
        ClusterFavouring, // p(n) = 1 - exp(-alpha n)
        Logistic,         // p(n) = 1 / (1 + exp(beta (n - n0)))
        Parity,           // p(n) = 1{n even}
        Constant,         // p(n) = c
        Table,            // explicit head values, constant tail
    };

    static RetentionRule matern_i();
    static RetentionRule geometric_soft_core(double q, double s);
    static RetentionRule count_favouring(std::vector<double> values, double tail_value);
    static RetentionRule cluster_favouring(double alpha);
    static RetentionRule logistic(double beta, double n0);
    static RetentionRule parity();
    static RetentionRule constant(double c);
    static RetentionRule table(std::vector<double> values, double tail_value);

    Kind kind() const { return kind_; }

    /// Evaluate p(n).
    double operator()(int n) const;

    /// k-th forward difference at zero: sum_{j<=k} (-1)^j C(k,j) p(k-j).
    double finite_difference(int k) const;

    /// sup_k |p(k+1) - p(k)|. Exact for the families whose supremum has a
    /// closed form; a scan over k <= n_max otherwise (tables are scanned
    /// over their full support, so the result is exact there too).
    double lipschitz_modulus(int n_max = 1024) const;

    /// Human-readable identifier, e.g. "geometric(q=0.9,s=0.5)".
    std::string name() const;

    double param_a() const { return a_; }
    double param_b() const { return b_; }
    const std::vector<double>& table_values() const { return table_; }
    double tail_value() const { return tail_; }

private:
    RetentionRule(Kind kind, double a, double b, std::vector<double> table, double tail);

    Kind kind_;
    double a_ = 0.0; // q / alpha / beta / c, depending on kind
    double b_ = 0.0; // s / n0
    std::vector<double> table_;
    double tail_ = 0.0;
};

} // namespace nct
