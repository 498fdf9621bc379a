#include "nct/rules.hpp"

#include "nct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nct {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw config_error(std::string(what) + " must lie in [0, 1]");
}

} // namespace

RetentionRule::RetentionRule(Kind kind, double a, double b, std::vector<double> table, double tail)
    : kind_(kind), a_(a), b_(b), table_(std::move(table)), tail_(tail) {}

RetentionRule RetentionRule::matern_i() { return RetentionRule(Kind::MaternI, 0, 0, {}, 0); }

RetentionRule RetentionRule::geometric_soft_core(double q, double s) {
    check_probability(q, "geometric q");
    check_probability(s, "geometric s");
    return RetentionRule(Kind::GeometricSoftCore, q, s, {}, 0);
}

RetentionRule RetentionRule::count_favouring(std::vector<double> values, double tail_value) {
    if (values.size() < 2) throw config_error("count_favouring rule needs at least p(0), p(1)");
    for (double v : values) check_probability(v, "count_favouring table entry");
    check_probability(tail_value, "count_favouring tail");
    if (!(values[1] > values[0]))
        throw config_error("count_favouring rule requires p(1) > p(0)");
    return RetentionRule(Kind::CountFavouring, 0, 0, std::move(values), tail_value);
}

RetentionRule RetentionRule::cluster_favouring(double alpha) {
    if (!(alpha > 0.0)) throw config_error("cluster_favouring alpha must be > 0");
    return RetentionRule(Kind::ClusterFavouring, alpha, 0, {}, 0);
}

RetentionRule RetentionRule::logistic(double beta, double n0) {
    if (!(beta > 0.0)) throw config_error("logistic beta must be > 0");
    return RetentionRule(Kind::Logistic, beta, n0, {}, 0);
}

RetentionRule RetentionRule::parity() { return RetentionRule(Kind::Parity, 0, 0, {}, 0); }

RetentionRule RetentionRule::constant(double c) {
    check_probability(c, "constant rule c");
    return RetentionRule(Kind::Constant, c, 0, {}, 0);
}

RetentionRule RetentionRule::table(std::vector<double> values, double tail_value) {
    if (values.empty()) throw config_error("table rule needs at least one value");
    for (double v : values) check_probability(v, "table entry");
    check_probability(tail_value, "table tail");
    return RetentionRule(Kind::Table, 0, 0, std::move(values), tail_value);
}

double RetentionRule::operator()(int n) const {
    if (n < 0) throw config_error("retention rule evaluated at negative count");
    switch (kind_) {
        case Kind::MaternI:
            return n == 0 ? 1.0 : 0.0;
        case Kind::GeometricSoftCore:
            return n == 0 ? a_ : a_ * std::pow(b_, n);
        case Kind::ClusterFavouring:
            return 1.0 - std::exp(-a_ * n);
        case Kind::Logistic:
            return 1.0 / (1.0 + std::exp(a_ * (n - b_)));
        case Kind::Parity:
            return n % 2 == 0 ? 1.0 : 0.0;
        case Kind::Constant:
            return a_;
        case Kind::CountFavouring:
        case Kind::Table:
            return n < static_cast<int>(table_.size()) ? table_[n] : tail_;
    }
    return 0.0;
}

double RetentionRule::finite_difference(int k) const {
    if (k < 0) throw config_error("finite_difference order must be >= 0");
    const RetentionRule& p = *this;
    double sum = 0.0;
    double binom = 1.0; // C(k, j), updated multiplicatively
    for (int j = 0; j <= k; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom * p(k - j);
        binom = binom * (k - j) / (j + 1.0);
    }
    return sum;
}

double RetentionRule::lipschitz_modulus(int n_max) const {
    if (n_max < 1) throw config_error("lipschitz_modulus needs n_max >= 1");
    const RetentionRule& p = *this;
    switch (kind_) {
        case Kind::MaternI:
        case Kind::Parity:
            return 1.0;
        case Kind::Constant:
            return 0.0;
        case Kind::GeometricSoftCore:
            // |q s^{k+1} - q s^k| = q s^k (1 - s), maximal at k = 0.
            return a_ * (1.0 - b_);
        case Kind::ClusterFavouring:
            // e^{-alpha k}(1 - e^{-alpha}), maximal at k = 0.
            return 1.0 - std::exp(-a_);
        case Kind::CountFavouring:
        case Kind::Table: {
            double sup = 0.0;
            const int top = static_cast<int>(table_.size()); // includes step onto the tail
            for (int k = 0; k < top; ++k) sup = std::max(sup, std::fabs(p(k + 1) - p(k)));
            return sup;
        }
        case Kind::Logistic: {
            // The largest step sits next to n0; a scan past it is exact.
            const int top = std::max(n_max, static_cast<int>(std::ceil(b_)) + 2);
            double sup = 0.0;
            for (int k = 0; k < top; ++k) sup = std::max(sup, std::fabs(p(k + 1) - p(k)));
            return sup;
        }
    }
    return 0.0;
}

std::string RetentionRule::name() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::MaternI: return "matern1";
        case Kind::Parity: return "parity";
        case Kind::GeometricSoftCore:
            out << "geometric(q=" << a_ << ",s=" << b_ << ")";
            return out.str();
        case Kind::ClusterFavouring:
            out << "cluster(alpha=" << a_ << ")";
            return out.str();
        case Kind::Logistic:
            out << "logistic(beta=" << a_ << ",n0=" << b_ << ")";
            return out.str();
        case Kind::Constant:
            out << "constant(" << a_ << ")";
            return out.str();
        case Kind::CountFavouring:
        case Kind::Table: {
            out << (kind_ == Kind::CountFavouring ? "count_favouring(" : "table(");
            for (std::size_t i = 0; i < table_.size(); ++i) out << (i ? "," : "") << table_[i];
            out << ";tail=" << tail_ << ")";
            return out.str();
        }
    }
    return "rule";
}

} // namespace nct
