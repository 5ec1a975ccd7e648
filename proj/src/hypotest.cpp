#include "scorefuse/hypotest.hpp"

#include <cmath>
#include <functional>

namespace scorefuse {

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Lentz continued fraction for the incomplete beta (the classic betacf).
double incbeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int max_iter = 500;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

/// Bisection for a strictly increasing cdf; runs until lo and hi are
/// adjacent doubles, which keeps every quantile fully deterministic.
double invert_cdf(const std::function<double(double)>& cdf, double target) {
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return hi;
    }
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        if (cdf(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
}

void require_sample(const VectorXd& v, const char* which) {
    if (v.size() < 2)
        throw std::invalid_argument(std::string(which) + " needs at least two scores");
}

double sample_mean(const VectorXd& v) { return v.mean(); }

double sample_var(const VectorXd& v) {
    const double m = v.mean();
    return (v.array() - m).square().sum() / (static_cast<double>(v.size()) - 1.0);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0) || std::isnan(x))
        throw std::invalid_argument("regularized_incomplete_beta: bad parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * incbeta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                     incbeta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, int df) {
    if (df < 1) throw std::invalid_argument("t cdf: df must be >= 1");
    const double v = df;
    const double tail = regularized_incomplete_beta(v / 2.0, 0.5, v / (x * x + v)) / 2.0;
    return x >= 0.0 ? 1.0 - tail : tail;
}

double f_cdf(double x, int df1, int df2) {
    if (df1 < 1 || df2 < 1) throw std::invalid_argument("F cdf: dfs must be >= 1");
    if (x <= 0.0) return 0.0;
    const double d1 = df1, d2 = df2;
    return regularized_incomplete_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double t_quantile(int df, double p) {
    if (df < 1) throw std::invalid_argument("t quantile: df must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("t quantile: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -t_quantile(df, 1.0 - p);
    return invert_cdf([df](double x) { return student_t_cdf(x, df); }, 1.0 - p);
}

double f_quantile(int df1, int df2, double p) {
    if (df1 < 1 || df2 < 1) throw std::invalid_argument("F quantile: dfs must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("F quantile: p must lie in (0,1)");
    return invert_cdf([df1, df2](double x) { return f_cdf(x, df1, df2); }, 1.0 - p);
}

MeanTest mean_test(const VectorXd& class1, const VectorXd& class2, double alpha) {
    require_sample(class1, "mean test: class 1");
    require_sample(class2, "mean test: class 2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("mean test: alpha must lie in (0,1)");
    const double n1 = static_cast<double>(class1.size());
    const double n2 = static_cast<double>(class2.size());
    const double pooled =
        ((n1 - 1.0) * sample_var(class1) + (n2 - 1.0) * sample_var(class2)) / (n1 + n2 - 2.0);
    MeanTest r;
    if (pooled <= 0.0) {
        r.degenerate = true;
        return r;
    }
    r.statistic = (sample_mean(class2) - sample_mean(class1)) / std::sqrt(pooled) *
                  std::sqrt(n1 * n2 / (n1 + n2));
    const double crit = t_quantile(static_cast<int>(n1 + n2) - 2, alpha / 2.0);
    r.reject = std::abs(r.statistic) > crit;
    return r;
}

VarianceTest variance_test(const VectorXd& class1, const VectorXd& class2, double alpha) {
    require_sample(class1, "variance test: class 1");
    require_sample(class2, "variance test: class 2");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("variance test: alpha must lie in (0,1)");
    const double v1 = sample_var(class1);
    if (v1 <= 0.0)
        throw DegenerateStatistics("variance test: class 1 has zero variance, ratio undefined");
    VarianceTest r;
    r.statistic = sample_var(class2) / v1;
    const int d2 = static_cast<int>(class2.size()) - 1;
    const int d1 = static_cast<int>(class1.size()) - 1;
    r.reject = r.statistic < f_quantile(d2, d1, 1.0 - alpha / 2.0) ||
               r.statistic > f_quantile(d2, d1, alpha / 2.0);
    return r;
}

int transform_case(bool mean_reject, bool variance_reject) {
    if (mean_reject && variance_reject) return 1;
    if (mean_reject) return 2;
    if (variance_reject) return 3;
    return 4;
}

ClassPairTest test_class_pair(const VectorXd& class1, const VectorXd& class2, double alpha) {
    ClassPairTest t;
    t.n1 = static_cast<int>(class1.size());
    t.n2 = static_cast<int>(class2.size());
    t.mean1 = sample_mean(class1);
    t.mean2 = sample_mean(class2);
    t.std1 = std::sqrt(sample_var(class1));
    t.std2 = std::sqrt(sample_var(class2));

    const MeanTest mt = mean_test(class1, class2, alpha);
    if (mt.degenerate) {
        // Constant scores on both sides: nothing to reconcile.
        t.degenerate = true;
        t.transform_case = 4;
        return t;
    }
    t.t_stat = mt.statistic;
    t.t_reject = mt.reject;
    const VarianceTest vt = variance_test(class1, class2, alpha);
    t.f_stat = vt.statistic;
    t.f_reject = vt.reject;
    t.transform_case = transform_case(t.t_reject, t.f_reject);
    return t;
}

RescaleResult rescale(const VectorXd& class2, const ClassPairTest& test, double alpha) {
    if (test.transform_case < 1 || test.transform_case > 4)
        throw std::invalid_argument("rescale: transform case must be 1..4");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("rescale: blend alpha must lie in [0,1]");

    RescaleResult out;
    out.effective_case = test.transform_case;
    if ((test.transform_case == 1 || test.transform_case == 3) && test.std2 <= 0.0) {
        // Degenerate class-2 spread: drop the std ratio from the formula.
        out.effective_case = test.transform_case == 1 ? 2 : 4;
        out.warnings.push_back("class " + std::to_string(test.klass + 1) + ", reviewer index " +
                               std::to_string(test.reviewer) +
                               ": zero class-2 std, transform case fell back to case " +
                               std::to_string(out.effective_case));
    }
    if (alpha == 1.0 || out.effective_case == 4) {
        out.values = class2;
        return out;
    }

    const auto g = class2.array();
    Eigen::ArrayXd target;
    switch (out.effective_case) {
        case 1:
            target = test.std1 / test.std2 * (g - test.mean2) + test.mean1;
            break;
        case 2:
            target = g - test.mean2 + test.mean1;
            break;
        case 3:
            target = test.std1 / test.std2 * (g - test.mean2) + test.mean2;
            break;
    }
    out.values = ((1.0 - alpha) * target + alpha * g).matrix();
    return out;
}

}  // namespace scorefuse
