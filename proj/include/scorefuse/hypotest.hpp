#pragma once

#include <string>
#include <vector>

#include "scorefuse/model.hpp"

namespace scorefuse {

/// Regularized incomplete beta I_x(a, b), evaluated by a Lentz continued
/// fraction. Exposed because the t and F machinery below is defined
/// through it and the tests pin it against analytic cases.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= x) for Student's t with df degrees of freedom.
double student_t_cdf(double x, int df);
/// P(F <= x) for the F distribution with (df1, df2) degrees of freedom.
double f_cdf(double x, int df1, int df2);

/// Upper-tail critical value: P(T > result) = p. Bisection on the CDF,
/// converges to adjacent doubles, so accuracy is limited only by the CDF
/// evaluation (~1e-14).
double t_quantile(int df, double p);
/// Upper-tail critical value: P(F > result) = p.
double f_quantile(int df1, int df2, double p);

struct MeanTest {
    double statistic = 0.0;
    bool reject = false;
    bool degenerate = false;  // pooled variance was zero; no test ran
};

struct VarianceTest {
    double statistic = 0.0;
    bool reject = false;
};

/// Pooled two-sample t test of equal means at significance alpha.
/// Degenerate pooled variance (every score identical in both samples)
/// yields degenerate = true and no rejection instead of an error.
MeanTest mean_test(const VectorXd& class1, const VectorXd& class2, double alpha);

/// F test of equal variances at significance alpha; statistic is the
/// class-2 to class-1 sample-variance ratio. Throws DegenerateStatistics
/// when class 1 has zero variance.
VarianceTest variance_test(const VectorXd& class1, const VectorXd& class2, double alpha);

/// (reject mean, reject variance) -> transform case 1..4.
int transform_case(bool mean_reject, bool variance_reject);

/// One reviewer's class-k-vs-class-1 test record and the rescale inputs.
struct ClassPairTest {
    int reviewer = 0;
    int klass = 1;  // class index tested against class 0
    double t_stat = 0.0;
    bool t_reject = false;
    double f_stat = 0.0;
    bool f_reject = false;
    double mean1 = 0.0, std1 = 0.0;
    double mean2 = 0.0, std2 = 0.0;
    int n1 = 0, n2 = 0;
    int transform_case = 4;
    bool degenerate = false;
};

/// Runs both tests on one reviewer's two class samples and fixes the case.
ClassPairTest test_class_pair(const VectorXd& class1, const VectorXd& class2, double alpha);

struct RescaleResult {
    VectorXd values;
    int effective_case = 4;  // after any zero-variance fallback
    std::vector<std::string> warnings;
};

/// Moves class-2 scores toward the class-1 frame by the case formula,
/// blended with the originals by weight alpha (alpha = 1 returns the
/// input bit-for-bit). Case 1 with zero class-2 std falls back to case 2,
/// case 3 falls back to case 4. Class-1 scores are never modified.
RescaleResult rescale(const VectorXd& class2, const ClassPairTest& test, double alpha);

}  // namespace scorefuse
