#pragma once

#include <span>

namespace kshrink {

struct TTestResult {
    double t_statistic = 0.0;
    long degrees_of_freedom = 0;
    double p_value = 1.0;
    bool reject_at_99 = false;  // p_value < 0.01
    bool infinite_t = false;    // zero variance with nonzero mean difference
};

// Two-sided tail probability of Student's t with dof degrees of freedom,
// evaluated through the regularized incomplete beta function.
double student_t_two_sided_p(double t, long dof);

// Paired t-test on equal-length samples (m >= 2): d = a - b,
// t = mean(d) / (sd(d)/sqrt(m)) with the m-1 sample standard deviation.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace kshrink
