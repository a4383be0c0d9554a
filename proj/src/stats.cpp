#include "kshrink/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kshrink {

double student_t_two_sided_p(double t, long dof) {
    if (dof < 1) {
        throw std::invalid_argument("student_t_two_sided_p: dof must be >= 1");
    }
    if (std::isinf(t)) return 0.0;
    const double nu = static_cast<double>(dof);
    // P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2).
    const double x = nu / (nu + t * t);
    return boost::math::ibeta(nu / 2.0, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("paired_t_test: samples must have equal length");
    }
    const std::size_t m = a.size();
    if (m < 2) {
        throw std::invalid_argument("paired_t_test: need at least 2 pairs");
    }

    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(m);

    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));

    TTestResult res;
    res.degrees_of_freedom = static_cast<long>(m) - 1;
    if (sd == 0.0) {
        if (mean == 0.0) {
            res.t_statistic = 0.0;
            res.p_value = 1.0;
        } else {
            res.t_statistic = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
            res.infinite_t = true;
        }
    } else {
        res.t_statistic = mean / (sd / std::sqrt(static_cast<double>(m)));
        res.p_value = student_t_two_sided_p(res.t_statistic, res.degrees_of_freedom);
    }
    res.reject_at_99 = res.p_value < 0.01;
    return res;
}

}  // namespace kshrink
