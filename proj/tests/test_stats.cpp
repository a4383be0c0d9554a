#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kshrink/stats.hpp"
#include "test_support.hpp"

using namespace kshrink;
using namespace kshrink::testing;

TEST_CASE("identical samples give t = 0, p = 1") {
    const std::vector<double> a = {0.3, 0.1, 0.9, 0.5};
    const TTestResult r = paired_t_test(a, a);
    CHECK(r.t_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(!r.reject_at_99);
    CHECK(!r.infinite_t);
}

TEST_CASE("swapping the samples negates t and preserves p") {
    const std::vector<double> a = {0.31, 0.12, 0.94, 0.52, 0.77};
    const std::vector<double> b = {0.25, 0.19, 0.81, 0.60, 0.70};
    const TTestResult ab = paired_t_test(a, b);
    const TTestResult ba = paired_t_test(b, a);
    CHECK(ab.t_statistic == doctest::Approx(-ba.t_statistic).epsilon(1e-14));
    CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-14));
}

TEST_CASE("frozen example: d = (1,2,3,4,5)") {
    const std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b(5, 0.0);
    const TTestResult r = paired_t_test(a, b);
    // t = 3 / (sqrt(2.5)/sqrt(5)) = 3/sqrt(0.5); two-sided p with 4 dof.
    CHECK(r.t_statistic == doctest::Approx(4.242640687119285).epsilon(1e-12));
    CHECK(r.degrees_of_freedom == 4);
    CHECK(r.p_value == doctest::Approx(0.013235599563682702).epsilon(1e-9));
    CHECK(!r.reject_at_99);
}

TEST_CASE("zero-variance differences") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    std::vector<double> b = {2.0, 3.0, 4.0};  // d = -1 everywhere
    const TTestResult shifted = paired_t_test(a, b);
    CHECK(shifted.infinite_t);
    CHECK(shifted.p_value == 0.0);
    CHECK(shifted.reject_at_99);
    CHECK(std::isinf(shifted.t_statistic));
    CHECK(shifted.t_statistic < 0.0);
}

TEST_CASE("input validation") {
    const std::vector<double> a = {1.0, 2.0};
    const std::vector<double> shorter = {1.0};
    CHECK_THROWS_AS(paired_t_test(a, shorter), std::invalid_argument);
    CHECK_THROWS_AS(paired_t_test(shorter, shorter), std::invalid_argument);
}

TEST_CASE("p-values agree with the quadrature oracle across dof") {
    for (long dof : {2L, 4L, 10L, 99L}) {
        for (double t : {0.0, 0.31, 1.0, 2.2, 4.2426406871192848, 7.5}) {
            const double lib = student_t_two_sided_p(t, dof);
            const double oracle = quadrature_t_two_sided_p(t, dof);
            CHECK(std::abs(lib - oracle) <= 1e-6);
            CHECK(lib == doctest::Approx(student_t_two_sided_p(-t, dof)).epsilon(1e-14));
        }
    }
}

TEST_CASE("reject_at_99 follows the p < 0.01 rule") {
    // Strong consistent difference across 40 pairs.
    std::vector<double> a(40), b(40);
    Rng rng(71);
    for (int i = 0; i < 40; ++i) {
        const double noise = 0.01 * rng.normal();
        b[i] = 0.5 + noise;
        a[i] = b[i] + 0.05 + 0.01 * rng.normal();
    }
    const TTestResult r = paired_t_test(a, b);
    CHECK(r.reject_at_99);
    CHECK(r.p_value < 0.01);
}
