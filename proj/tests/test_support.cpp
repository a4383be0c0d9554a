#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

namespace kshrink::testing {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

DataMatrix random_dataset(Index n, Index q, std::uint64_t seed) {
    return make_data(random_matrix(n, q, seed));
}

FeatureMatrix random_features(Index p, Index n, std::uint64_t seed) {
    return make_feature_matrix(random_matrix(p, n, seed));
}

Matrix random_psd(Index p, std::uint64_t seed, double jitter) {
    const Matrix a = random_matrix(p, p, seed);
    Matrix s = a * a.transpose();
    s.diagonal().array() += jitter;
    return 0.5 * (s + s.transpose()).eval();
}

Matrix random_orthogonal(Index p, std::uint64_t seed) {
    const Matrix a = random_matrix(p, p, seed);
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(p, p);
}

namespace {

// S and T from Phi with explicit loops only.
void explicit_s_t(const FeatureMatrix& phi, Matrix& s, Matrix& t) {
    const Index p = phi.p();
    const Index n = phi.n();
    Vector mean = Vector::Zero(p);
    for (Index j = 0; j < n; ++j) mean += phi.values.col(j);
    mean /= static_cast<double>(n);

    s = Matrix::Zero(p, p);
    for (Index j = 0; j < n; ++j) {
        const Vector d = phi.values.col(j) - mean;
        for (Index a = 0; a < p; ++a)
            for (Index b = 0; b < p; ++b) s(a, b) += d(a) * d(b);
    }
    s /= static_cast<double>(n - 1);

    double tr = 0.0;
    for (Index a = 0; a < p; ++a) tr += s(a, a);
    t = Matrix::Zero(p, p);
    for (Index a = 0; a < p; ++a) t(a, a) = tr / static_cast<double>(p);
}

}  // namespace

double explicit_dist_ts(const FeatureMatrix& phi) {
    Matrix s, t;
    explicit_s_t(phi, s, t);
    double sum = 0.0;
    for (Index a = 0; a < phi.p(); ++a)
        for (Index b = 0; b < phi.p(); ++b) {
            const double d = t(a, b) - s(a, b);
            sum += d * d;
        }
    return sum;
}

double explicit_lambda_hat(const FeatureMatrix& phi) {
    const double vs = v_hat_s_direct(phi);
    const double vt = v_hat_t_direct(phi);
    const double dist = explicit_dist_ts(phi);
    if (dist <= 0.0) return 0.0;
    return std::max(std::min((vs - vt) / dist, 1.0), 0.0);
}

namespace {

double t_density(double x, double nu, double log_norm) {
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double simpson(double a, double b, double fa, double fm, double fb, double nu, double log_norm,
               double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = t_density(lm, nu, log_norm);
    const double frm = t_density(rm, nu, log_norm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(a, m, fa, flm, fm, nu, log_norm, eps / 2.0, depth - 1) +
           simpson(m, b, fm, frm, fb, nu, log_norm, eps / 2.0, depth - 1);
}

}  // namespace

double quadrature_t_two_sided_p(double t, long dof) {
    if (dof < 1) throw std::invalid_argument("quadrature_t_two_sided_p: dof >= 1");
    const double nu = static_cast<double>(dof);
    const double log_norm =
        std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * M_PI);
    const double at = std::abs(t);
    // Integrate the density over [0, |t|]; the two-sided tail is 1 - 2 * that.
    const double fa = t_density(0.0, nu, log_norm);
    const double fb = t_density(at, nu, log_norm);
    const double fm = t_density(0.5 * at, nu, log_norm);
    const double central = simpson(0.0, at, fa, fm, fb, nu, log_norm, 1e-13, 60);
    double p = 1.0 - 2.0 * central;
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

}  // namespace kshrink::testing
