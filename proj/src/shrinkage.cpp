#include "kshrink/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kshrink {

FeatureDim FeatureDim::finite(Index p) {
    if (p < 1) {
        throw std::invalid_argument("FeatureDim: finite p must be >= 1");
    }
    FeatureDim d;
    d.p_ = p;
    return d;
}

Index FeatureDim::resolve(Index n) const {
    if (p_ > 0) return p_;
    if (n < 1) {
        throw std::invalid_argument("FeatureDim: cannot resolve p from n < 1");
    }
    return n;
}

namespace {

void require_n3(Index n, const char* who) {
    if (n < 3) {
        throw std::invalid_argument(std::string(who) +
                                    ": insufficient observations for unbiased variance estimator (n >= 3)");
    }
}

// Rounding floor: tiny negative ingredient values are noise from the
// subtractive kernel forms.
double clamp_floor(double v) { return (v > -1e-12 && v < 0.0) ? 0.0 : v; }

}  // namespace

double v_hat_s(const KernelMatrix& k) {
    const Index n = k.n();
    require_n3(n, "v_hat_s");
    const double nn = static_cast<double>(n);
    const double diag_sq = k.values.diagonal().squaredNorm();
    const double frob_sq = k.squared_norm();
    const double value = nn / ((nn - 1.0) * (nn - 1.0) * (nn - 2.0)) * (diag_sq - frob_sq / nn);
    return clamp_floor(value);
}

double v_hat_t(const KernelMatrix& k, const FeatureDim& p) {
    const Index n = k.n();
    require_n3(n, "v_hat_t");
    const double nn = static_cast<double>(n);
    const double pp = static_cast<double>(p.resolve(n));
    const double mean_diag = k.trace() / nn;
    const double dev_sq = (k.values.diagonal().array() - mean_diag).square().sum();
    return nn / (pp * (nn - 1.0) * (nn - 1.0) * (nn - 2.0)) * dev_sq;
}

double dist_ts(const KernelMatrix& k, const FeatureDim& p) {
    const Index n = k.n();
    if (n < 2) {
        throw std::invalid_argument("dist_ts: need n >= 2");
    }
    const double nn = static_cast<double>(n);
    const double pp = static_cast<double>(p.resolve(n));
    const double tr = k.trace();
    const double value = (k.squared_norm() - tr * tr / pp) / ((nn - 1.0) * (nn - 1.0));
    return clamp_floor(value);
}

ShrinkageEstimate lambda_hat(const KernelMatrix& k, const FeatureDim& p) {
    const Index n = k.n();
    require_n3(n, "lambda_hat");

    ShrinkageEstimate est{};
    est.p_used = p.resolve(n);
    est.v_s = v_hat_s(k);
    est.v_t = v_hat_t(k, p);
    est.dist_ts = dist_ts(k, p);

    const double nn = static_cast<double>(n);
    const double floor = 1e-14 * k.squared_norm() / ((nn - 1.0) * (nn - 1.0));
    if (est.dist_ts <= floor) {
        // S is already a multiple of I within noise; the shrinkage estimator
        // is invariant to lambda, so pick 0.
        est.raw_ratio = 0.0;
        est.lambda = 0.0;
        est.degenerate = true;
        return est;
    }
    est.raw_ratio = (est.v_s - est.v_t) / est.dist_ts;
    // Clipping order per the estimator definition: min with 1, then max with 0.
    est.lambda = std::max(std::min(est.raw_ratio, 1.0), 0.0);
    est.degenerate = false;
    return est;
}

KernelMatrix regularize_kernel(const KernelMatrix& k, double lambda, const FeatureDim& p) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("regularize_kernel: lambda must lie in [0,1]");
    }
    const Index n = k.n();
    const double pp = static_cast<double>(p.resolve(n));
    Matrix out = (1.0 - lambda) * k.values;
    out.diagonal().array() += lambda * k.trace() / pp;
    return KernelMatrix{std::move(out)};
}

EigenRelationReport eigen_relation_check(const FeatureMatrix& phi) {
    const Index n = phi.n();
    const Index p = phi.p();
    if (n >= p) {
        throw std::invalid_argument("eigen_relation_check: relation requires the small-sample regime n < p");
    }
    if (n < 2) {
        throw std::invalid_argument("eigen_relation_check: need n >= 2");
    }

    const KernelMatrix k = center_gram(gram_matrix(
        DataMatrix{phi.values.transpose()}, KernelSpec::linear()));
    const CovMatrix s = sample_covariance(phi);

    EigenRelationReport rep{};
    rep.kappa = sym_eigendecompose(k.values).eigenvalues;
    const Vector delta_full = sym_eigendecompose(s.values).eigenvalues;
    rep.delta = delta_full.head(n - 1);

    // Per-eigenvalue relative error; eigenvalues that are themselves zero
    // (degenerate inputs) are measured against the spectral scale instead.
    const double scale = std::max(rep.kappa.cwiseAbs().maxCoeff(), 1e-300);
    double worst = 0.0;
    for (Index i = 0; i < n - 1; ++i) {
        const double expected = static_cast<double>(n - 1) * rep.delta(i);
        const double diff = std::abs(rep.kappa(i) - expected);
        const double denom = std::abs(rep.kappa(i)) > 1e-12 * scale ? std::abs(rep.kappa(i)) : scale;
        worst = std::max(worst, diff / denom);
    }
    rep.max_rel_err = worst;
    rep.kappa_last = rep.kappa(n - 1);
    rep.relation_holds = rep.max_rel_err <= 1e-8;
    rep.null_eigen_ok = std::abs(rep.kappa_last) <= 1e-8 * k.frobenius_norm();
    return rep;
}

}  // namespace kshrink
