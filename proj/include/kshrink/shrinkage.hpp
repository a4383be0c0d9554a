#pragma once

#include "kshrink/feature_oracle.hpp"
#include "kshrink/kernel.hpp"

namespace kshrink {

// Feature-space dimension p. Either a known finite value (explicit feature
// maps) or a policy resolving p = n at the point of use, the default for
// implicit kernels whose feature space is only known through k(.,.).
class FeatureDim {
public:
    static FeatureDim finite(Index p);
    static FeatureDim sample_size() { return FeatureDim{}; }

    bool is_finite() const { return p_ > 0; }
    Index resolve(Index n) const;

private:
    Index p_ = -1;  // -1 = sample-size policy
};

struct ShrinkageEstimate {
    double lambda;     // clamp(raw_ratio, 0, 1)
    double v_s;        // V^(S)
    double v_t;        // V^(T)
    double dist_ts;    // ||T - S||_F^2
    double raw_ratio;  // pre-clipping value (0 when degenerate)
    Index p_used;
    bool degenerate;   // ||T - S||^2 below the floor; lambda forced to 0
};

// V^(S) = n/((n-1)^2 (n-2)) (||diag(K)||^2 - ||K||_F^2 / n).
// Requires n >= 3 for the unbiased denominator.
double v_hat_s(const KernelMatrix& k);

// V^(T) = n/(p (n-1)^2 (n-2)) ||diag(K) - Tr(K)/n e||^2.
double v_hat_t(const KernelMatrix& k, const FeatureDim& p);

// ||T - S||_F^2 = (||K||_F^2 - Tr^2(K)/p) / (n-1)^2.
double dist_ts(const KernelMatrix& k, const FeatureDim& p);

// Estimated oracle shrinkage coefficient, computed entirely from K:
// max(min((v_s - v_t)/dist, 1), 0). A denominator at or below
// 1e-14 * ||K||_F^2/(n-1)^2 means S is already (numerically) a multiple of
// I; the estimate is then 0 with the degenerate flag set.
ShrinkageEstimate lambda_hat(const KernelMatrix& k, const FeatureDim& p);

// K^(lambda) = (1-lambda) K + lambda (Tr(K)/p) I. Not centered: the
// identity part raises every row sum to lambda Tr(K)/p on purpose.
KernelMatrix regularize_kernel(const KernelMatrix& k, double lambda, const FeatureDim& p);

// Small-sample (n < p) spectral link between K = H Phi^T Phi H and
// S = Phi H Phi^T / (n-1): kappa_i = (n-1) delta_i for i = 1..n-1, and
// kappa_n = 0 from the centering rank deficiency.
struct EigenRelationReport {
    Vector kappa;          // eigenvalues of K, descending (length n)
    Vector delta;          // leading n-1 eigenvalues of S, descending
    double max_rel_err;    // worst |kappa_i - (n-1) delta_i| / max|kappa|
    double kappa_last;     // smallest eigenvalue of K, expected 0
    bool relation_holds;   // max_rel_err <= 1e-8
    bool null_eigen_ok;    // |kappa_last| <= 1e-8 * ||K||_F
};

EigenRelationReport eigen_relation_check(const FeatureMatrix& phi);

}  // namespace kshrink
