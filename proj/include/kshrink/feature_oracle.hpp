#pragma once

#include <cstdint>

#include "kshrink/kernel.hpp"
#include "kshrink/rng.hpp"

namespace kshrink {

// Explicit design matrix in feature space: p x n, column i = phi(x_i).
// Everything in this module works on Phi directly and never goes through
// the kernel-domain formulas, so it can serve as their independent check.
struct FeatureMatrix {
    Matrix values;

    Index p() const { return values.rows(); }
    Index n() const { return values.cols(); }
};

FeatureMatrix make_feature_matrix(Matrix values);

// p x p symmetric covariance-like matrix (S, T, or a shrunk combination).
struct CovMatrix {
    Matrix values;

    Index p() const { return values.rows(); }
    double trace() const { return values.trace(); }
};

// Known ground-truth covariance for Monte Carlo oracles.
struct SyntheticModel {
    Matrix sigma;     // true covariance, p x p PSD
    Vector zeta;      // its eigenvalues, descending
    double zeta_bar;  // Tr(sigma)/p

    static SyntheticModel from_covariance(Matrix sigma);
    Index p() const { return sigma.rows(); }
};

// S = Phi H Phi^T / (n-1). Throws if n < 2.
CovMatrix sample_covariance(const FeatureMatrix& phi);

// T = (Tr(S)/p) I.
CovMatrix target(const CovMatrix& s);

// (1-lambda) S + lambda T, lambda in [0,1].
CovMatrix shrink_covariance(const CovMatrix& s, double lambda);

// Direct per-observation sums over S_i = (phi_i - mean)(phi_i - mean)^T.
// These are the feature-space counterparts of the kernel-domain v_hat_s /
// v_hat_t and must agree with them on the induced kernel.
double v_hat_s_direct(const FeatureMatrix& phi);
double v_hat_t_direct(const FeatureMatrix& phi);

// Explicit feature map phi(x) for kernels with a finite feature space:
// Linear (phi = x) and Polynomial with degree <= 2 (monomial expansion).
// Throws for kernels without one (RBF, higher degrees).
FeatureMatrix explicit_feature_map(const DataMatrix& data, const KernelSpec& spec);

// Self-adjoint square root of a PSD matrix, for Gaussian sampling.
Matrix covariance_sqrt(const Matrix& sigma);

// n columns drawn i.i.d. from N(0, sigma) where sigma = sqrt * sqrt^T.
FeatureMatrix sample_gaussian(const Matrix& sigma_sqrt, Index n, Rng& rng);

struct OracleLambdaEstimate {
    double lambda;     // (V(S) - V(T)) / E||T - S||^2, Monte Carlo
    double std_error;  // delta-method standard error of the ratio
    double v_s;        // mean ||S - Sigma||_F^2
    double v_t;        // mean ||T - E{T}||_F^2
    double dist;       // mean ||T - S||_F^2
    long trials;
    std::uint64_t seed;
};

// Monte Carlo estimate of the oracle shrinkage coefficient for a known
// Sigma, Gaussian data. Requires trials >= 1000; throws on a degenerate
// denominator.
OracleLambdaEstimate oracle_lambda(const SyntheticModel& model, Index n,
                                   long trials, std::uint64_t seed);

struct BiasDispersionReport {
    // Exact part: ||E{T} - Sigma||_F^2 vs the eigenvalue dispersion.
    double bias_sq;
    double dispersion;
    double rel_err;
    bool identity_holds;  // rel_err <= 1e-10

    // Monte Carlo part: E||S - zeta_bar I||^2 = V(S) + dispersion,
    // checked through the paired per-trial gap.
    double mc_eig_dispersion;  // mean ||S - zeta_bar I||^2
    double mc_v_s;             // mean ||S - Sigma||^2
    double mc_gap;             // mean of per-trial (lhs - v_s_term - dispersion)
    double mc_gap_se;
    bool excess_dispersion_holds;  // |mc_gap| <= 3 * mc_gap_se
    long trials;
    std::uint64_t seed;
};

BiasDispersionReport bias_dispersion_check(const SyntheticModel& model, Index n,
                                           long trials, std::uint64_t seed);

}  // namespace kshrink
