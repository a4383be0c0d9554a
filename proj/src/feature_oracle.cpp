#include "kshrink/feature_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kshrink {

namespace {

// Fixed-order Kahan reduction: the per-trial values are stored by index and
// summed in index order, so the result does not depend on how the trial
// loop was scheduled.
double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double mean_of(const std::vector<double>& xs) {
    return kahan_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace

FeatureMatrix make_feature_matrix(Matrix values) {
    if (values.rows() < 1 || values.cols() < 1) {
        throw std::invalid_argument("FeatureMatrix: need p >= 1 and n >= 1");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("FeatureMatrix: entries must be finite");
    }
    return FeatureMatrix{std::move(values)};
}

SyntheticModel SyntheticModel::from_covariance(Matrix sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
        throw std::invalid_argument("SyntheticModel: covariance must be square");
    }
    if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
        throw std::invalid_argument("SyntheticModel: covariance must be symmetric");
    }
    SyntheticModel m;
    m.sigma = std::move(sigma);
    EigSystem es = sym_eigendecompose(m.sigma);
    if (es.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, m.sigma.norm())) {
        throw std::invalid_argument("SyntheticModel: covariance must be PSD");
    }
    m.zeta = std::move(es.eigenvalues);
    m.zeta_bar = m.sigma.trace() / static_cast<double>(m.sigma.rows());
    return m;
}

CovMatrix sample_covariance(const FeatureMatrix& phi) {
    const Index n = phi.n();
    if (n < 2) {
        throw std::invalid_argument("sample_covariance: need n >= 2 observations");
    }
    const Vector mean = phi.values.rowwise().mean();
    Matrix centered = phi.values.colwise() - mean;
    Matrix s = (centered * centered.transpose()) / static_cast<double>(n - 1);
    s = 0.5 * (s + s.transpose()).eval();
    return CovMatrix{std::move(s)};
}

CovMatrix target(const CovMatrix& s) {
    const Index p = s.p();
    Matrix t = (s.trace() / static_cast<double>(p)) * Matrix::Identity(p, p);
    return CovMatrix{std::move(t)};
}

CovMatrix shrink_covariance(const CovMatrix& s, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("shrink_covariance: lambda must lie in [0,1]");
    }
    Matrix out = (1.0 - lambda) * s.values + lambda * target(s).values;
    return CovMatrix{std::move(out)};
}

double v_hat_s_direct(const FeatureMatrix& phi) {
    const Index n = phi.n();
    if (n < 3) {
        throw std::invalid_argument("v_hat_s_direct: need n >= 3 observations");
    }
    const Vector mean = phi.values.rowwise().mean();
    const Matrix centered = phi.values.colwise() - mean;
    const Matrix s = (centered * centered.transpose()) / static_cast<double>(n - 1);
    const double scale = static_cast<double>(n - 1) / static_cast<double>(n);

    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        const Matrix s_i = centered.col(i) * centered.col(i).transpose();
        sum += (s_i - scale * s).squaredNorm();
    }
    const double nn = static_cast<double>(n);
    return nn / ((nn - 1.0) * (nn - 1.0) * (nn - 2.0)) * sum;
}

double v_hat_t_direct(const FeatureMatrix& phi) {
    const Index n = phi.n();
    const Index p = phi.p();
    if (n < 3) {
        throw std::invalid_argument("v_hat_t_direct: need n >= 3 observations");
    }
    const Vector mean = phi.values.rowwise().mean();
    const Matrix centered = phi.values.colwise() - mean;
    const Matrix s = (centered * centered.transpose()) / static_cast<double>(n - 1);
    // Deviation from the empirical mean of the S_i, i.e. ((n-1)/n) S; the
    // trace deviations then match ||diag(K) - Tr(K)/n e||^2 identically.
    const double scale = static_cast<double>(n - 1) / static_cast<double>(n);
    const double tr_scaled = scale * s.trace();

    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double tr_i = centered.col(i).squaredNorm();  // Tr(S_i)
        const double d = tr_i - tr_scaled;
        sum += d * d;
    }
    const double nn = static_cast<double>(n);
    return nn / (static_cast<double>(p) * (nn - 1.0) * (nn - 1.0) * (nn - 2.0)) * sum;
}

FeatureMatrix explicit_feature_map(const DataMatrix& data, const KernelSpec& spec) {
    spec.validate();
    const Index n = data.n();
    const Index q = data.q();
    switch (spec.kind) {
        case KernelSpec::Kind::Linear:
            return FeatureMatrix{data.values.transpose()};
        case KernelSpec::Kind::Polynomial: {
            if (spec.degree == 1) {
                // (x.y + c) = [x; sqrt(c)] . [y; sqrt(c)]
                Matrix phi(q + 1, n);
                phi.topRows(q) = data.values.transpose();
                phi.row(q).setConstant(std::sqrt(spec.offset));
                return FeatureMatrix{std::move(phi)};
            }
            if (spec.degree == 2) {
                // Monomials: x_i^2, sqrt(2) x_i x_j (i<j), sqrt(2c) x_i, c.
                const Index p = q * (q + 1) / 2 + q + 1;
                Matrix phi(p, n);
                const double sqrt2 = std::sqrt(2.0);
                for (Index col = 0; col < n; ++col) {
                    const auto x = data.values.row(col);
                    Index r = 0;
                    for (Index i = 0; i < q; ++i) phi(r++, col) = x(i) * x(i);
                    for (Index i = 0; i < q; ++i)
                        for (Index j = i + 1; j < q; ++j) phi(r++, col) = sqrt2 * x(i) * x(j);
                    for (Index i = 0; i < q; ++i) phi(r++, col) = std::sqrt(2.0 * spec.offset) * x(i);
                    phi(r++, col) = spec.offset;
                }
                return FeatureMatrix{std::move(phi)};
            }
            throw std::invalid_argument("explicit_feature_map: polynomial degree > 2 not expanded");
        }
        case KernelSpec::Kind::Rbf:
            throw std::invalid_argument("explicit_feature_map: RBF has no finite feature map");
    }
    throw std::logic_error("explicit_feature_map: unreachable");
}

Matrix covariance_sqrt(const Matrix& sigma) {
    EigSystem es = sym_eigendecompose(sigma);
    Vector clipped = es.eigenvalues.cwiseMax(0.0);
    return es.eigenvectors * clipped.cwiseSqrt().asDiagonal() * es.eigenvectors.transpose();
}

FeatureMatrix sample_gaussian(const Matrix& sigma_sqrt, Index n, Rng& rng) {
    const Index p = sigma_sqrt.rows();
    Matrix z(p, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < p; ++i) {
            z(i, j) = rng.normal();
        }
    }
    return FeatureMatrix{sigma_sqrt * z};
}

OracleLambdaEstimate oracle_lambda(const SyntheticModel& model, Index n,
                                   long trials, std::uint64_t seed) {
    if (trials < 1000) {
        throw std::invalid_argument("oracle_lambda: need trials >= 1000");
    }
    if (n < 2) {
        throw std::invalid_argument("oracle_lambda: need n >= 2");
    }
    const Index p = model.p();
    const Matrix sqrt_sigma = covariance_sqrt(model.sigma);
    const Matrix expected_target = model.zeta_bar * Matrix::Identity(p, p);

    std::vector<double> a(trials), b(trials), c(trials);
#pragma omp parallel for schedule(static)
    for (long t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        const FeatureMatrix phi = sample_gaussian(sqrt_sigma, n, rng);
        const CovMatrix s = sample_covariance(phi);
        const CovMatrix tgt = target(s);
        a[t] = (s.values - model.sigma).squaredNorm();
        b[t] = (tgt.values - expected_target).squaredNorm();
        c[t] = (tgt.values - s.values).squaredNorm();
    }

    const double ma = mean_of(a), mb = mean_of(b), mc = mean_of(c);
    if (!(mc > 0.0) || mc < 1e-14 * std::max(1.0, ma)) {
        throw std::runtime_error("oracle_lambda: degenerate denominator E||T-S||^2");
    }

    // Delta method on the ratio (ma - mb)/mc with the sample covariance of
    // the per-trial triples.
    const double nt = static_cast<double>(trials);
    double caa = 0, cbb = 0, ccc = 0, cab = 0, cac = 0, cbc = 0;
    for (long t = 0; t < trials; ++t) {
        const double da = a[t] - ma, db = b[t] - mb, dc = c[t] - mc;
        caa += da * da;
        cbb += db * db;
        ccc += dc * dc;
        cab += da * db;
        cac += da * dc;
        cbc += db * dc;
    }
    const double denom = nt * (nt - 1.0);
    caa /= denom; cbb /= denom; ccc /= denom; cab /= denom; cac /= denom; cbc /= denom;
    const double ga = 1.0 / mc;
    const double gb = -1.0 / mc;
    const double gc = -(ma - mb) / (mc * mc);
    const double var = ga * ga * caa + gb * gb * cbb + gc * gc * ccc +
                       2.0 * (ga * gb * cab + ga * gc * cac + gb * gc * cbc);

    OracleLambdaEstimate est;
    est.lambda = (ma - mb) / mc;
    est.std_error = std::sqrt(std::max(var, 0.0));
    est.v_s = ma;
    est.v_t = mb;
    est.dist = mc;
    est.trials = trials;
    est.seed = seed;
    return est;
}

BiasDispersionReport bias_dispersion_check(const SyntheticModel& model, Index n,
                                           long trials, std::uint64_t seed) {
    const Index p = model.p();
    BiasDispersionReport rep{};
    rep.trials = trials;
    rep.seed = seed;

    // Exact identity: ||E{T} - Sigma||^2 with E{T} = (Tr(Sigma)/p) I equals
    // the dispersion of the eigenvalues around their mean.
    const Matrix expected_target = model.zeta_bar * Matrix::Identity(p, p);
    rep.bias_sq = (expected_target - model.sigma).squaredNorm();
    rep.dispersion = (model.zeta.array() - model.zeta_bar).square().sum();
    const double scale = std::max(rep.bias_sq, rep.dispersion);
    rep.rel_err = scale > 0.0 ? std::abs(rep.bias_sq - rep.dispersion) / scale
                              : std::abs(rep.bias_sq - rep.dispersion);
    rep.identity_holds = rep.rel_err <= 1e-10;

    // Monte Carlo: the sample eigenvalues are more dispersed than the true
    // ones by exactly V(S).
    if (trials > 0) {
        if (n < 2) {
            throw std::invalid_argument("bias_dispersion_check: need n >= 2 for the Monte Carlo part");
        }
        const Matrix sqrt_sigma = covariance_sqrt(model.sigma);
        std::vector<double> lhs(trials), vs(trials);
#pragma omp parallel for schedule(static)
        for (long t = 0; t < trials; ++t) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
            const FeatureMatrix phi = sample_gaussian(sqrt_sigma, n, rng);
            const CovMatrix s = sample_covariance(phi);
            lhs[t] = (s.values - expected_target).squaredNorm();
            vs[t] = (s.values - model.sigma).squaredNorm();
        }
        rep.mc_eig_dispersion = mean_of(lhs);
        rep.mc_v_s = mean_of(vs);
        std::vector<double> gap(trials);
        for (long t = 0; t < trials; ++t) {
            gap[t] = lhs[t] - vs[t] - rep.dispersion;
        }
        rep.mc_gap = mean_of(gap);
        double var = 0.0;
        for (long t = 0; t < trials; ++t) {
            const double d = gap[t] - rep.mc_gap;
            var += d * d;
        }
        var /= static_cast<double>(trials) * (static_cast<double>(trials) - 1.0);
        rep.mc_gap_se = std::sqrt(var);
        rep.excess_dispersion_holds = std::abs(rep.mc_gap) <= 3.0 * rep.mc_gap_se;
    } else {
        rep.excess_dispersion_holds = true;
    }
    return rep;
}

}  // namespace kshrink
