#include "kshrink/kfda.hpp"

#include <cmath>
#include <stdexcept>

namespace kshrink {

Index LabeledDataset::count(int label) const {
    Index c = 0;
    for (int l : labels) {
        if (l == label) ++c;
    }
    return c;
}

LabeledDataset make_labeled(DataMatrix data, std::vector<int> labels) {
    if (static_cast<std::size_t>(data.n()) != labels.size()) {
        throw std::invalid_argument("LabeledDataset: label count must match observation count");
    }
    for (int l : labels) {
        if (l != 1 && l != 2) {
            throw std::invalid_argument("LabeledDataset: labels must be 1 or 2");
        }
    }
    LabeledDataset ds{std::move(data), std::move(labels)};
    if (ds.count(1) == 0 || ds.count(2) == 0) {
        throw std::invalid_argument("LabeledDataset: both classes must be present");
    }
    return ds;
}

RegularizerSpec RegularizerSpec::fixed_ridge(double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("RegularizerSpec: fixed ridge must be > 0");
    }
    RegularizerSpec r;
    r.kind = Kind::FixedRidge;
    r.ridge = lambda;
    return r;
}

RegularizerSpec RegularizerSpec::shrinkage(FeatureDim p) {
    RegularizerSpec r;
    r.kind = Kind::Shrinkage;
    r.p = p;
    return r;
}

std::string RegularizerSpec::name() const {
    return kind == Kind::FixedRidge ? "fixed-ridge" : "shrinkage";
}

namespace {

std::vector<Index> class_indices(const std::vector<int>& labels, int label) {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) idx.push_back(static_cast<Index>(i));
    }
    return idx;
}

// score(x) = sum_i alpha_i k(x_i, x); one explicit loop so training-time
// scores and prediction-time scores are the same bits.
double score_point(const Matrix& train, const Vector& alpha, const KernelSpec& kernel,
                   const Eigen::Ref<const Vector>& x) {
    double s = 0.0;
    for (Index i = 0; i < train.rows(); ++i) {
        s += alpha(i) * kernel_eval(train.row(i).transpose(), x, kernel);
    }
    return s;
}

}  // namespace

KfdaModel train(const LabeledDataset& ds, const KernelSpec& kernel, const RegularizerSpec& reg) {
    const Index n = ds.n();
    const std::vector<Index> idx1 = class_indices(ds.labels, 1);
    const std::vector<Index> idx2 = class_indices(ds.labels, 2);
    if (idx1.empty() || idx2.empty()) {
        throw std::invalid_argument("kfda::train: both classes need at least one observation");
    }
    if (reg.kind == RegularizerSpec::Kind::Shrinkage) {
        if (idx1.size() < 2 || idx2.size() < 2 || n < 3) {
            throw std::invalid_argument(
                "kfda::train: shrinkage regularizer needs >= 2 observations per class and n >= 3");
        }
    } else if (n < 2) {
        throw std::invalid_argument("kfda::train: need n >= 2");
    }

    const RawGram gram = gram_matrix(ds.data, kernel);
    const Matrix& g = gram.values;

    // Between-class vectors and within-class scatter in dual form:
    // m_c = G 1_c / n_c and N = sum_c G_c (I - ones/n_c) G_c^T.
    Vector m1 = Vector::Zero(n), m2 = Vector::Zero(n);
    for (Index i : idx1) m1 += g.col(i);
    for (Index i : idx2) m2 += g.col(i);
    m1 /= static_cast<double>(idx1.size());
    m2 /= static_cast<double>(idx2.size());

    Matrix scatter = Matrix::Zero(n, n);
    for (const auto* idx : {&idx1, &idx2}) {
        const Index nc = static_cast<Index>(idx->size());
        Matrix gc(n, nc);
        for (Index j = 0; j < nc; ++j) gc.col(j) = g.col((*idx)[static_cast<std::size_t>(j)]);
        const Vector class_mean = gc.rowwise().mean();
        gc.colwise() -= class_mean;
        scatter += gc * gc.transpose();
    }
    scatter = 0.5 * (scatter + scatter.transpose()).eval();

    KfdaModel model;
    model.kernel = kernel;
    model.regularizer = reg;

    Matrix reg_scatter;
    if (reg.kind == RegularizerSpec::Kind::FixedRidge) {
        reg_scatter = scatter;
        reg_scatter.diagonal().array() += reg.ridge;
        model.lambda_used = reg.ridge;
    } else {
        const KernelMatrix pooled = center_gram(gram);
        const ShrinkageEstimate est = lambda_hat(pooled, reg.p);
        const double p_eff = static_cast<double>(reg.p.resolve(n));
        reg_scatter = (1.0 - est.lambda) * scatter;
        reg_scatter.diagonal().array() += est.lambda * scatter.trace() / p_eff;
        model.lambda_used = est.lambda;
        model.shrinkage_degenerate = est.degenerate;
    }

    const Vector rhs = m1 - m2;
    const double rhs_norm = rhs.norm();

    Vector alpha = reg_scatter.ldlt().solve(rhs);
    const double residual = (reg_scatter * alpha - rhs).norm();
    if (!alpha.allFinite() || residual > 1e-8 * std::max(rhs_norm, 1e-300)) {
        // Eigendecomposition-based pseudo-solve; keeps components along
        // well-conditioned directions only.
        const EigSystem es = sym_eigendecompose(reg_scatter);
        const double max_eig = es.eigenvalues.cwiseAbs().maxCoeff();
        if (max_eig <= 0.0 && rhs_norm > 0.0) {
            throw std::runtime_error("kfda::train: singular within-class scatter under " +
                                     reg.name() + " regularization");
        }
        const double tol = 1e-12 * max_eig;
        Vector inv_eig = Vector::Zero(n);
        for (Index i = 0; i < n; ++i) {
            if (std::abs(es.eigenvalues(i)) > tol) inv_eig(i) = 1.0 / es.eigenvalues(i);
        }
        alpha = es.eigenvectors * (inv_eig.asDiagonal() * (es.eigenvectors.transpose() * rhs));
        model.pseudo_solve = true;
        if (!alpha.allFinite()) {
            throw std::runtime_error("kfda::train: solve failed under " + reg.name() +
                                     " regularization");
        }
    }
    model.alpha = std::move(alpha);
    model.train_data = ds.data;
    model.labels = ds.labels;

    // Projected class means and the midpoint threshold, computed with the
    // same kernel-sum loop prediction uses.
    double mu1 = 0.0, mu2 = 0.0;
    for (Index i : idx1) {
        mu1 += score_point(model.train_data.values, model.alpha, kernel,
                           model.train_data.values.row(i).transpose());
    }
    for (Index i : idx2) {
        mu2 += score_point(model.train_data.values, model.alpha, kernel,
                           model.train_data.values.row(i).transpose());
    }
    model.mean_score_1 = mu1 / static_cast<double>(idx1.size());
    model.mean_score_2 = mu2 / static_cast<double>(idx2.size());
    model.threshold = 0.5 * (model.mean_score_1 + model.mean_score_2);
    return model;
}

Vector project_serial(const KfdaModel& model, const DataMatrix& points) {
    if (points.q() != model.train_data.q()) {
        throw std::invalid_argument("kfda::project: point dimension mismatch");
    }
    Vector scores(points.n());
    for (Index r = 0; r < points.n(); ++r) {
        scores(r) = score_point(model.train_data.values, model.alpha, model.kernel,
                                points.values.row(r).transpose());
    }
    return scores;
}

Vector project(const KfdaModel& model, const DataMatrix& points) {
    if (points.q() != model.train_data.q()) {
        throw std::invalid_argument("kfda::project: point dimension mismatch");
    }
    Vector scores(points.n());
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < points.n(); ++r) {
        scores(r) = score_point(model.train_data.values, model.alpha, model.kernel,
                                points.values.row(r).transpose());
    }
    return scores;
}

std::vector<int> classify(const KfdaModel& model, const DataMatrix& points) {
    const Vector scores = project(model, points);
    const bool class1_above = model.mean_score_1 >= model.mean_score_2;
    std::vector<int> labels(static_cast<std::size_t>(points.n()));
    for (Index r = 0; r < points.n(); ++r) {
        const bool above = scores(r) > model.threshold;
        labels[static_cast<std::size_t>(r)] = (above == class1_above) ? 1 : 2;
    }
    return labels;
}

double misclassification_rate(const KfdaModel& model, const LabeledDataset& test) {
    const std::vector<int> predicted = classify(model, test.data);
    Index wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] != test.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

}  // namespace kshrink
