#include "kshrink/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace kshrink {

DataMatrix make_data(Matrix values) {
    if (values.rows() < 1 || values.cols() < 1) {
        throw std::invalid_argument("DataMatrix: need n >= 1 observations and q >= 1 dimensions");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("DataMatrix: entries must be finite");
    }
    return DataMatrix{std::move(values)};
}

KernelSpec KernelSpec::rbf(double sigma2) {
    KernelSpec s;
    s.kind = Kind::Rbf;
    s.sigma2 = sigma2;
    s.validate();
    return s;
}

KernelSpec KernelSpec::linear() {
    KernelSpec s;
    s.kind = Kind::Linear;
    return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
    KernelSpec s;
    s.kind = Kind::Polynomial;
    s.degree = degree;
    s.offset = offset;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (kind == Kind::Rbf && !(sigma2 > 0.0)) {
        throw std::invalid_argument("KernelSpec: RBF sigma2 must be > 0");
    }
    if (kind == Kind::Polynomial && degree < 1) {
        throw std::invalid_argument("KernelSpec: polynomial degree must be >= 1");
    }
    if (kind == Kind::Polynomial && offset < 0.0) {
        throw std::invalid_argument("KernelSpec: polynomial offset must be >= 0");
    }
}

std::string KernelSpec::name() const {
    switch (kind) {
        case Kind::Rbf: return "rbf";
        case Kind::Linear: return "linear";
        case Kind::Polynomial: return "polynomial";
    }
    return "unknown";
}

double kernel_eval(const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y, const KernelSpec& spec) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    }
    spec.validate();
    switch (spec.kind) {
        case KernelSpec::Kind::Rbf: {
            // Fused ||x-y||^2 loop; cannot go negative but clamp anyway.
            double d2 = (x - y).squaredNorm();
            if (d2 < 0.0) d2 = 0.0;
            return std::exp(-d2 / (2.0 * spec.sigma2));
        }
        case KernelSpec::Kind::Linear:
            return x.dot(y);
        case KernelSpec::Kind::Polynomial:
            return std::pow(x.dot(y) + spec.offset, static_cast<double>(spec.degree));
    }
    throw std::logic_error("kernel_eval: unreachable");
}

namespace {

// Upper triangle of row i, mirrored afterwards. Shared by the serial and
// parallel builders so both produce the same bits.
void gram_row(const Matrix& x, const KernelSpec& spec, Matrix& g, Index i) {
    const Index n = x.rows();
    for (Index j = i; j < n; ++j) {
        g(i, j) = kernel_eval(x.row(i).transpose(), x.row(j).transpose(), spec);
    }
}

void mirror_lower(Matrix& g) {
    const Index n = g.rows();
    for (Index i = 1; i < n; ++i) {
        for (Index j = 0; j < i; ++j) {
            g(i, j) = g(j, i);
        }
    }
}

}  // namespace

RawGram gram_matrix_serial(const DataMatrix& data, const KernelSpec& spec) {
    spec.validate();
    const Index n = data.n();
    Matrix g(n, n);
    for (Index i = 0; i < n; ++i) {
        gram_row(data.values, spec, g, i);
    }
    mirror_lower(g);
    return RawGram{std::move(g)};
}

RawGram gram_matrix(const DataMatrix& data, const KernelSpec& spec) {
    spec.validate();
    const Index n = data.n();
    Matrix g(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        gram_row(data.values, spec, g, i);
    }
    mirror_lower(g);
    return RawGram{std::move(g)};
}

Matrix cross_gram_serial(const DataMatrix& a, const DataMatrix& b, const KernelSpec& spec) {
    if (a.q() != b.q()) {
        throw std::invalid_argument("cross_gram: dimension mismatch");
    }
    Matrix c(a.n(), b.n());
    for (Index i = 0; i < a.n(); ++i) {
        for (Index j = 0; j < b.n(); ++j) {
            c(i, j) = kernel_eval(a.values.row(i).transpose(), b.values.row(j).transpose(), spec);
        }
    }
    return c;
}

Matrix cross_gram(const DataMatrix& a, const DataMatrix& b, const KernelSpec& spec) {
    if (a.q() != b.q()) {
        throw std::invalid_argument("cross_gram: dimension mismatch");
    }
    Matrix c(a.n(), b.n());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < a.n(); ++i) {
        for (Index j = 0; j < b.n(); ++j) {
            c(i, j) = kernel_eval(a.values.row(i).transpose(), b.values.row(j).transpose(), spec);
        }
    }
    return c;
}

KernelMatrix center_gram(const RawGram& raw) {
    const Index n = raw.n();
    if (n < 2) {
        throw std::invalid_argument("center_gram: centering requires n >= 2");
    }
    const Matrix& g = raw.values;

    // K = G - 1/n 1G - 1/n G1 + 1/n^2 1G1, then (K + K^T)/2 to kill
    // rounding drift before eigendecomposition.
    const Vector col_mean = g.colwise().mean();
    const Vector row_mean = g.rowwise().mean();
    const double grand_mean = g.mean();
    Matrix k = g;
    k.colwise() -= row_mean;
    k.rowwise() -= col_mean.transpose();
    k.array() += grand_mean;
    k = 0.5 * (k + k.transpose()).eval();

    const double norm = k.norm();
    const double tol = 1e-8 * norm;

    const double max_row_sum = k.rowwise().sum().cwiseAbs().maxCoeff();
    if (max_row_sum > tol && norm > 0.0) {
        throw std::runtime_error("center_gram: row sums exceed centering tolerance");
    }

    // Negative eigenvalues within -1e-8*||K||_F are rounding noise; beyond
    // that the input was not a valid kernel.
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("center_gram: eigenvalue computation failed");
    }
    if (es.eigenvalues().minCoeff() < -tol) {
        throw std::runtime_error("center_gram: matrix is not positive semidefinite within tolerance");
    }

    return KernelMatrix{std::move(k)};
}

EigSystem sym_eigendecompose(const Eigen::Ref<const Matrix>& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("sym_eigendecompose: matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument("sym_eigendecompose: entries must be finite");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("sym_eigendecompose: solver did not converge");
    }
    // Eigen returns ascending order; flip to descending.
    const Index n = m.rows();
    EigSystem sys;
    sys.eigenvalues = es.eigenvalues().reverse();
    sys.eigenvectors.resize(n, n);
    for (Index j = 0; j < n; ++j) {
        sys.eigenvectors.col(j) = es.eigenvectors().col(n - 1 - j);
    }
    return sys;
}

}  // namespace kshrink
