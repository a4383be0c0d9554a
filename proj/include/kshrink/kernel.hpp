#pragma once

#include <Eigen/Dense>
#include <string>

namespace kshrink {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Input sample: one observation per row, n x q.
struct DataMatrix {
    Matrix values;

    Index n() const { return values.rows(); }
    Index q() const { return values.cols(); }
};

// Validates n >= 1, q >= 1, all entries finite.
DataMatrix make_data(Matrix values);

// Kernel function k(.,.). RBF is the one the classifier uses; Linear and
// Polynomial have explicit finite feature maps and exist so the
// kernel-domain formulas can be cross-checked against feature-space
// computations.
struct KernelSpec {
    enum class Kind { Rbf, Linear, Polynomial };

    Kind kind = Kind::Rbf;
    double sigma2 = 1.0;  // Rbf bandwidth, > 0
    int degree = 1;       // Polynomial, >= 1
    double offset = 0.0;  // Polynomial, >= 0

    static KernelSpec rbf(double sigma2);
    static KernelSpec linear();
    static KernelSpec polynomial(int degree, double offset = 0.0);

    std::string name() const;
    void validate() const;
};

// Uncentered Gram matrix G[i][j] = k(x_i, x_j). Exactly symmetric: each
// unordered pair is evaluated once and mirrored.
struct RawGram {
    Matrix values;

    Index n() const { return values.rows(); }
};

// Centered kernel matrix K = H G H with H = I - ones/n. Symmetric, PSD up
// to -1e-8*||K||_F, zero row sums, rank <= n-1.
struct KernelMatrix {
    Matrix values;

    Index n() const { return values.rows(); }
    double trace() const { return values.trace(); }
    double squared_norm() const { return values.squaredNorm(); }
    double frobenius_norm() const { return values.norm(); }
};

// Eigenvalues sorted descending; eigenvector column j pairs with
// eigenvalue j.
struct EigSystem {
    Vector eigenvalues;
    Matrix eigenvectors;
};

double kernel_eval(const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y, const KernelSpec& spec);

// Parallel over row blocks; entries are independent so the result is
// bit-identical to gram_matrix_serial.
RawGram gram_matrix(const DataMatrix& data, const KernelSpec& spec);
RawGram gram_matrix_serial(const DataMatrix& data, const KernelSpec& spec);

// Rectangular block C[i][j] = k(a_i, b_j), used for prediction.
Matrix cross_gram(const DataMatrix& a, const DataMatrix& b, const KernelSpec& spec);
Matrix cross_gram_serial(const DataMatrix& a, const DataMatrix& b, const KernelSpec& spec);

// K = H G H, re-symmetrized as (K + K^T)/2. Throws if n < 2 (centering
// annihilates a single point) or if the result fails the PSD tolerance.
KernelMatrix center_gram(const RawGram& raw);

// Symmetric eigendecomposition, eigenvalues descending. Throws on
// non-finite input.
EigSystem sym_eigendecompose(const Eigen::Ref<const Matrix>& m);

}  // namespace kshrink
