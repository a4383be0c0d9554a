#pragma once

#include <vector>

#include "kshrink/kernel.hpp"
#include "kshrink/shrinkage.hpp"

namespace kshrink {

// Two-class sample with labels in {1, 2}; both classes must be present.
struct LabeledDataset {
    DataMatrix data;
    std::vector<int> labels;

    Index n() const { return data.n(); }
    Index count(int label) const;
};

LabeledDataset make_labeled(DataMatrix data, std::vector<int> labels);

// Regularization of the within-class scatter N: the classic additive ridge
// N + lambda I, or the shrinkage form (1-lam^)N + lam^(Tr(N)/p)I with lam^
// estimated from the pooled centered kernel.
struct RegularizerSpec {
    enum class Kind { FixedRidge, Shrinkage };

    Kind kind = Kind::FixedRidge;
    double ridge = 1e-3;                    // FixedRidge, > 0
    FeatureDim p = FeatureDim::sample_size();  // Shrinkage

    static RegularizerSpec fixed_ridge(double lambda);
    static RegularizerSpec shrinkage(FeatureDim p = FeatureDim::sample_size());
    std::string name() const;
};

// Trained discriminant in dual form. Prediction is the plain weighted
// kernel sum score(x) = sum_i alpha_i k(x_i, x) against the stored
// training points; the threshold sits midway between the projected class
// means.
struct KfdaModel {
    Vector alpha;
    double threshold = 0.0;
    double mean_score_1 = 0.0;
    double mean_score_2 = 0.0;
    DataMatrix train_data;
    std::vector<int> labels;
    KernelSpec kernel;
    RegularizerSpec regularizer;
    double lambda_used = 0.0;   // the lambda actually applied
    bool shrinkage_degenerate = false;
    bool pseudo_solve = false;  // eigendecomposition fallback engaged
};

KfdaModel train(const LabeledDataset& ds, const KernelSpec& kernel, const RegularizerSpec& reg);

// Scores for a batch of points (parallel over points; order-independent).
Vector project(const KfdaModel& model, const DataMatrix& points);
Vector project_serial(const KfdaModel& model, const DataMatrix& points);

// Label = the class whose projected mean lies on the same side of the
// threshold as the point's score.
std::vector<int> classify(const KfdaModel& model, const DataMatrix& points);

double misclassification_rate(const KfdaModel& model, const LabeledDataset& test);

}  // namespace kshrink
