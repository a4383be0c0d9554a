#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kshrink/experiments.hpp"
#include "kshrink/kfda.hpp"
#include "test_support.hpp"

using namespace kshrink;
using namespace kshrink::testing;

namespace {

LabeledDataset separated_classes(int per_class, double spread, std::uint64_t seed) {
    Rng rng(seed);
    Matrix data(2 * per_class, 2);
    std::vector<int> labels(static_cast<std::size_t>(2 * per_class));
    for (int i = 0; i < per_class; ++i) {
        data(i, 0) = 5.0 + spread * rng.normal();
        data(i, 1) = 5.0 + spread * rng.normal();
        labels[static_cast<std::size_t>(i)] = 1;
        data(per_class + i, 0) = -5.0 + spread * rng.normal();
        data(per_class + i, 1) = -5.0 + spread * rng.normal();
        labels[static_cast<std::size_t>(per_class + i)] = 2;
    }
    return make_labeled(make_data(std::move(data)), std::move(labels));
}

}  // namespace

TEST_CASE("well-separated classes train to zero training error") {
    const LabeledDataset ds = separated_classes(10, 0.01, 301);
    const KernelSpec rbf = KernelSpec::rbf(0.1);
    for (auto reg : {RegularizerSpec::fixed_ridge(1e-3), RegularizerSpec::shrinkage()}) {
        const KfdaModel model = train(ds, rbf, reg);
        CHECK(misclassification_rate(model, ds) == 0.0);
    }
}

TEST_CASE("one point per class: threshold midway, points classified to own class") {
    Matrix data(2, 2);
    data << 0.0, 0.0, 1.0, 0.0;
    const LabeledDataset ds = make_labeled(make_data(data), {1, 2});
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::fixed_ridge(1e-3));

    const Vector scores = project(model, ds.data);
    CHECK(model.threshold == doctest::Approx(0.5 * (scores(0) + scores(1))).epsilon(1e-12));
    const std::vector<int> pred = classify(model, ds.data);
    CHECK(pred[0] == 1);
    CHECK(pred[1] == 2);

    // Shrinkage needs n >= 3 and two observations per class.
    CHECK_THROWS_AS(train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage()),
                    std::invalid_argument);
}

TEST_CASE("reference dataset at n_g = 5 is perfectly separated in train space") {
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL, 15ULL}) {
        const LabeledDataset ds = generate_two_class(5, seed);
        const KernelSpec rbf = KernelSpec::rbf(0.1);
        for (auto reg : {RegularizerSpec::fixed_ridge(1e-3), RegularizerSpec::shrinkage()}) {
            CHECK(misclassification_rate(train(ds, rbf, reg), ds) == 0.0);
        }
    }
}

TEST_CASE("projecting the training set reproduces the threshold construction") {
    const LabeledDataset ds = generate_two_class(6, 401);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());
    const Vector scores = project(model, ds.data);

    double mu1 = 0.0, mu2 = 0.0;
    Index n1 = 0, n2 = 0;
    for (Index i = 0; i < ds.n(); ++i) {
        if (ds.labels[static_cast<std::size_t>(i)] == 1) {
            mu1 += scores(i);
            ++n1;
        } else {
            mu2 += scores(i);
            ++n2;
        }
    }
    mu1 /= static_cast<double>(n1);
    mu2 /= static_cast<double>(n2);
    CHECK(mu1 == doctest::Approx(model.mean_score_1).epsilon(1e-13));
    CHECK(mu2 == doctest::Approx(model.mean_score_2).epsilon(1e-13));
    CHECK(model.threshold == doctest::Approx(0.5 * (mu1 + mu2)).epsilon(1e-13));
    // Threshold lies between the projected class means.
    CHECK(model.threshold <= std::max(mu1, mu2));
    CHECK(model.threshold >= std::min(mu1, mu2));
}

TEST_CASE("score is invariant to permuting training points together with alpha") {
    const LabeledDataset ds = generate_two_class(4, 403);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::fixed_ridge(1e-3));

    // Permute rows of the stored training data together with alpha.
    KfdaModel permuted = model;
    std::vector<Index> order(static_cast<std::size_t>(ds.n()));
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    for (Index i = 0; i < ds.n(); ++i) {
        permuted.train_data.values.row(i) = model.train_data.values.row(order[static_cast<std::size_t>(i)]);
        permuted.alpha(i) = model.alpha(order[static_cast<std::size_t>(i)]);
    }

    const DataMatrix probe = random_dataset(7, 2, 405);
    const Vector a = project(model, probe);
    const Vector b = project(permuted, probe);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("projection over a grid stays finite and bounded") {
    const LabeledDataset ds = generate_two_class(5, 407);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());

    const int res = 21;
    Matrix pts(res * res, 2);
    Index r = 0;
    for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix, ++r) {
            pts(r, 0) = -1.0 + 2.0 * ix / (res - 1);
            pts(r, 1) = -1.0 + 2.0 * iy / (res - 1);
        }
    const Vector scores = project(model, DataMatrix{pts});
    CHECK(scores.allFinite());
    // Kernel sums are bounded by ||alpha||_1 for an RBF kernel.
    CHECK(scores.cwiseAbs().maxCoeff() <= model.alpha.cwiseAbs().sum() + 1e-12);
}

TEST_CASE("project and classify reject dimension mismatches") {
    const LabeledDataset ds = generate_two_class(4, 409);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::fixed_ridge(1e-3));
    const DataMatrix wrong = random_dataset(3, 5, 411);
    CHECK_THROWS_AS(project(model, wrong), std::invalid_argument);
    CHECK_THROWS_AS(classify(model, wrong), std::invalid_argument);
}

TEST_CASE("classifying a point at a training location recovers its class") {
    const LabeledDataset ds = separated_classes(8, 0.05, 413);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::fixed_ridge(1e-3));
    Matrix probe(1, 2);
    probe << 5.0, 5.0;  // class-1 center
    CHECK(classify(model, DataMatrix{probe})[0] == 1);
    probe << -5.0, -5.0;
    CHECK(classify(model, DataMatrix{probe})[0] == 2);
}

TEST_CASE("kernel scaling invariance of decisions") {
    // Linear kernel scaled by c = data scaled by sqrt(c).
    const double c = 7.3;
    Rng rng(417);
    Matrix base(12, 3);
    for (Index i = 0; i < 12; ++i)
        for (Index j = 0; j < 3; ++j) base(i, j) = rng.normal() + (i < 6 ? 1.0 : -1.0);
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) labels[static_cast<std::size_t>(i)] = i < 6 ? 1 : 2;

    const LabeledDataset ds = make_labeled(make_data(base), labels);
    const LabeledDataset scaled = make_labeled(make_data(std::sqrt(c) * base), labels);
    const DataMatrix probe = random_dataset(50, 3, 419);
    const DataMatrix probe_scaled = make_data(std::sqrt(c) * probe.values);

    // Shrinkage: lambda_hat is scale invariant, so labels match exactly.
    {
        const KfdaModel m1 = train(ds, KernelSpec::linear(), RegularizerSpec::shrinkage());
        const KfdaModel m2 = train(scaled, KernelSpec::linear(), RegularizerSpec::shrinkage());
        CHECK(m1.lambda_used == doctest::Approx(m2.lambda_used).epsilon(1e-10));
        CHECK(classify(m1, probe) == classify(m2, probe_scaled));
    }
    // Fixed ridge: N scales by c^2, so the ridge must follow.
    {
        const KfdaModel m1 = train(ds, KernelSpec::linear(), RegularizerSpec::fixed_ridge(1e-3));
        const KfdaModel m2 =
            train(scaled, KernelSpec::linear(), RegularizerSpec::fixed_ridge(1e-3 * c * c));
        CHECK(classify(m1, probe) == classify(m2, probe_scaled));
    }
}

TEST_CASE("shrinkage lambda_used is in [0,1] and mostly positive at small n_g") {
    int positive = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const LabeledDataset ds = generate_two_class(10, derive_seed(421, seed));
        const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());
        CHECK(model.lambda_used >= 0.0);
        CHECK(model.lambda_used <= 1.0);
        if (model.lambda_used > 0.0) ++positive;
    }
    CHECK(positive >= 95);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const LabeledDataset ds = generate_two_class(7, 431);
    const KfdaModel a = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());
    const KfdaModel b = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());
    CHECK((a.alpha.array() == b.alpha.array()).all());
    CHECK(a.threshold == b.threshold);
    CHECK(a.lambda_used == b.lambda_used);

    const DataMatrix probe = random_dataset(20, 2, 433);
    const Vector s1 = project(a, probe);
    const Vector s2 = project(b, probe);
    CHECK((s1.array() == s2.array()).all());
}

TEST_CASE("project parallel path is bit-identical to serial") {
    const LabeledDataset ds = generate_two_class(9, 437);
    const KfdaModel model = train(ds, KernelSpec::rbf(0.1), RegularizerSpec::shrinkage());
    const DataMatrix probe = random_dataset(999, 2, 439);
    const Vector par = project(model, probe);
    const Vector ser = project_serial(model, probe);
    CHECK((par.array() == ser.array()).all());
}

TEST_CASE("labeled dataset validation") {
    Matrix d(2, 1);
    d << 0.0, 1.0;
    CHECK_THROWS_AS(make_labeled(make_data(d), {1, 1}), std::invalid_argument);  // one class
    CHECK_THROWS_AS(make_labeled(make_data(d), {1, 3}), std::invalid_argument);  // bad label
    CHECK_THROWS_AS(make_labeled(make_data(d), {1}), std::invalid_argument);     // count mismatch
    CHECK_THROWS_AS(RegularizerSpec::fixed_ridge(0.0), std::invalid_argument);
}
