#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kshrink/kfda.hpp"
#include "kshrink/stats.hpp"

namespace kshrink {

// Configuration of the two-Gaussian-vs-one-Gaussian sweep. Defaults mirror
// the reference experiment: n_g from 3 to 30, 100 repetitions, RBF
// sigma^2 = 0.1, fixed ridge 1e-3.
struct ExperimentConfig {
    int ng_min = 3;
    int ng_max = 30;
    int repetitions = 100;
    double sigma2 = 0.1;
    double fixed_lambda = 1e-3;
    int test_per_component = 500;
    std::uint64_t seed = 0;
    FeatureDim p = FeatureDim::sample_size();
    std::string output_dir;

    void validate() const;
};

struct TrialResult {
    double rate_fixed = 0.0;      // fixed-ridge KFDA misclassification rate
    double rate_shrinkage = 0.0;  // shrinkage KFDA misclassification rate
    double lambda_hat = 0.0;      // estimated shrinkage coefficient
    std::uint64_t seed = 0;       // trial seed (derived from master, ng, rep)
};

struct NgSummary {
    int ng = 0;
    std::vector<TrialResult> trials;  // one per repetition, in order
    double mean_rate_fixed = 0.0;
    double mean_rate_shrinkage = 0.0;
    double mean_lambda = 0.0;
    double std_lambda = 0.0;  // sample standard deviation
    TTestResult ttest;        // paired across repetitions, fixed vs shrinkage
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<NgSummary> per_ng;
    TTestResult pooled_ttest;  // across all (ng, repetition) pairs

    bool operator==(const ExperimentReport& other) const;
};

// Class 1: n_g points from each of N((-0.5,-0.2), 0.1^2 I) and
// N((0.5,0), 0.1^2 I); class 2: n_g points from N((0,0), 0.1^2 I).
// Deterministic for a given seed.
LabeledDataset generate_two_class(int ng, std::uint64_t seed);

// Trains both regularizers on a fresh train set and scores them on an
// independent test set of test_per_component points per mixture component.
TrialResult run_trial(int ng, const ExperimentConfig& cfg, std::uint64_t seed);

// Full sweep; trials run independently (parallel) and are aggregated in
// deterministic (ng, repetition) order. A failing trial aborts the sweep
// with its seed named.
ExperimentReport run_sweep(const ExperimentConfig& cfg);

// Lossless text round-trip: write_report then read_report reproduces the
// report exactly, and equal reports serialize to identical bytes.
void write_report(const ExperimentReport& report, std::ostream& out);
ExperimentReport read_report(std::istream& in);

// report.txt plus summary.csv / trials.csv under dir.
void export_report_files(const ExperimentReport& report, const std::string& dir);

struct GridSpec {
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
    int nx = 200, ny = 200;
};

// CSV rows (x, y, score, label), row-major with x varying fastest.
void export_boundary_grid(const KfdaModel& model, const GridSpec& grid, std::ostream& out);
void export_boundary_grid_file(const KfdaModel& model, const GridSpec& grid,
                               const std::string& path);

}  // namespace kshrink
