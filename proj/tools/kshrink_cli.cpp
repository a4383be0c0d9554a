// Experiment CLI: sweep / trial / boundary / ttest subcommands around the
// kernel-shrinkage library.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kshrink/experiments.hpp"

namespace {

kshrink::FeatureDim parse_feature_dim(long p_value, const std::string& p_policy) {
    if (p_value > 0) return kshrink::FeatureDim::finite(p_value);
    if (p_policy == "n") return kshrink::FeatureDim::sample_size();
    throw CLI::ValidationError("--p-policy", "unknown policy '" + p_policy + "' (only 'n')");
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

// Two-column CSV (header optional) into paired samples.
void read_pairs(const std::string& path, std::vector<double>& a, std::vector<double>& b) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("expected two columns: " + line);
        try {
            const double x = std::stod(line.substr(0, comma));
            const double y = std::stod(line.substr(comma + 1));
            a.push_back(x);
            b.push_back(y);
        } catch (const std::invalid_argument&) {
            continue;  // header row
        }
    }
}

void print_ttest(const kshrink::TTestResult& t) {
    std::printf("t = %.10g\ndof = %ld\np_value = %.10g\nreject_at_99 = %s\n", t.t_statistic,
                t.degrees_of_freedom, t.p_value, t.reject_at_99 ? "yes" : "no");
    if (t.infinite_t) std::printf("note: zero variance with nonzero mean difference\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-matrix regularization via covariance shrinkage: experiment harness"};
    app.require_subcommand(1);

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "Run the full n_g sweep and write report files");
    kshrink::ExperimentConfig cfg;
    long p_value = 0;
    std::string p_policy = "n";
    std::string out_dir = "results";
    sweep->add_option("--ng-min", cfg.ng_min, "Smallest n_g (>= 3)")->capture_default_str();
    sweep->add_option("--ng-max", cfg.ng_max, "Largest n_g")->capture_default_str();
    sweep->add_option("--reps", cfg.repetitions, "Repetitions per n_g")->capture_default_str();
    sweep->add_option("--sigma2", cfg.sigma2, "RBF bandwidth sigma^2")->capture_default_str();
    sweep->add_option("--fixed-lambda", cfg.fixed_lambda, "Baseline ridge")->capture_default_str();
    sweep->add_option("--p", p_value, "Explicit feature-space dimension p");
    sweep->add_option("--p-policy", p_policy, "Policy for implicit p ('n' = sample size)")
        ->capture_default_str();
    sweep->add_option("--test-per-component", cfg.test_per_component,
                      "Test points per mixture component")
        ->capture_default_str();
    sweep->add_option("--seed", cfg.seed, "Master seed (required: no silent nondeterminism)")
        ->required();
    sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();

    // --- trial ---
    auto* trial = app.add_subcommand("trial", "Run a single train/test trial and print the rates");
    int trial_ng = 5;
    std::uint64_t trial_seed = 0;
    trial->add_option("--ng", trial_ng, "Training observations per Gaussian")->required();
    trial->add_option("--seed", trial_seed, "Trial seed")->required();
    trial->add_option("--sigma2", cfg.sigma2, "RBF bandwidth sigma^2")->capture_default_str();
    trial->add_option("--fixed-lambda", cfg.fixed_lambda, "Baseline ridge")->capture_default_str();
    trial->add_option("--p", p_value, "Explicit feature-space dimension p");
    trial->add_option("--p-policy", p_policy, "Policy for implicit p")->capture_default_str();
    trial->add_option("--test-per-component", cfg.test_per_component,
                      "Test points per mixture component")
        ->capture_default_str();

    // --- boundary ---
    auto* boundary =
        app.add_subcommand("boundary", "Train one model and export a decision grid as CSV");
    int b_ng = 5;
    std::uint64_t b_seed = 0;
    std::string b_reg = "shrinkage";
    int grid_res = 200;
    std::vector<double> bounds = {-1.0, 1.0, -1.0, 1.0};
    std::string b_out = "boundary.csv";
    boundary->add_option("--ng", b_ng, "Training observations per Gaussian")->required();
    boundary->add_option("--seed", b_seed, "Data seed")->required();
    boundary->add_option("--reg", b_reg, "Regularizer: fixed | shrinkage")->capture_default_str();
    boundary->add_option("--sigma2", cfg.sigma2, "RBF bandwidth sigma^2")->capture_default_str();
    boundary->add_option("--fixed-lambda", cfg.fixed_lambda, "Baseline ridge")
        ->capture_default_str();
    boundary->add_option("--p", p_value, "Explicit feature-space dimension p");
    boundary->add_option("--p-policy", p_policy, "Policy for implicit p")->capture_default_str();
    boundary->add_option("--grid-res", grid_res, "Grid resolution per axis")->capture_default_str();
    boundary->add_option("--bounds", bounds, "Rectangle: x_min x_max y_min y_max")
        ->expected(4);
    boundary->add_option("--out", b_out, "Output CSV path")->capture_default_str();

    // --- ttest ---
    auto* ttest = app.add_subcommand("ttest", "Paired t-test on two samples");
    std::string a_csv, b_csv, pair_file;
    ttest->add_option("--a", a_csv, "Comma-separated sample A");
    ttest->add_option("--b", b_csv, "Comma-separated sample B");
    ttest->add_option("file", pair_file, "CSV file with two columns (A,B)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            cfg.p = parse_feature_dim(p_value, p_policy);
            cfg.output_dir = out_dir;
            const kshrink::ExperimentReport report = kshrink::run_sweep(cfg);
            kshrink::export_report_files(report, out_dir);
            std::printf("wrote %s/report.txt, summary.csv, trials.csv\n", out_dir.c_str());
            std::printf("pooled paired t-test: t = %.4f, p = %.3g, reject at 99%%: %s\n",
                        report.pooled_ttest.t_statistic, report.pooled_ttest.p_value,
                        report.pooled_ttest.reject_at_99 ? "yes" : "no");
        } else if (*trial) {
            cfg.p = parse_feature_dim(p_value, p_policy);
            const kshrink::TrialResult r = kshrink::run_trial(trial_ng, cfg, trial_seed);
            std::printf("ng = %d\nrate_fixed = %.6f\nrate_shrinkage = %.6f\nlambda_hat = %.6f\n",
                        trial_ng, r.rate_fixed, r.rate_shrinkage, r.lambda_hat);
        } else if (*boundary) {
            const kshrink::FeatureDim p = parse_feature_dim(p_value, p_policy);
            kshrink::RegularizerSpec reg;
            if (b_reg == "fixed") {
                reg = kshrink::RegularizerSpec::fixed_ridge(cfg.fixed_lambda);
            } else if (b_reg == "shrinkage") {
                reg = kshrink::RegularizerSpec::shrinkage(p);
            } else {
                throw std::runtime_error("--reg must be 'fixed' or 'shrinkage'");
            }
            const kshrink::LabeledDataset ds = kshrink::generate_two_class(b_ng, b_seed);
            const kshrink::KfdaModel model =
                kshrink::train(ds, kshrink::KernelSpec::rbf(cfg.sigma2), reg);
            kshrink::GridSpec grid;
            grid.x_min = bounds[0];
            grid.x_max = bounds[1];
            grid.y_min = bounds[2];
            grid.y_max = bounds[3];
            grid.nx = grid.ny = grid_res;
            kshrink::export_boundary_grid_file(model, grid, b_out);
            std::printf("wrote %s (%dx%d grid, %s regularizer, lambda = %.6f)\n", b_out.c_str(),
                        grid_res, grid_res, reg.name().c_str(), model.lambda_used);
        } else if (*ttest) {
            std::vector<double> a, b;
            if (!pair_file.empty()) {
                read_pairs(pair_file, a, b);
            } else {
                a = parse_values(a_csv);
                b = parse_values(b_csv);
            }
            print_ttest(kshrink::paired_t_test(a, b));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
