#include "kshrink/experiments.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kshrink/rng.hpp"

namespace kshrink {

namespace {

// %.17g round-trips IEEE doubles exactly through strtod.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_u64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    return v;
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;

}  // namespace

void ExperimentConfig::validate() const {
    if (ng_min < 3) throw std::invalid_argument("ExperimentConfig: ng_min must be >= 3");
    if (ng_max < ng_min) throw std::invalid_argument("ExperimentConfig: ng_max must be >= ng_min");
    if (repetitions < 2) throw std::invalid_argument("ExperimentConfig: repetitions must be >= 2");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("ExperimentConfig: sigma2 must be > 0");
    if (!(fixed_lambda > 0.0)) throw std::invalid_argument("ExperimentConfig: fixed_lambda must be > 0");
    if (test_per_component < 1) {
        throw std::invalid_argument("ExperimentConfig: test_per_component must be >= 1");
    }
}

LabeledDataset generate_two_class(int ng, std::uint64_t seed) {
    if (ng < 1) throw std::invalid_argument("generate_two_class: ng must be >= 1");
    Rng rng(seed);
    const double sd = 0.1;
    const double centers[3][2] = {{-0.5, -0.2}, {0.5, 0.0}, {0.0, 0.0}};

    Matrix data(3 * ng, 2);
    std::vector<int> labels(static_cast<std::size_t>(3 * ng));
    Index row = 0;
    for (int comp = 0; comp < 3; ++comp) {
        for (int i = 0; i < ng; ++i, ++row) {
            data(row, 0) = centers[comp][0] + sd * rng.normal();
            data(row, 1) = centers[comp][1] + sd * rng.normal();
            labels[static_cast<std::size_t>(row)] = comp < 2 ? 1 : 2;
        }
    }
    return make_labeled(make_data(std::move(data)), std::move(labels));
}

TrialResult run_trial(int ng, const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const LabeledDataset train_set = generate_two_class(ng, derive_seed(seed, kTrainStream));
    const LabeledDataset test_set =
        generate_two_class(cfg.test_per_component, derive_seed(seed, kTestStream));
    const KernelSpec kernel = KernelSpec::rbf(cfg.sigma2);

    const KfdaModel fixed = train(train_set, kernel, RegularizerSpec::fixed_ridge(cfg.fixed_lambda));
    const KfdaModel shrunk = train(train_set, kernel, RegularizerSpec::shrinkage(cfg.p));

    TrialResult res;
    res.rate_fixed = misclassification_rate(fixed, test_set);
    res.rate_shrinkage = misclassification_rate(shrunk, test_set);
    res.lambda_hat = shrunk.lambda_used;
    res.seed = seed;
    return res;
}

ExperimentReport run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n_ngs = cfg.ng_max - cfg.ng_min + 1;
    const long total = static_cast<long>(n_ngs) * cfg.repetitions;

    std::vector<TrialResult> results(static_cast<std::size_t>(total));
    std::vector<std::string> errors(static_cast<std::size_t>(total));

    // Trials are independent; results land in per-trial slots so the
    // aggregation below never depends on scheduling.
#pragma omp parallel for schedule(dynamic)
    for (long flat = 0; flat < total; ++flat) {
        const int ng = cfg.ng_min + static_cast<int>(flat / cfg.repetitions);
        const int rep = static_cast<int>(flat % cfg.repetitions);
        const std::uint64_t trial_seed =
            derive_seed(cfg.seed, static_cast<std::uint64_t>(ng), static_cast<std::uint64_t>(rep));
        try {
            results[static_cast<std::size_t>(flat)] = run_trial(ng, cfg, trial_seed);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(flat)] =
                "trial ng=" + std::to_string(ng) + " rep=" + std::to_string(rep) +
                " seed=" + fmt_u64(trial_seed) + " failed: " + e.what();
        }
    }
    for (const std::string& err : errors) {
        if (!err.empty()) throw std::runtime_error("run_sweep: " + err);
    }

    ExperimentReport report;
    report.config = cfg;
    report.per_ng.reserve(static_cast<std::size_t>(n_ngs));

    std::vector<double> pooled_fixed, pooled_shrinkage;
    pooled_fixed.reserve(static_cast<std::size_t>(total));
    pooled_shrinkage.reserve(static_cast<std::size_t>(total));

    for (int k = 0; k < n_ngs; ++k) {
        NgSummary s;
        s.ng = cfg.ng_min + k;
        std::vector<double> rf, rs, lams;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            const TrialResult& t = results[static_cast<std::size_t>(k) * cfg.repetitions + rep];
            s.trials.push_back(t);
            rf.push_back(t.rate_fixed);
            rs.push_back(t.rate_shrinkage);
            lams.push_back(t.lambda_hat);
            pooled_fixed.push_back(t.rate_fixed);
            pooled_shrinkage.push_back(t.rate_shrinkage);
        }
        s.mean_rate_fixed = mean_of(rf);
        s.mean_rate_shrinkage = mean_of(rs);
        s.mean_lambda = mean_of(lams);
        s.std_lambda = sample_std(lams, s.mean_lambda);
        s.ttest = paired_t_test(rf, rs);
        report.per_ng.push_back(std::move(s));
    }
    report.pooled_ttest = paired_t_test(pooled_fixed, pooled_shrinkage);
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

namespace {

void write_ttest(std::ostream& out, const TTestResult& t) {
    out << "t = " << fmt_double(t.t_statistic) << "\n";
    out << "dof = " << t.degrees_of_freedom << "\n";
    out << "p_value = " << fmt_double(t.p_value) << "\n";
    out << "reject_at_99 = " << (t.reject_at_99 ? 1 : 0) << "\n";
    out << "infinite_t = " << (t.infinite_t ? 1 : 0) << "\n";
}

struct KeyValueBlock {
    std::vector<std::pair<std::string, std::string>> pairs;

    const std::string& get(const std::string& key) const {
        for (const auto& [k, v] : pairs) {
            if (k == key) return v;
        }
        throw std::runtime_error("report: missing key '" + key + "'");
    }
};

TTestResult parse_ttest(const KeyValueBlock& kv) {
    TTestResult t;
    t.t_statistic = parse_double(kv.get("t"));
    t.degrees_of_freedom = std::stol(kv.get("dof"));
    t.p_value = parse_double(kv.get("p_value"));
    t.reject_at_99 = kv.get("reject_at_99") == "1";
    t.infinite_t = kv.get("infinite_t") == "1";
    return t;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_report(const ExperimentReport& report, std::ostream& out) {
    const ExperimentConfig& c = report.config;
    out << "# kernel shrinkage sweep report\n";
    out << "format = 1\n";
    out << "seed = " << fmt_u64(c.seed) << "\n";
    out << "ng_min = " << c.ng_min << "\n";
    out << "ng_max = " << c.ng_max << "\n";
    out << "repetitions = " << c.repetitions << "\n";
    out << "sigma2 = " << fmt_double(c.sigma2) << "\n";
    out << "fixed_lambda = " << fmt_double(c.fixed_lambda) << "\n";
    out << "test_per_component = " << c.test_per_component << "\n";
    if (c.p.is_finite()) {
        out << "p = " << c.p.resolve(1) << "\n";
    } else {
        out << "p_policy = n\n";
    }
    out << "output_dir = " << c.output_dir << "\n";
    out << "\n[pooled]\n";
    write_ttest(out, report.pooled_ttest);
    for (const NgSummary& s : report.per_ng) {
        out << "\n[ng " << s.ng << "]\n";
        out << "mean_rate_fixed = " << fmt_double(s.mean_rate_fixed) << "\n";
        out << "mean_rate_shrinkage = " << fmt_double(s.mean_rate_shrinkage) << "\n";
        out << "mean_lambda_hat = " << fmt_double(s.mean_lambda) << "\n";
        out << "std_lambda_hat = " << fmt_double(s.std_lambda) << "\n";
        write_ttest(out, s.ttest);
        out << "trials = " << s.trials.size() << "\n";
        out << "rep,seed,rate_fixed,rate_shrinkage,lambda_hat\n";
        for (std::size_t rep = 0; rep < s.trials.size(); ++rep) {
            const TrialResult& t = s.trials[rep];
            out << rep << "," << fmt_u64(t.seed) << "," << fmt_double(t.rate_fixed) << ","
                << fmt_double(t.rate_shrinkage) << "," << fmt_double(t.lambda_hat) << "\n";
        }
    }
}

ExperimentReport read_report(std::istream& in) {
    ExperimentReport report;
    std::string line;
    std::string section;  // "", "pooled", or "ng <k>"
    KeyValueBlock kv;
    NgSummary current;
    bool in_ng = false;
    long trials_expected = 0;

    auto flush_section = [&]() {
        if (section == "pooled") {
            report.pooled_ttest = parse_ttest(kv);
        } else if (in_ng) {
            current.mean_rate_fixed = parse_double(kv.get("mean_rate_fixed"));
            current.mean_rate_shrinkage = parse_double(kv.get("mean_rate_shrinkage"));
            current.mean_lambda = parse_double(kv.get("mean_lambda_hat"));
            current.std_lambda = parse_double(kv.get("std_lambda_hat"));
            current.ttest = parse_ttest(kv);
            if (static_cast<long>(current.trials.size()) != trials_expected) {
                throw std::runtime_error("report: trial row count mismatch in [ng " +
                                         std::to_string(current.ng) + "]");
            }
            report.per_ng.push_back(std::move(current));
            current = NgSummary{};
            in_ng = false;
        } else if (!kv.pairs.empty()) {
            ExperimentConfig c;
            c.seed = std::stoull(kv.get("seed"));
            c.ng_min = std::stoi(kv.get("ng_min"));
            c.ng_max = std::stoi(kv.get("ng_max"));
            c.repetitions = std::stoi(kv.get("repetitions"));
            c.sigma2 = parse_double(kv.get("sigma2"));
            c.fixed_lambda = parse_double(kv.get("fixed_lambda"));
            c.test_per_component = std::stoi(kv.get("test_per_component"));
            bool have_p = false;
            for (const auto& [k, v] : kv.pairs) {
                if (k == "p") {
                    c.p = FeatureDim::finite(std::stol(v));
                    have_p = true;
                } else if (k == "p_policy") {
                    if (v != "n") throw std::runtime_error("report: unknown p_policy '" + v + "'");
                    c.p = FeatureDim::sample_size();
                    have_p = true;
                } else if (k == "output_dir") {
                    c.output_dir = v;
                }
            }
            if (!have_p) throw std::runtime_error("report: missing p / p_policy");
            report.config = c;
        }
        kv.pairs.clear();
    };

    bool reading_trials = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            flush_section();
            reading_trials = false;
            section = line.substr(1, line.size() - 2);
            if (section.rfind("ng ", 0) == 0) {
                in_ng = true;
                current.ng = std::stoi(section.substr(3));
            }
            continue;
        }
        if (reading_trials) {
            if (line.rfind("rep,", 0) == 0) continue;  // table header
            const auto cells = split_csv(line);
            if (cells.size() != 5) throw std::runtime_error("report: malformed trial row: " + line);
            TrialResult t;
            t.seed = std::stoull(cells[1]);
            t.rate_fixed = parse_double(cells[2]);
            t.rate_shrinkage = parse_double(cells[3]);
            t.lambda_hat = parse_double(cells[4]);
            current.trials.push_back(t);
            continue;
        }
        const std::size_t eq = line.find(" = ");
        if (eq == std::string::npos) {
            throw std::runtime_error("report: malformed line: " + line);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 3);
        kv.pairs.emplace_back(key, value);
        if (key == "trials") {
            trials_expected = std::stol(value);
            reading_trials = true;
        }
    }
    flush_section();
    return report;
}

namespace {

bool ttest_equal(const TTestResult& a, const TTestResult& b) {
    const bool t_same = (a.t_statistic == b.t_statistic) ||
                        (std::isinf(a.t_statistic) && std::isinf(b.t_statistic) &&
                         std::signbit(a.t_statistic) == std::signbit(b.t_statistic));
    return t_same && a.degrees_of_freedom == b.degrees_of_freedom && a.p_value == b.p_value &&
           a.reject_at_99 == b.reject_at_99 && a.infinite_t == b.infinite_t;
}

}  // namespace

bool ExperimentReport::operator==(const ExperimentReport& other) const {
    const ExperimentConfig& a = config;
    const ExperimentConfig& b = other.config;
    if (a.ng_min != b.ng_min || a.ng_max != b.ng_max || a.repetitions != b.repetitions ||
        a.sigma2 != b.sigma2 || a.fixed_lambda != b.fixed_lambda ||
        a.test_per_component != b.test_per_component || a.seed != b.seed ||
        a.output_dir != b.output_dir || a.p.is_finite() != b.p.is_finite()) {
        return false;
    }
    if (a.p.is_finite() && a.p.resolve(1) != b.p.resolve(1)) return false;
    if (!ttest_equal(pooled_ttest, other.pooled_ttest)) return false;
    if (per_ng.size() != other.per_ng.size()) return false;
    for (std::size_t i = 0; i < per_ng.size(); ++i) {
        const NgSummary& x = per_ng[i];
        const NgSummary& y = other.per_ng[i];
        if (x.ng != y.ng || x.mean_rate_fixed != y.mean_rate_fixed ||
            x.mean_rate_shrinkage != y.mean_rate_shrinkage || x.mean_lambda != y.mean_lambda ||
            x.std_lambda != y.std_lambda || !ttest_equal(x.ttest, y.ttest) ||
            x.trials.size() != y.trials.size()) {
            return false;
        }
        for (std::size_t j = 0; j < x.trials.size(); ++j) {
            const TrialResult& s = x.trials[j];
            const TrialResult& t = y.trials[j];
            if (s.rate_fixed != t.rate_fixed || s.rate_shrinkage != t.rate_shrinkage ||
                s.lambda_hat != t.lambda_hat || s.seed != t.seed) {
                return false;
            }
        }
    }
    return true;
}

void export_report_files(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "report.txt", std::ios::binary);
        if (!out) throw std::runtime_error("export_report_files: cannot write report.txt in " + dir);
        write_report(report, out);
    }
    {
        std::ofstream out(fs::path(dir) / "summary.csv", std::ios::binary);
        if (!out) throw std::runtime_error("export_report_files: cannot write summary.csv in " + dir);
        out << "ng,mean_rate_fixed,mean_rate_shrinkage,mean_lambda_hat,std_lambda_hat,"
               "t_statistic,p_value,reject_at_99\n";
        for (const NgSummary& s : report.per_ng) {
            out << s.ng << "," << fmt_double(s.mean_rate_fixed) << ","
                << fmt_double(s.mean_rate_shrinkage) << "," << fmt_double(s.mean_lambda) << ","
                << fmt_double(s.std_lambda) << "," << fmt_double(s.ttest.t_statistic) << ","
                << fmt_double(s.ttest.p_value) << "," << (s.ttest.reject_at_99 ? 1 : 0) << "\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "trials.csv", std::ios::binary);
        if (!out) throw std::runtime_error("export_report_files: cannot write trials.csv in " + dir);
        out << "ng,rep,seed,rate_fixed,rate_shrinkage,lambda_hat\n";
        for (const NgSummary& s : report.per_ng) {
            for (std::size_t rep = 0; rep < s.trials.size(); ++rep) {
                const TrialResult& t = s.trials[rep];
                out << s.ng << "," << rep << "," << fmt_u64(t.seed) << ","
                    << fmt_double(t.rate_fixed) << "," << fmt_double(t.rate_shrinkage) << ","
                    << fmt_double(t.lambda_hat) << "\n";
            }
        }
    }
}

void export_boundary_grid(const KfdaModel& model, const GridSpec& grid, std::ostream& out) {
    if (grid.nx < 2 || grid.ny < 2) {
        throw std::invalid_argument("export_boundary_grid: resolution must be at least 2x2");
    }
    if (!(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min)) {
        throw std::invalid_argument("export_boundary_grid: empty rectangle");
    }

    const Index total = static_cast<Index>(grid.nx) * grid.ny;
    Matrix points(total, 2);
    Index row = 0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y =
            grid.y_min + (grid.y_max - grid.y_min) * static_cast<double>(iy) / (grid.ny - 1);
        for (int ix = 0; ix < grid.nx; ++ix, ++row) {
            const double x =
                grid.x_min + (grid.x_max - grid.x_min) * static_cast<double>(ix) / (grid.nx - 1);
            points(row, 0) = x;
            points(row, 1) = y;
        }
    }
    const DataMatrix pts{std::move(points)};
    const Vector scores = project(model, pts);
    const std::vector<int> labels = classify(model, pts);

    out << "x,y,score,label\n";
    for (Index r = 0; r < total; ++r) {
        out << fmt_double(pts.values(r, 0)) << "," << fmt_double(pts.values(r, 1)) << ","
            << fmt_double(scores(r)) << "," << labels[static_cast<std::size_t>(r)] << "\n";
    }
}

void export_boundary_grid_file(const KfdaModel& model, const GridSpec& grid,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_boundary_grid: cannot write " + path);
    export_boundary_grid(model, grid, out);
}

}  // namespace kshrink
