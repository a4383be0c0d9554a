// Serial vs OpenMP timing for the data-parallel kernels, with a bitwise
// equality check between the two paths.

#include <omp.h>

#include <cstdio>
#include <cstring>

#include "kshrink/experiments.hpp"
#include "kshrink/kernel.hpp"
#include "kshrink/kfda.hpp"
#include "kshrink/rng.hpp"

using namespace kshrink;

namespace {

DataMatrix gaussian_data(Index n, Index q, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, q);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < q; ++j) x(i, j) = rng.normal();
    return make_data(std::move(x));
}

struct Timing {
    double serial_s;
    double parallel_s;
    bool identical;
};

void report(const char* name, const Timing& t) {
    std::printf("%-24s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   bit-identical %s\n",
                name, t.serial_s, t.parallel_s, t.serial_s / t.parallel_s,
                t.identical ? "yes" : "NO");
}

Timing bench_gram(const DataMatrix& data, const KernelSpec& spec) {
    double t0 = omp_get_wtime();
    const RawGram gs = gram_matrix_serial(data, spec);
    double t1 = omp_get_wtime();
    const RawGram gp = gram_matrix(data, spec);
    double t2 = omp_get_wtime();
    const bool same = std::memcmp(gs.values.data(), gp.values.data(),
                                  sizeof(double) * gs.values.size()) == 0;
    return {t1 - t0, t2 - t1, same};
}

Timing bench_project(const KfdaModel& model, const DataMatrix& points) {
    double t0 = omp_get_wtime();
    const Vector ss = project_serial(model, points);
    double t1 = omp_get_wtime();
    const Vector sp = project(model, points);
    double t2 = omp_get_wtime();
    const bool same =
        std::memcmp(ss.data(), sp.data(), sizeof(double) * static_cast<std::size_t>(ss.size())) == 0;
    return {t1 - t0, t2 - t1, same};
}

Timing bench_sweep(const ExperimentConfig& cfg) {
    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    double t0 = omp_get_wtime();
    const ExperimentReport serial = run_sweep(cfg);
    double t1 = omp_get_wtime();
    omp_set_num_threads(max_threads);
    const ExperimentReport parallel = run_sweep(cfg);
    double t2 = omp_get_wtime();
    return {t1 - t0, t2 - t1, serial == parallel};
}

}  // namespace

int main() {
    std::printf("threads: %d\n\n", omp_get_max_threads());

    const KernelSpec rbf = KernelSpec::rbf(0.1);

    report("gram 1500x8 rbf", bench_gram(gaussian_data(1500, 8, 11), rbf));
    report("gram 1500x8 poly2", bench_gram(gaussian_data(1500, 8, 11), KernelSpec::polynomial(2, 1.0)));

    {
        const LabeledDataset train_set = generate_two_class(30, 21);
        const KfdaModel model = train(train_set, rbf, RegularizerSpec::shrinkage());
        report("project 200k points", bench_project(model, gaussian_data(200000, 2, 31)));
    }

    {
        ExperimentConfig cfg;
        cfg.ng_min = 3;
        cfg.ng_max = 12;
        cfg.repetitions = 20;
        cfg.seed = 41;
        report("sweep ng 3-12 x20", bench_sweep(cfg));
    }
    return 0;
}
