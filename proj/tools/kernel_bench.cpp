// Times the data-parallel kernels in both execution modes: the serial
// reference path (threads = 1) and the OpenMP path. Also reports the
// largest relative deviation between the two results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "gradridge/bench.hpp"
#include "gradridge/featuremap.hpp"
#include "gradridge/profile.hpp"
#include "gradridge/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gradridge;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    fn();  // warm-up
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const std::string& name, double serial_ms, double parallel_ms, double deviation) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx   max rel dev %.2e\n", name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, deviation);
}

double rel_dev(double a, double b) {
    const double scale = std::max({1e-300, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 400;
    int threads = argc > 2 ? std::atoi(argv[2]) : 0;
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#else
    if (threads <= 0) threads = 1;
#endif
    const ExecConfig serial{1};
    const ExecConfig parallel{threads};

    const Benchmark bench = make_isotropic(20);
    const Sample sample = sample_benchmark(bench, n, 99, serial);

    // Quadratic feature space, m = 2: representative of the inner loops.
    MultiIndexSet lambda = MultiIndexSet::total_degree_set(20, 2, 1);
    ProductBasis basis(Family::HermiteProbabilist, lambda);
    const int K = basis.size(), m = 2;

    CounterRng rng{7};
    Eigen::MatrixXd G(K, m);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < m; ++j) G(k, j) = rng.normal(2 * static_cast<std::uint64_t>(k * m + j));

    std::printf("N=%d  K=%d  m=%d  threads=%d\n", n, K, m, threads);
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const int reps = 5;

    PointOperators ops_serial, ops_parallel;
    {
        const double ts = time_ms([&] { ops_serial = PointOperators::build(basis, sample, serial); }, reps);
        const double tp = time_ms([&] { ops_parallel = PointOperators::build(basis, sample, parallel); }, reps);
        report("point operator build", ts, tp, rel_dev(ops_serial.v.norm(), ops_parallel.v.norm()));
    }
    {
        double r_serial = 0, r_parallel = 0;
        const double ts = time_ms([&] { r_serial = mean_rayleigh(G, ops_serial, serial); }, reps);
        const double tp = time_ms([&] { r_parallel = mean_rayleigh(G, ops_serial, parallel); }, reps);
        report("mean rayleigh quotient", ts, tp, rel_dev(r_serial, r_parallel));
    }
    {
        Eigen::MatrixXd grad_serial, grad_parallel;
        const double ts =
            time_ms([&] { grad_serial = mean_rayleigh_gradient(G, ops_serial, serial); }, reps);
        const double tp =
            time_ms([&] { grad_parallel = mean_rayleigh_gradient(G, ops_serial, parallel); }, reps);
        report("rayleigh gradient", ts, tp, (grad_serial - grad_parallel).norm() / grad_serial.norm());
    }

    const RayleighState state_serial = RayleighState::build(G, ops_serial, serial);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(K * m, -1.0, 1.0);
    {
        Eigen::VectorXd metric_serial, metric_parallel;
        const double ts = time_ms(
            [&] { metric_serial = apply_rayleigh_metric(state_serial, ops_serial, x, serial); }, reps);
        const double tp = time_ms(
            [&] { metric_parallel = apply_rayleigh_metric(state_serial, ops_serial, x, parallel); },
            reps);
        report("metric operator apply", ts, tp,
               (metric_serial - metric_parallel).norm() / metric_serial.norm());
    }

    const MultiIndexSet closure = MultiIndexSet::total_degree_set(20, 2, 0);
    const MultiIndexSet margin = closure.reduced_margin();
    UnivariateTable table(basis.families(), sample.points, closure.max_degree() + 1, serial);
    {
        std::vector<std::pair<MultiIndex, double>> sc_serial, sc_parallel;
        const double ts = time_ms(
            [&] { sc_serial = margin_scores(state_serial, ops_serial, table, margin, serial); }, reps);
        const double tp = time_ms(
            [&] { sc_parallel = margin_scores(state_serial, ops_serial, table, margin, parallel); },
            reps);
        double dev = 0;
        for (std::size_t i = 0; i < sc_serial.size(); ++i)
            dev = std::max(dev, rel_dev(sc_serial[i].second, sc_parallel[i].second));
        report("margin scoring", ts, tp, dev);
    }

    const FeatureMap map(basis, G);
    const Profile profile(
        MultiIndexSet::total_degree_set(m, 3, 0),
        Eigen::VectorXd::LinSpaced(MultiIndexSet::total_degree_set(m, 3, 0).size(), 0.1, 1.0));
    {
        double e_serial = 0, e_parallel = 0;
        const double ts =
            time_ms([&] { e_serial = gradient_enhanced_error(profile, map, sample, serial); }, reps);
        const double tp =
            time_ms([&] { e_parallel = gradient_enhanced_error(profile, map, sample, parallel); }, reps);
        report("gradient-enhanced error", ts, tp, rel_dev(e_serial, e_parallel));
    }
    {
        Sample draw_serial, draw_parallel;
        const double ts = time_ms([&] { draw_serial = sample_benchmark(bench, n, 1234, serial); }, reps);
        const double tp =
            time_ms([&] { draw_parallel = sample_benchmark(bench, n, 1234, parallel); }, reps);
        report("benchmark sampling", ts, tp, (draw_serial.points - draw_parallel.points).norm());
    }

    return 0;
}
