#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gradridge {

/// Execution configuration for the data-parallel kernels.
///
/// threads <= 1 selects the serial reference path, which accumulates in
/// fixed index order and is bitwise reproducible. threads > 1 selects the
/// OpenMP path; per-thread partial sums are combined in thread order, so
/// results are reproducible for a fixed thread count but may differ from
/// the serial path by floating-point summation order.
struct ExecConfig {
    int threads = 1;

    bool serial() const { return threads <= 1; }

    int effective_threads() const {
#ifdef _OPENMP
        return serial() ? 1 : threads;
#else
        return 1;
#endif
    }
};

/// Reduction over indices [0, n). `body(i, acc)` folds element i into an
/// accumulator, `join(acc, other)` merges two accumulators. The serial
/// path is the reference implementation the tests compare against.
template <class Acc, class Body, class Join>
void reduce_indexed(std::size_t n, const ExecConfig& exec, Acc& acc,
                    const Acc& zero, Body&& body, Join&& join) {
    (void)join;
#ifdef _OPENMP
    const int nt = exec.effective_threads();
    if (nt > 1) {
        std::vector<Acc> partial(static_cast<std::size_t>(nt), zero);
#pragma omp parallel num_threads(nt)
        {
            Acc& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                body(static_cast<std::size_t>(i), local);
        }
        for (const Acc& p : partial) join(acc, p);
        return;
    }
#else
    (void)exec;
#endif
    (void)zero;
    for (std::size_t i = 0; i < n; ++i) body(i, acc);
}

/// Parallel for without reduction; body must only write disjoint state.
template <class Body>
void for_indexed(std::size_t n, const ExecConfig& exec, Body&& body) {
#ifdef _OPENMP
    const int nt = exec.effective_threads();
    if (nt > 1) {
#pragma omp parallel for num_threads(nt) schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace gradridge
