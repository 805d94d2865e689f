#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradridge/marginals.hpp"
#include "gradridge/sample.hpp"

namespace gradridge {

/// Built-in analytic benchmark: marginal descriptors plus a value/gradient
/// evaluator on the reference (standardized) space. Construction spot-checks
/// the gradient against finite differences at a few seeded points.
struct Benchmark {
    std::string name;
    int d = 0;
    std::vector<Marginal> marginals;
    /// Returns the value; fills grad (size d) when non-null.
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)> eval;
};

/// u(x) = cos(||x||_2) with standard normal inputs.
Benchmark make_isotropic(int d = 20);

/// Water-flow borehole model on 8 physical inputs; evaluated in reference
/// coordinates with the chain rule through the marginal transforms.
Benchmark make_borehole();

/// Depth-4 binary composition of h(s,t) = (1+st)^2 / 9 on 16 uniform inputs.
Benchmark make_composed16();

Benchmark benchmark_by_name(const std::string& name);
std::vector<std::string> benchmark_names();

/// Draws N i.i.d. reference-space points with the counter-based generator
/// and evaluates values and gradients. Byte-identical for fixed (bench, N,
/// seed) regardless of thread count.
Sample sample_benchmark(const Benchmark& bench, int n, std::uint64_t seed,
                        const ExecConfig& exec = {});

}  // namespace gradridge
