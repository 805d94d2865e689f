#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gradridge/bench.hpp"
#include "gradridge/io.hpp"
#include "gradridge/pipeline.hpp"
#include "gradridge/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCompat = 3;
constexpr int kExitNumeric = 4;

struct CommonOptions {
    std::string bench_name;
    std::string sample_path;
    int m = 1;
    int n = 100;
    double theta = 0.3;
    int folds = 5;
    int kmax = 60;
    int lmax = 200;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool no_gradient_profile = false;
    std::string monitor = "value";
    int threads = 1;
    std::string out_path;
    std::string trace_path;
    std::string validate_path;
    int validate_n = 0;
};

std::uint64_t resolve_seed(const CommonOptions& opt) {
    if (opt.seed_given) return opt.seed;
    if (const char* env = std::getenv("GRADRIDGE_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

gradridge::CvConfig make_config(const CommonOptions& opt) {
    gradridge::CvConfig config;
    config.m = opt.m;
    config.k_max = opt.kmax;
    config.l_max = opt.lmax;
    config.theta = opt.theta;
    config.folds = opt.folds;
    config.seed = resolve_seed(opt);
    config.use_gradients = !opt.no_gradient_profile;
    config.monitor = opt.monitor == "gradient" ? gradridge::CvConfig::Monitor::GradientError
                                               : gradridge::CvConfig::Monitor::ValueError;
    return config;
}

/// Loads training data from --sample or draws it from --bench.
gradridge::Sample load_data(const CommonOptions& opt, std::vector<gradridge::Marginal>& marginals,
                            const gradridge::ExecConfig& exec) {
    if (!opt.sample_path.empty()) {
        gradridge::Sample sample = gradridge::read_sample(opt.sample_path, &marginals);
        if (marginals.empty())
            marginals = gradridge::standard_normal_marginals(sample.dim());
        return sample;
    }
    const gradridge::Benchmark bench = gradridge::benchmark_by_name(opt.bench_name);
    marginals = bench.marginals;
    return gradridge::sample_benchmark(bench, opt.n, resolve_seed(opt), exec);
}

int run_train(const CommonOptions& opt) {
    const gradridge::ExecConfig exec{opt.threads};
    std::vector<gradridge::Marginal> marginals;
    gradridge::Sample sample;
    try {
        if (opt.validate_n > 0 && opt.bench_name.empty())
            throw std::invalid_argument("--validate-n needs --bench (use --validate for files)");
        sample = load_data(opt, marginals, exec);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        std::vector<gradridge::TraceRow> trace;
        const gradridge::SurrogateModel model =
            gradridge::cv_train(sample, make_config(opt), marginals, &trace, exec);

        std::cout << "trained: n=" << model.meta.n << " m=" << model.meta.m
                  << " k_star=" << model.meta.k_star << " l_star=" << model.meta.l_star
                  << " card_lambda=" << model.feature_map.basis_size()
                  << " card_gamma=" << model.profile.size() << "\n";
        if (!model.meta.feature_cv_curve.empty())
            std::cout << "feature cv loss: "
                      << gradridge::format_double(
                             model.meta.feature_cv_curve[static_cast<std::size_t>(model.meta.k_star)])
                      << "\n";
        if (!model.meta.profile_cv_curve.empty())
            std::cout << "profile cv loss: "
                      << gradridge::format_double(
                             model.meta.profile_cv_curve[static_cast<std::size_t>(model.meta.l_star)])
                      << "\n";
        const double train_err =
            gradridge::value_error(model.profile, model.feature_map, sample, exec);
        std::cout << "train mse: " << gradridge::format_double(train_err) << "\n";

        if (!opt.out_path.empty()) gradridge::write_model(opt.out_path, model);
        if (!opt.trace_path.empty()) gradridge::write_trace_csv(opt.trace_path, trace);

        if (!opt.validate_path.empty() || opt.validate_n > 0) {
            gradridge::Sample validation;
            if (!opt.validate_path.empty()) {
                validation = gradridge::read_sample(opt.validate_path);
            } else {
                const gradridge::Benchmark bench = gradridge::benchmark_by_name(opt.bench_name);
                validation = gradridge::sample_benchmark(
                    bench, opt.validate_n, gradridge::derive_seed(resolve_seed(opt), 0x7A11D), exec);
            }
            if (validation.dim() != model.input_dim()) {
                std::cerr << "compatibility error: validation dimension " << validation.dim()
                          << " != model dimension " << model.input_dim() << "\n";
                return kExitCompat;
            }
            std::cout << gradridge::metrics_to_json(gradridge::evaluate(model, validation, exec))
                      << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "training failed: " << e.what() << "\n";
        return kExitNumeric;
    }
}

int run_eval(const std::string& model_path, const CommonOptions& opt) {
    const gradridge::ExecConfig exec{opt.threads};
    gradridge::SurrogateModel model;
    gradridge::Sample validation;
    try {
        model = gradridge::read_model(model_path);
        if (!opt.sample_path.empty()) {
            validation = gradridge::read_sample(opt.sample_path);
        } else if (!opt.bench_name.empty()) {
            validation = gradridge::sample_benchmark(gradridge::benchmark_by_name(opt.bench_name),
                                                     opt.n, resolve_seed(opt), exec);
        } else {
            std::cerr << "input error: eval needs --sample or --bench\n";
            return kExitInput;
        }
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }

    if (validation.dim() != model.input_dim()) {
        std::cerr << "compatibility error: sample dimension " << validation.dim()
                  << " != model dimension " << model.input_dim() << "\n";
        return kExitCompat;
    }

    try {
        const std::string json =
            gradridge::metrics_to_json(gradridge::evaluate(model, validation, exec));
        std::cout << json << "\n";
        if (!opt.out_path.empty()) {
            std::ofstream out(opt.out_path);
            out << json << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "evaluation failed: " << e.what() << "\n";
        return kExitNumeric;
    }
}

int run_sweep(const CommonOptions& opt, const std::vector<int>& m_list,
              const std::vector<int>& n_list, int repeats) {
    const gradridge::ExecConfig exec{opt.threads};
    gradridge::Benchmark bench;
    try {
        if (opt.bench_name.empty()) throw std::invalid_argument("sweep needs --bench");
        if (m_list.empty() || n_list.empty() || repeats < 1)
            throw std::invalid_argument("sweep needs nonempty --m-list/--n-list and --repeats >= 1");
        bench = gradridge::benchmark_by_name(opt.bench_name);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }

    const std::uint64_t master = resolve_seed(opt);
    const int validate_n = opt.validate_n > 0 ? opt.validate_n : 1000;

    std::string csv = "bench,m,N,repeat,mse,j_hat,card_lambda,card_gamma\n";
    for (int m : m_list) {
        for (int n : n_list) {
            for (int rep = 0; rep < repeats; ++rep) {
                // Per-cell seeds depend only on (master, n, repeat) so every m
                // sees identical samples.
                const std::uint64_t cell_seed = gradridge::derive_seed(
                    master, (static_cast<std::uint64_t>(n) << 20) + static_cast<std::uint64_t>(rep));
                std::string row = opt.bench_name + "," + std::to_string(m) + "," +
                                  std::to_string(n) + "," + std::to_string(rep);
                try {
                    const gradridge::Sample sample =
                        gradridge::sample_benchmark(bench, n, cell_seed, exec);
                    const gradridge::Sample validation = gradridge::sample_benchmark(
                        bench, validate_n, gradridge::derive_seed(cell_seed, 0x7A11D), exec);
                    CommonOptions cell = opt;
                    cell.m = m;
                    cell.seed = cell_seed;
                    cell.seed_given = true;
                    const gradridge::SurrogateModel model =
                        gradridge::cv_train(sample, make_config(cell), bench.marginals, nullptr, exec);
                    const gradridge::Metrics metrics = gradridge::evaluate(model, validation, exec);
                    row += "," + gradridge::format_double(metrics.mse) + "," +
                           gradridge::format_double(metrics.alignment) + "," +
                           std::to_string(model.feature_map.basis_size()) + "," +
                           std::to_string(model.profile.size());
                } catch (const std::exception& e) {
                    std::cerr << "sweep cell (m=" << m << ", n=" << n << ", repeat=" << rep
                              << ") failed: " << e.what() << "\n";
                    row += ",nan,nan,0,0";
                }
                csv += row + "\n";
            }
        }
    }

    if (opt.out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "input error: cannot write " << opt.out_path << "\n";
            return kExitInput;
        }
        out << csv;
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_training_flags) {
    cmd->add_option("--bench", opt.bench_name, "Built-in benchmark: isotropic, borehole, composed16");
    cmd->add_option("--sample", opt.sample_path, "Sample file (.json or .bin)");
    cmd->add_option("--n", opt.n, "Sample size when drawing from a benchmark");
    cmd->add_option("--seed", opt.seed, "Random seed (fallback: GRADRIDGE_SEED)")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    cmd->add_option("--threads", opt.threads, "Worker threads; 1 = deterministic sequential mode");
    cmd->add_option("--out", opt.out_path, "Output path");
    if (with_training_flags) {
        cmd->add_option("--m", opt.m, "Intermediate dimension");
        cmd->add_option("--theta", opt.theta, "Bulk-chasing parameter in (0,1]");
        cmd->add_option("--folds", opt.folds, "Cross-validation folds");
        cmd->add_option("--kmax", opt.kmax, "Feature enrichment iterations");
        cmd->add_option("--lmax", opt.lmax, "Profile enrichment iterations");
        cmd->add_flag("--no-gradient-profile", opt.no_gradient_profile,
                      "Fit the profile by value-only least squares");
        cmd->add_option("--monitor", opt.monitor, "Profile CV monitor: value or gradient")
            ->check(CLI::IsMember({"value", "gradient"}));
        cmd->add_option("--trace", opt.trace_path, "Trace CSV path");
        cmd->add_option("--validate", opt.validate_path, "Validation sample file");
        cmd->add_option("--validate-n", opt.validate_n, "Draw a validation sample of this size");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Composed surrogate models u(x) ~ f(g(x)) from values and gradients"};
    app.require_subcommand(1);

    CommonOptions train_opt;
    CLI::App* train = app.add_subcommand("train", "Train a surrogate and write the model file");
    add_common(train, train_opt, true);

    CommonOptions eval_opt;
    std::string model_path;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a model file on a validation sample");
    eval->add_option("--model", model_path, "Model JSON file")->required();
    add_common(eval, eval_opt, false);

    CommonOptions sweep_opt;
    std::vector<int> m_list, n_list;
    int repeats = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "Benchmark sweep over m and N; emits CSV");
    add_common(sweep, sweep_opt, true);
    sweep->add_option("--m-list", m_list, "Intermediate dimensions")->delimiter(',');
    sweep->add_option("--n-list", n_list, "Sample sizes")->delimiter(',');
    sweep->add_option("--repeats", repeats, "Repetitions per (m, N) cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (train->parsed()) {
        if (train_opt.bench_name.empty() == train_opt.sample_path.empty()) {
            std::cerr << "input error: train needs exactly one of --bench or --sample\n";
            return kExitInput;
        }
        return run_train(train_opt);
    }
    if (eval->parsed()) return run_eval(model_path, eval_opt);
    if (sweep->parsed()) return run_sweep(sweep_opt, m_list, n_list, repeats);
    return kExitInput;
}
