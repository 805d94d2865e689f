#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gradridge/bench.hpp"
#include "gradridge/io.hpp"

using namespace gradridge;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("io_test_") + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

SurrogateModel tiny_model() {
    const Benchmark bench = make_borehole();
    const Sample sample = sample_benchmark(bench, 25, 3);
    CvConfig config;
    config.m = 2;
    config.k_max = 1;
    config.l_max = 3;
    config.folds = 3;
    config.seed = 5;
    return cv_train(sample, config, bench.marginals);
}

}  // namespace

TEST_CASE("model file round-trip preserves predictions bit for bit") {
    const SurrogateModel model = tiny_model();
    const std::string path = temp_path("model.json");
    write_model(path, model);
    const SurrogateModel loaded = read_model(path);

    CHECK(loaded.input_dim() == model.input_dim());
    CHECK(loaded.meta.k_star == model.meta.k_star);
    CHECK(loaded.meta.l_star == model.meta.l_star);
    CHECK(loaded.meta.rng == model.meta.rng);
    REQUIRE(loaded.feature_map.basis_size() == model.feature_map.basis_size());
    CHECK(loaded.marginals.size() == model.marginals.size());

    const Benchmark bench = make_borehole();
    const Sample probe = sample_benchmark(bench, 10, 8);
    for (int i = 0; i < probe.n(); ++i) {
        const Eigen::VectorXd x = probe.points.row(i).transpose();
        CHECK(loaded.predict(x) == model.predict(x));  // exact: JSON round-trips doubles
    }
    std::remove(path.c_str());
}

TEST_CASE("model file layout") {
    const SurrogateModel model = tiny_model();
    const std::string path = temp_path("layout.json");
    write_model(path, model);
    const std::string text = slurp(path);
    for (const char* key :
         {"format_version", "\"d\"", "\"m\"", "marginals", "feature", "families", "lambda",
          "\"G\"", "profile", "gamma", "\"w\"", "metadata"})
        CHECK(text.find(key) != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("sample JSON and binary round-trips") {
    const Benchmark bench = make_isotropic(6);
    const Sample sample = sample_benchmark(bench, 40, 11);

    SUBCASE("json") {
        const std::string path = temp_path("sample.json");
        write_sample_json(path, sample, bench.marginals);
        std::vector<Marginal> marginals;
        const Sample loaded = read_sample_json(path, &marginals);
        REQUIRE(loaded.n() == sample.n());
        CHECK(std::memcmp(loaded.points.data(), sample.points.data(),
                          sizeof(double) * 40 * 6) == 0);
        CHECK(std::memcmp(loaded.gradients.data(), sample.gradients.data(),
                          sizeof(double) * 40 * 6) == 0);
        CHECK(marginals.size() == 6);
        std::remove(path.c_str());
    }

    SUBCASE("binary") {
        const std::string path = temp_path("sample.bin");
        write_sample_binary(path, sample);
        const Sample loaded = read_sample_binary(path);
        REQUIRE(loaded.n() == sample.n());
        CHECK(std::memcmp(loaded.points.data(), sample.points.data(),
                          sizeof(double) * 40 * 6) == 0);
        CHECK(std::memcmp(loaded.values.data(), sample.values.data(), sizeof(double) * 40) == 0);
        CHECK(std::memcmp(loaded.gradients.data(), sample.gradients.data(),
                          sizeof(double) * 40 * 6) == 0);
        std::remove(path.c_str());
    }

    SUBCASE("binary rejects a corrupted header") {
        const std::string path = temp_path("bad.bin");
        std::ofstream out(path, std::ios::binary);
        out << "nonsense";
        out.close();
        CHECK_THROWS(read_sample_binary(path));
        std::remove(path.c_str());
    }
}

TEST_CASE("trace CSV format") {
    const std::string path = temp_path("trace.csv");
    std::vector<TraceRow> rows;
    rows.push_back({"feature", 0, 1, 20, 0.125, 0.25});
    rows.push_back({"profile", -1, 2, 7, 1.0 / 3.0, std::numeric_limits<double>::quiet_NaN()});
    write_trace_csv(path, rows);
    const std::string text = slurp(path);

    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "phase,fold,iteration,card,train_loss,test_loss");
    std::getline(lines, line);
    CHECK(line == "feature,0,1,20,0.125,0.25");
    std::getline(lines, line);
    // Full 17-significant-digit output, dot decimal separator, nan test loss.
    CHECK(line == std::string("profile,-1,2,7,") + format_double(1.0 / 3.0) + ",nan");
    CHECK(line.find("0.33333333333333331") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("metrics JSON carries the contract fields") {
    Metrics metrics;
    metrics.mse = 0.5;
    metrics.alignment = 0.25;
    metrics.gradient_mse = 2.0;
    metrics.n = 11;
    const std::string json = metrics_to_json(metrics);
    CHECK(json.find("\"mse\": 0.5") != std::string::npos);
    CHECK(json.find("\"j_hat\": 0.25") != std::string::npos);
    CHECK(json.find("\"gradient_mse\": 2") != std::string::npos);
    CHECK(json.find("\"n\": 11") != std::string::npos);
}

TEST_CASE("format_double round-trips") {
    for (double x : {1.0 / 3.0, 1e-300, 12345.6789, -0.1}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
        CHECK(s.find(',') == std::string::npos);
    }
}
