#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "gradridge/bench.hpp"
#include "gradridge/io.hpp"

using namespace gradridge;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(GRADRIDGE_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

const std::string kTrainFlags =
    "--bench isotropic --n 40 --m 1 --kmax 1 --lmax 4 --folds 3 --seed 7 --theta 0.5";

}  // namespace

TEST_CASE("train writes model and trace files") {
    const int code = run("train " + kTrainFlags + " --out cli_model.json --trace cli_trace.csv");
    CHECK(code == 0);
    CHECK(exists("cli_model.json"));
    CHECK(exists("cli_trace.csv"));

    const SurrogateModel model = read_model("cli_model.json");
    CHECK(model.input_dim() == 20);
    CHECK(model.meta.n == 40);

    const std::string trace = slurp("cli_trace.csv");
    CHECK(trace.rfind("phase,fold,iteration,card,train_loss,test_loss\n", 0) == 0);
}

TEST_CASE("reruns with identical flags produce identical bytes") {
    REQUIRE(run("train " + kTrainFlags + " --out cli_a.json --trace cli_ta.csv") == 0);
    REQUIRE(run("train " + kTrainFlags + " --out cli_b.json --trace cli_tb.csv") == 0);
    CHECK(slurp("cli_a.json") == slurp("cli_b.json"));
    CHECK(slurp("cli_ta.csv") == slurp("cli_tb.csv"));
    std::remove("cli_a.json");
    std::remove("cli_b.json");
    std::remove("cli_ta.csv");
    std::remove("cli_tb.csv");
}

TEST_CASE("malformed sample file exits with the input-error code") {
    std::ofstream bad("cli_bad.json");
    bad << "{ this is not json";
    bad.close();
    CHECK(run("train --sample cli_bad.json --m 1") == 2);
    std::remove("cli_bad.json");
}

TEST_CASE("missing subcommand and unknown flags are input errors") {
    CHECK(run("") == 2);
    CHECK(run("train --bench isotropic --definitely-not-a-flag 1") == 2);
    CHECK(run("train --bench nope --n 10 --m 1") == 2);
    CHECK(run("train --bench isotropic --sample also.json --m 1") == 2);
}

TEST_CASE("eval reports metrics and checks dimensions") {
    REQUIRE(exists("cli_model.json"));

    SUBCASE("matching sample evaluates cleanly") {
        const Sample validation = sample_benchmark(make_isotropic(20), 30, 99);
        write_sample_json("cli_val.json", validation);
        CHECK(run("eval --model cli_model.json --sample cli_val.json --out cli_metrics.json") == 0);
        const std::string metrics = slurp("cli_metrics.json");
        for (const char* key : {"\"mse\"", "\"j_hat\"", "\"gradient_mse\"", "\"n\": 30"})
            CHECK(metrics.find(key) != std::string::npos);
        std::remove("cli_val.json");
        std::remove("cli_metrics.json");
    }

    SUBCASE("dimension mismatch exits with the compatibility code") {
        const Sample wrong = sample_benchmark(make_borehole(), 10, 1);
        write_sample_json("cli_wrong.json", wrong);
        CHECK(run("eval --model cli_model.json --sample cli_wrong.json") == 3);
        std::remove("cli_wrong.json");
    }

    SUBCASE("unreadable model exits with the input code") {
        CHECK(run("eval --model does_not_exist.json --sample whatever.json") == 2);
    }
}

TEST_CASE("sweep emits one row per cell and is reproducible") {
    const std::string flags =
        "sweep --bench composed16 --m-list 2,16 --n-list 30 --repeats 2 --kmax 1 --lmax 3 "
        "--folds 3 --seed 13 --validate-n 50 --out cli_sweep.csv";
    REQUIRE(run(flags) == 0);
    const std::string csv = slurp("cli_sweep.csv");
    CHECK(csv.rfind("bench,m,N,repeat,mse,j_hat,card_lambda,card_gamma\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 2*1*2 cells

    REQUIRE(run("sweep --bench composed16 --m-list 2,16 --n-list 30 --repeats 2 --kmax 1 --lmax 3 "
                "--folds 3 --seed 13 --validate-n 50 --out cli_sweep2.csv") == 0);
    CHECK(slurp("cli_sweep.csv") == slurp("cli_sweep2.csv"));
    std::remove("cli_sweep.csv");
    std::remove("cli_sweep2.csv");
    std::remove("cli_model.json");
    std::remove("cli_trace.csv");
}

TEST_CASE("environment seed is picked up when no flag is given") {
    setenv("GRADRIDGE_SEED", "7", 1);
    REQUIRE(run("train --bench isotropic --n 40 --m 1 --kmax 1 --lmax 4 --folds 3 --theta 0.5 "
                "--out cli_env.json") == 0);
    unsetenv("GRADRIDGE_SEED");
    REQUIRE(run("train " + kTrainFlags + " --out cli_seed.json") == 0);
    CHECK(slurp("cli_env.json") == slurp("cli_seed.json"));
    std::remove("cli_env.json");
    std::remove("cli_seed.json");
}
