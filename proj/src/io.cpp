#include "gradridge/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace gradridge {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;
constexpr char kSampleMagic[4] = {'G', 'R', 'S', 'B'};
constexpr std::uint32_t kSampleBinaryVersion = 1;

ordered_json index_set_to_json(const MultiIndexSet& set) {
    ordered_json arr = ordered_json::array();
    for (const MultiIndex& alpha : set.indices()) arr.push_back(alpha);
    return arr;
}

MultiIndexSet index_set_from_json(const ordered_json& arr, int dim) {
    MultiIndexSet set(dim);
    for (const auto& entry : arr) {
        MultiIndex alpha = entry.get<MultiIndex>();
        if (!set.insert(alpha)) throw std::runtime_error("model file: bad multi-index list");
    }
    return set;
}

ordered_json marginals_to_json(const std::vector<Marginal>& marginals) {
    ordered_json arr = ordered_json::array();
    for (const Marginal& m : marginals)
        arr.push_back({{"kind", marginal_kind_name(m.kind)}, {"params", {m.p1, m.p2}}});
    return arr;
}

std::vector<Marginal> marginals_from_json(const ordered_json& arr) {
    std::vector<Marginal> out;
    for (const auto& entry : arr) {
        Marginal m;
        m.kind = marginal_kind_from_name(entry.at("kind").get<std::string>());
        m.p1 = entry.at("params").at(0).get<double>();
        m.p2 = entry.at("params").at(1).get<double>();
        out.push_back(m);
    }
    return out;
}

ordered_json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    ordered_json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_model(const std::string& path, const SurrogateModel& model) {
    const int d = model.feature_map.input_dim();
    const Eigen::MatrixXd& G = model.feature_map.coefficients();

    ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["d"] = d;
    j["m"] = model.feature_map.n_features();
    j["marginals"] = marginals_to_json(model.marginals);

    ordered_json feature;
    ordered_json families = ordered_json::array();
    for (Family f : model.feature_map.basis().families()) families.push_back(family_name(f));
    feature["families"] = families;
    feature["lambda"] = index_set_to_json(model.feature_map.basis().index_set());
    ordered_json g_rows = ordered_json::array();  // row-major K x m
    for (Eigen::Index k = 0; k < G.rows(); ++k)
        for (Eigen::Index c = 0; c < G.cols(); ++c) g_rows.push_back(G(k, c));
    feature["G"] = g_rows;
    j["feature"] = feature;

    ordered_json profile;
    profile["gamma"] = index_set_to_json(model.profile.index_set());
    ordered_json w = ordered_json::array();
    for (Eigen::Index l = 0; l < model.profile.coefficients().size(); ++l)
        w.push_back(model.profile.coefficients()(l));
    profile["w"] = w;
    j["profile"] = profile;

    ordered_json meta;
    meta["n"] = model.meta.n;
    meta["m"] = model.meta.m;
    meta["k_star"] = model.meta.k_star;
    meta["l_star"] = model.meta.l_star;
    meta["theta"] = model.meta.theta;
    meta["folds"] = model.meta.folds;
    meta["seed"] = model.meta.seed;
    meta["use_gradients"] = model.meta.use_gradients;
    meta["monitor"] = model.meta.monitor;
    meta["rng"] = model.meta.rng;
    meta["feature_cv_curve"] = model.meta.feature_cv_curve;
    meta["profile_cv_curve"] = model.meta.profile_cv_curve;
    j["metadata"] = meta;

    write_text(path, j.dump(2) + "\n");
}

SurrogateModel read_model(const std::string& path) {
    const ordered_json j = parse_file(path);
    if (j.at("format_version").get<int>() != kModelFormatVersion)
        throw std::runtime_error("model file: unsupported format version");
    const int d = j.at("d").get<int>();
    const int m = j.at("m").get<int>();

    SurrogateModel model;
    model.marginals = marginals_from_json(j.at("marginals"));

    const auto& feature = j.at("feature");
    std::vector<Family> families;
    for (const auto& name : feature.at("families")) families.push_back(family_from_name(name));
    if (static_cast<int>(families.size()) != d) throw std::runtime_error("model file: families size");
    MultiIndexSet lambda = index_set_from_json(feature.at("lambda"), d);
    const int K = lambda.size();
    const auto& g_rows = feature.at("G");
    if (static_cast<int>(g_rows.size()) != K * m) throw std::runtime_error("model file: G size");
    Eigen::MatrixXd G(K, m);
    for (int k = 0; k < K; ++k)
        for (int c = 0; c < m; ++c)
            G(k, c) = g_rows.at(static_cast<std::size_t>(k * m + c)).get<double>();
    model.feature_map = FeatureMap(ProductBasis(families, std::move(lambda)), std::move(G));

    const auto& profile = j.at("profile");
    MultiIndexSet gamma = index_set_from_json(profile.at("gamma"), m);
    const auto& w_arr = profile.at("w");
    if (static_cast<int>(w_arr.size()) != gamma.size()) throw std::runtime_error("model file: w size");
    Eigen::VectorXd w(gamma.size());
    for (int l = 0; l < gamma.size(); ++l) w(l) = w_arr.at(static_cast<std::size_t>(l)).get<double>();
    model.profile = Profile(std::move(gamma), std::move(w));

    if (j.contains("metadata")) {
        const auto& meta = j.at("metadata");
        model.meta.n = meta.value("n", 0);
        model.meta.m = meta.value("m", m);
        model.meta.k_star = meta.value("k_star", 0);
        model.meta.l_star = meta.value("l_star", 0);
        model.meta.theta = meta.value("theta", 0.3);
        model.meta.folds = meta.value("folds", 5);
        model.meta.seed = meta.value("seed", std::uint64_t{0});
        model.meta.use_gradients = meta.value("use_gradients", true);
        model.meta.monitor = meta.value("monitor", "value");
        model.meta.rng = meta.value("rng", "");
        model.meta.feature_cv_curve = meta.value("feature_cv_curve", std::vector<double>{});
        model.meta.profile_cv_curve = meta.value("profile_cv_curve", std::vector<double>{});
    }
    return model;
}

void write_sample_json(const std::string& path, const Sample& sample,
                       const std::vector<Marginal>& marginals) {
    ordered_json j;
    j["d"] = sample.dim();
    j["N"] = sample.n();
    ordered_json points = ordered_json::array(), gradients = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (int i = 0; i < sample.n(); ++i) {
        ordered_json p = ordered_json::array(), g = ordered_json::array();
        for (int c = 0; c < sample.dim(); ++c) {
            p.push_back(sample.points(i, c));
            g.push_back(sample.gradients(i, c));
        }
        points.push_back(std::move(p));
        gradients.push_back(std::move(g));
        values.push_back(sample.values(i));
    }
    j["points"] = std::move(points);
    j["values"] = std::move(values);
    j["gradients"] = std::move(gradients);
    if (!marginals.empty()) j["marginals"] = marginals_to_json(marginals);
    write_text(path, j.dump() + "\n");
}

Sample read_sample_json(const std::string& path, std::vector<Marginal>* marginals) {
    const ordered_json j = parse_file(path);
    const int d = j.at("d").get<int>();
    const int n = j.at("N").get<int>();
    Sample sample;
    sample.points.resize(n, d);
    sample.values.resize(n);
    sample.gradients.resize(n, d);
    const auto& points = j.at("points");
    const auto& values = j.at("values");
    const auto& gradients = j.at("gradients");
    if (static_cast<int>(points.size()) != n || static_cast<int>(values.size()) != n ||
        static_cast<int>(gradients.size()) != n)
        throw std::runtime_error("sample file: row count mismatch");
    for (int i = 0; i < n; ++i) {
        const auto& p = points.at(static_cast<std::size_t>(i));
        const auto& g = gradients.at(static_cast<std::size_t>(i));
        if (static_cast<int>(p.size()) != d || static_cast<int>(g.size()) != d)
            throw std::runtime_error("sample file: column count mismatch");
        for (int c = 0; c < d; ++c) {
            sample.points(i, c) = p.at(static_cast<std::size_t>(c)).get<double>();
            sample.gradients(i, c) = g.at(static_cast<std::size_t>(c)).get<double>();
        }
        sample.values(i) = values.at(static_cast<std::size_t>(i)).get<double>();
    }
    if (marginals) {
        marginals->clear();
        if (j.contains("marginals")) *marginals = marginals_from_json(j.at("marginals"));
    }
    sample.validate();
    return sample;
}

void write_sample_binary(const std::string& path, const Sample& sample) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(kSampleMagic, 4);
    const std::uint32_t version = kSampleBinaryVersion;
    const std::uint64_t d = static_cast<std::uint64_t>(sample.dim());
    const std::uint64_t n = static_cast<std::uint64_t>(sample.n());
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    auto write_row_major = [&](const Eigen::MatrixXd& mat) {
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
            for (Eigen::Index c = 0; c < mat.cols(); ++c) {
                const double x = mat(i, c);
                out.write(reinterpret_cast<const char*>(&x), sizeof x);
            }
    };
    write_row_major(sample.points);
    out.write(reinterpret_cast<const char*>(sample.values.data()),
              static_cast<std::streamsize>(sizeof(double)) * sample.n());
    write_row_major(sample.gradients);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Sample read_sample_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t d = 0, n = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&d), sizeof d);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || std::memcmp(magic, kSampleMagic, 4) != 0)
        throw std::runtime_error("sample file: bad binary header");
    if (version != kSampleBinaryVersion)
        throw std::runtime_error("sample file: unsupported binary version");

    Sample sample;
    sample.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    sample.values.resize(static_cast<Eigen::Index>(n));
    sample.gradients.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    auto read_row_major = [&](Eigen::MatrixXd& mat) {
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
            for (Eigen::Index c = 0; c < mat.cols(); ++c) {
                double x;
                in.read(reinterpret_cast<char*>(&x), sizeof x);
                mat(i, c) = x;
            }
    };
    read_row_major(sample.points);
    in.read(reinterpret_cast<char*>(sample.values.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    read_row_major(sample.gradients);
    if (!in) throw std::runtime_error("sample file: truncated binary data");
    sample.validate();
    return sample;
}

Sample read_sample(const std::string& path, std::vector<Marginal>* marginals) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) {
        if (marginals) marginals->clear();
        return read_sample_binary(path);
    }
    return read_sample_json(path, marginals);
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    std::string text = "phase,fold,iteration,card,train_loss,test_loss\n";
    for (const TraceRow& row : rows) {
        text += row.phase;
        text += ',' + std::to_string(row.fold);
        text += ',' + std::to_string(row.iteration);
        text += ',' + std::to_string(row.card);
        text += ',' + format_double(row.train_loss);
        text += ',' + format_double(row.test_loss);
        text += '\n';
    }
    write_text(path, text);
}

std::string metrics_to_json(const Metrics& metrics) {
    std::string out = "{";
    out += "\"mse\": " + format_double(metrics.mse);
    out += ", \"j_hat\": " + format_double(metrics.alignment);
    out += ", \"gradient_mse\": " + format_double(metrics.gradient_mse);
    out += ", \"n\": " + std::to_string(metrics.n);
    out += "}";
    return out;
}

}  // namespace gradridge
