#pragma once

#include <string>
#include <vector>

#include "gradridge/pipeline.hpp"

namespace gradridge {

/// Model file: a single JSON document with format_version, dimensions,
/// marginals, the feature map (families, index list, row-major G) and the
/// profile (index list, coefficients), plus training metadata.
void write_model(const std::string& path, const SurrogateModel& model);
SurrogateModel read_model(const std::string& path);

/// Sample JSON: {d, N, points[][], values[], gradients[][]} with an
/// optional "marginals" array. Readers of files without marginals get an
/// empty descriptor list (interpreted as standard normal by the CLI).
void write_sample_json(const std::string& path, const Sample& sample,
                       const std::vector<Marginal>& marginals = {});
Sample read_sample_json(const std::string& path, std::vector<Marginal>* marginals = nullptr);

/// Flat binary layout for large N: magic "GRSB", u32 version, u64 d, u64 N,
/// then little-endian f64 blocks (points row-major, values, gradients).
void write_sample_binary(const std::string& path, const Sample& sample);
Sample read_sample_binary(const std::string& path);

/// Dispatches on extension: ".bin" binary, anything else JSON.
Sample read_sample(const std::string& path, std::vector<Marginal>* marginals = nullptr);

/// Trace CSV with header phase,fold,iteration,card,train_loss,test_loss.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

std::string metrics_to_json(const Metrics& metrics);

/// Full-precision, locale-independent formatting used in every CSV/JSON we
/// emit ("%.17g" round-trips doubles exactly).
std::string format_double(double x);

}  // namespace gradridge
