#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "cdag/eval.hpp"
#include "cdag/graph.hpp"
#include "cdag/scoring.hpp"
#include "cdag/simulate.hpp"

namespace cdag {

inline constexpr const char* kVersion = "0.1.0";

// Provenance attached to every file the tools write: version, seed, settings.
// Contains nothing time- or host-dependent, so reruns are byte-identical.
nlohmann::json metadata(const std::string& command, std::uint64_t seed, nlohmann::json config);

// {"p": int, "edges": [[i, j], ...]} with 0-based primary indices. Extra keys
// (such as "meta") are ignored on read.
nlohmann::json graph_to_json(const Dag& g);
Dag graph_from_json(const nlohmann::json& j);

// {"g": graph, "g_prime": graph, "misspec": [[i, j], ...]}
nlohmann::json truth_to_json(const GroundTruth& t);
GroundTruth truth_from_json(const nlohmann::json& j);

// {"<child>": {"[i,j]": log score, ...}, ...}; collinear sets are null.
nlohmann::json score_table_to_json(const ScoreTable& table);

// Header y1..yp[,x1..xp], one row per observation, 17 significant digits.
// Lines starting with '#' are comments (metadata) and skipped on read.
void write_dataset_csv(std::ostream& os, const Dataset& d, const nlohmann::json& meta);
Dataset read_dataset_csv(std::istream& is);

// theta,p,n,estimator,mean_shd,stderr,reps
void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report, const nlohmann::json& meta);
// misspec_prob,theta,p,n,estimator,mean_shd,stderr,reps
void write_misspec_csv(std::ostream& os, const BenchmarkReport& report, const nlohmann::json& meta);

// Shortest-looking decimal with 17 significant digits.
std::string format_double(double v);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace cdag
