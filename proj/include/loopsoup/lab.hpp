#pragma once

#include "loopsoup/soup.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace loopsoup {

enum class OutputFormat { Json, Csv };

/// Fully resolved command line. Defaults are the acceptance settings.
struct RunConfig {
  std::string subcommand;
  std::filesystem::path graph;
  double alpha = 1.0;
  std::size_t replicas = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::Json;
  std::size_t grid = 64;
  double delta = 1e-3;
  double epsilon = kDefaultTailCut;
  SamplerKind sampler = SamplerKind::Direct;

  double z_threshold = 3.0;
  double ks_threshold = 0.02;
  double tv_threshold = 0.02;
  double tolerance = 1e-6;

  std::string network;             ///< JSON literal or path to a JSON file
  std::string x0;                  ///< ray-knight base vertex (default: the killed one)
  double rho = 1.0;
  std::vector<std::string> edges;  ///< "x:y" oriented edges for moments
  std::vector<std::string> points; ///< vertices for moments
  double chi_scale = 1.0;          ///< det-identity chi = chi_scale * lambda
  std::vector<std::string> sources;
  std::vector<std::string> sinks;
  std::size_t modifiers = 5;       ///< genfun: number of random modifiers
  bool verify = false;             ///< homology-dist: add the Monte-Carlo check

  nlohmann::json to_json() const;
};

const std::vector<std::string> &subcommands();

struct RunResult {
  /// 0 pass, 2 statistical-gate failure, 1 usage or input error.
  int exit_code = 0;
  nlohmann::json document;
  /// The serialized artifact in the requested format.
  std::string text;
};

/// Executes one subcommand. Errors from the library are reported in the
/// document with exit code 1; nothing is thrown for input problems.
RunResult run(const RunConfig &config);

} // namespace loopsoup
