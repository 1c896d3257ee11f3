#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "biqrm/harness.hpp"

namespace biqrm {

// Config file rejected: carries the offending field path or parse location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsed experiment configuration. The file is JSON with a strict schema:
// unknown fields anywhere are errors, as are missing required fields per
// subcommand. Blocks:
//   domain      { dimension, lengths[], modes }
//   profile     { horizon, kind, ...shape parameters..., derivative_bound? }
//   smoothness  { p, rho }
//   source      { kind: decay {q} | coefficients {values[]} }
//   regularizer { order, rule, alpha?, xi?, sigma? }
//   experiment  { deltas[], trials, seed, output_dir?, label? }
//   modulus     { r?, offspectrum_points? }        (modulus subcommand)
//   illposed    { k_max }                          (illposed subcommand)
struct ConfigFile {
  std::shared_ptr<const SpectralDomain> domain;
  std::optional<TemporalProfile> profile;
  std::optional<SmoothnessClass> smoothness;
  std::optional<SourceSpec> source;
  std::optional<RegularizerConfig> regularizer;
  std::vector<double> deltas;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::string label;
  double modulus_r = 1.0;
  int modulus_offspectrum_points = 20;
  std::size_t illposed_k_max = 64;

  bool has_experiment_block = false;
  bool has_modulus_block = false;
  bool has_illposed_block = false;

  // Assembles the rate-experiment view; throws ConfigError when a required
  // block is missing.
  ExperimentSpec experiment_spec() const;
};

ConfigFile parse_config_text(const std::string& text);
ConfigFile parse_config_file(const std::string& path);

}  // namespace biqrm
