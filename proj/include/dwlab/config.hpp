#pragma once

// Experiment configuration: JSON in, validated struct out, and back to the
// canonical resolved JSON embedded in every report.

#include "dwlab/nonlinear_damping.hpp"
#include "dwlab/rate.hpp"
#include "dwlab/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dwlab {

struct DampingConfig {
  std::string kind = "constant";  // constant | interval
  double alpha = 0.0;
  double beta = 1.0;
  double amplitude = 1.0;
};

struct RateConfig {
  std::string kind = "power";  // power | exp | table
  double p = 1.0;
  double r0 = 1.0;
  std::string path;
};

struct SimulationConfig {
  double T = 10.0;
  double dt = 1e-2;
  std::size_t stride = 1;
  std::size_t log_per_decade = 0;
};

struct ProbeConfig {
  std::size_t count = 8;
};

struct ObservabilityConfig {
  double T = 5.0;                 // Gramian horizon for the gramian pipeline
  std::optional<double> C;        // obs2 constant; empirical when absent
  std::size_t samples = 4096;
};

struct FitConfig {
  double t_min = 1.0;
  double t_max = 50.0;
  std::string rate = "forward";  // forward: G^-1(1/t); reverse: F^-1(1/sqrt t)
  std::string norm = "vx";       // vx | da_v
};

struct LemmaConfig {
  double c = 1.0;
  double t_min = 1.0;
  double t_max = 1e6;
  std::size_t points = 512;
};

struct LawConfig {
  std::string kind = "linear";  // linear | cubic | table
  std::string path;
};

struct NonlinearConfig {
  LawConfig g;
  double C = 1.0;
  double c0 = 1.0;
  double c_prime = 1.0;
  std::optional<double> c;
  double t_min = 1.0;
};

struct ExperimentConfig {
  std::string pipeline = "simulate";
  int n_modes = 32;
  double length = 1.0;
  DampingConfig damping;
  RateConfig g;
  SimulationConfig simulation;
  ProbeConfig probes;
  ObservabilityConfig observability;
  FitConfig fit;
  LemmaConfig lemma;
  NonlinearConfig nonlinear;
  std::uint64_t seed = 1;
  std::string trace;   // input trace for the fit pipeline
  std::string out = "out";
  std::filesystem::path base_dir;  // resolves relative paths; not serialized

  void validate() const;
};

const std::vector<std::string>& pipeline_names();

/// Parses and validates; unknown keys and out-of-range values throw
/// InvalidArgument.
ExperimentConfig parse_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json resolved_json(const ExperimentConfig& config);

SpectralOperator make_operator(const ExperimentConfig& config);
DampingProfile make_profile(const ExperimentConfig& config);
RateFunction make_rate(const ExperimentConfig& config);
NonlinearDamping make_law(const ExperimentConfig& config);

/// Deterministic probes: w0_k ~ N(0,1)/k^2, w1_k ~ N(0,1)/k.
std::vector<StatePair> make_probes(std::size_t n_modes, std::size_t count, std::uint64_t seed);

}  // namespace dwlab
