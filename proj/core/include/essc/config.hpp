#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "essc/acquisition.hpp"
#include "essc/features.hpp"
#include "essc/mlp.hpp"
#include "essc/signal.hpp"
#include "essc/spectral.hpp"

namespace essc {

/// Everything needed to rerun an experiment bit-for-bit. Every constant of the
/// method is a key so that desk-scale runs can shrink the cost.
struct ExperimentConfig {
  PulseSpec pulse;
  std::vector<FilterSpec> filters;  // exactly 5, class ids 1..5

  // Acquisition chain; snr_db inside is ignored, see the two fields below.
  NoiseSpec acquisition;
  double train_noise_fraction = 0.05;
  std::vector<double> test_snr_db = {25.0, 20.0, 15.0, 10.0};

  FeatureMode mode = FeatureMode::Essc30;
  FeatureConfig features;

  std::vector<int> hidden_sizes = {5, 10, 15, 20, 25, 30, 35, 40};
  TrainingOptions training;
  DecisionRule decision = DecisionRule::WeightedRandom;

  std::size_t train_per_class = 1000;
  std::size_t test_per_class = 1000;

  int relieff_k = 10;
  std::vector<double> relieff_alpha = {0.05, 0.01, 0.001};
  double analysis_snr_db = 25.0;

  std::uint64_t seed = 1;
  int jobs = 1;

  NoiseSpec train_noise() const;
  NoiseSpec test_noise(double snr_db) const;
  const FilterSpec& filter_for_class(int class_id) const;
};

ExperimentConfig default_config(PulseFamily family);

/// Parses a JSON document; missing keys take defaults (filters default to the
/// family's bank). `family`, when set, overrides pulse.family. Throws
/// ValidationError listing every offending key.
ExperimentConfig config_from_json_text(const std::string& text, std::optional<PulseFamily> family = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<PulseFamily> family = std::nullopt);

/// Canonical JSON (sorted keys, all defaults expanded). `jobs` is an execution
/// knob and is left out, so outputs do not depend on it.
std::string config_to_json_text(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

/// Semantic checks on a fully populated config.
void validate_config(const ExperimentConfig& config);

}  // namespace essc
