#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "essc/analysis.hpp"
#include "essc/config.hpp"
#include "essc/dataset.hpp"
#include "essc/mlp.hpp"

namespace essc {

// Stream tags keep training, test and classification randomness disjoint.
inline constexpr std::uint64_t kTrainStreamTag = 0x7472'6169'6e00ULL;
inline constexpr std::uint64_t kTestStreamTag = 0x7465'7374'0000ULL;
inline constexpr std::uint64_t kAnnStreamTag = 0x616e'6e00'0000ULL;
inline constexpr std::uint64_t kClassifyStreamTag = 0x636c'6173'7300ULL;

/// Test stream key of an SNR level (milli-dB, so 25 dB and 25.5 dB differ).
std::uint64_t snr_stream_key(double snr_db);

/// One acquired + feature-extracted element. Class c, index i always draws
/// from stream (seed, purpose, c, i).
EsscFeatures simulate_element(const ExperimentConfig& config, const SampledSignal& ideal,
                              const NoiseSpec& noise, const RngStream& stream, int class_id,
                              FeatureMode mode);

/// `per_class` elements for each of the five classes, in class-major order.
FeatureDataset generate_dataset(const ExperimentConfig& config, const NoiseSpec& noise,
                                std::uint64_t purpose_key, std::size_t per_class, FeatureMode mode);

FeatureDataset generate_training_set(const ExperimentConfig& config, FeatureMode mode);
FeatureDataset generate_test_set(const ExperimentConfig& config, double snr_db, FeatureMode mode);
std::uint64_t test_purpose_key(double snr_db);

TrainingOptions training_options(const ExperimentConfig& config);
RngStream ann_stream(const ExperimentConfig& config);
RngStream classify_stream(const ExperimentConfig& config, double snr_db);

// --- commands ------------------------------------------------------------------
// Paths in CommandPaths are relative to the output directory unless absolute.

struct CommandPaths {
  std::filesystem::path out;
  std::filesystem::path dataset = "dataset";
  std::filesystem::path model = "model.json";
  // Sensitivity / ReliefF input; empty means a fresh set at analysis.snr_db.
  std::filesystem::path analysis_dataset;
};

struct CommandOutputs {
  std::vector<std::string> files;  // relative to out
};

CommandOutputs cmd_generate(const ExperimentConfig& config, const CommandPaths& paths);
CommandOutputs cmd_train(const ExperimentConfig& config, const CommandPaths& paths);
/// `classifier`, when set, replaces the model (test hook for oracle models).
CommandOutputs cmd_evaluate(const ExperimentConfig& config, const CommandPaths& paths,
                            const std::optional<Classifier>& classifier = std::nullopt);
CommandOutputs cmd_sensitivity(const ExperimentConfig& config, const CommandPaths& paths);
CommandOutputs cmd_relieff(const ExperimentConfig& config, const CommandPaths& paths);
CommandOutputs cmd_report(const ExperimentConfig& config, const CommandPaths& paths);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> checked;
  std::vector<std::string> mismatched;
};

/// Replays every manifest entry into a scratch directory and compares each
/// recorded output byte-for-byte.
VerifyResult cmd_verify(const std::filesystem::path& out);

std::string confusion_file_name(double snr_db);
std::string format_snr(double snr_db);

}  // namespace essc
