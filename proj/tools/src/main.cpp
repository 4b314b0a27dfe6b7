#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "essc/config.hpp"
#include "essc/error.hpp"
#include "essc/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string pulse;
  std::vector<double> snr_db;
  std::optional<int> jobs;
  std::string out = "out";
  std::string dataset;
  std::string model;
};

essc::ExperimentConfig build_config(const Options& o) {
  std::optional<essc::PulseFamily> family;
  if (!o.pulse.empty()) family = essc::parse_pulse_family(o.pulse);
  essc::ExperimentConfig c = o.config.empty() ? essc::default_config(family.value_or(essc::PulseFamily::Sinc))
                                              : essc::load_config(o.config, family);
  if (o.seed) c.seed = *o.seed;
  if (!o.mode.empty()) c.mode = essc::parse_feature_mode(o.mode);
  if (!o.snr_db.empty()) c.test_snr_db = o.snr_db;
  if (o.jobs) c.jobs = *o.jobs;
  essc::validate_config(c);
  return c;
}

void print_outputs(const essc::CommandOutputs& outputs) {
  for (const auto& f : outputs.files) std::cout << f << '\n';
}

int run(const std::string& command, const Options& o) {
  if (command == "verify") {
    const essc::VerifyResult r = essc::cmd_verify(o.out);
    for (const auto& f : r.mismatched) std::cout << "MISMATCH " << f << '\n';
    std::cout << (r.ok ? "verify ok: " : "verify failed: ") << r.checked.size() << " files checked, "
              << r.mismatched.size() << " mismatched\n";
    return r.ok ? kExitOk : kExitRuntime;
  }

  const essc::ExperimentConfig config = build_config(o);
  essc::CommandPaths paths;
  paths.out = o.out;
  if (!o.model.empty()) paths.model = o.model;
  const bool analysis = command == "sensitivity" || command == "relieff";
  if (!o.dataset.empty()) (analysis ? paths.analysis_dataset : paths.dataset) = o.dataset;

  if (command == "generate") print_outputs(essc::cmd_generate(config, paths));
  else if (command == "train") print_outputs(essc::cmd_train(config, paths));
  else if (command == "evaluate") print_outputs(essc::cmd_evaluate(config, paths));
  else if (command == "sensitivity") print_outputs(essc::cmd_sensitivity(config, paths));
  else if (command == "relieff") print_outputs(essc::cmd_relieff(config, paths));
  else if (command == "report") print_outputs(essc::cmd_report(config, paths));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended statistical signal characterization: dataset generation, ANN training and analysis"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--mode", o.mode, "Feature set")->check(CLI::IsMember({"essc", "ssc"}));
    cmd->add_option("--pulse", o.pulse, "Pulse family")->check(CLI::IsMember({"sinc", "gaussian", "chirp"}));
    cmd->add_option("--snr-db", o.snr_db, "Test SNR levels in dB, comma separated")->delimiter(',');
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  };

  struct Sub {
    const char* name;
    const char* help;
    bool dataset;
    bool model;
  };
  const Sub subs[] = {
      {"generate", "Simulate the training set and write per-class feature CSVs", true, false},
      {"train", "Architecture search and training; writes the model and CE table", true, true},
      {"evaluate", "Confusion matrices on fresh test sets for every SNR level", false, true},
      {"sensitivity", "Per-class, per-parameter sensitivity scan", true, true},
      {"relieff", "ReliefF weights and relevance thresholds", true, false},
      {"report", "Merge every CSV in the output directory into results.json", false, false},
  };
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd);
    if (s.dataset) cmd->add_option("--dataset", o.dataset, "Feature dataset directory (relative to --out)");
    if (s.model) cmd->add_option("--model", o.model, "Model file (relative to --out)");
  }
  CLI::App* verify = app.add_subcommand("verify", "Replay the manifest and compare outputs byte for byte");
  verify->add_option("--out", o.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const essc::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const essc::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
