#include "essc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "essc/acquisition.hpp"
#include "essc/error.hpp"
#include "essc/manifest.hpp"
#include "parallel.hpp"
#include "text.hpp"

namespace essc {

namespace fs = std::filesystem;
using detail::format_double;

namespace {

// Extraction retries use fresh child streams; a no-pulse failure on every
// attempt is a data error.
constexpr int kExtractionAttempts = 8;

fs::path resolve(const fs::path& out, const fs::path& p) { return p.is_absolute() ? p : out / p; }

std::string provenance(const ExperimentConfig& config) {
  return "config_hash=" + config_hash_hex(config) + " seed=" + std::to_string(config.seed) +
         " pulse=" + std::string(to_string(config.pulse.family)) + " mode=" + std::string(to_string(config.mode));
}

std::string header_comment(const ExperimentConfig& config) { return "# " + provenance(config) + "\n"; }

// Output path as stored in the manifest: relative to out when inside it.
std::string manifest_path(const fs::path& out, const fs::path& p) {
  const fs::path rel = p.lexically_relative(out);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

void write_dataset_dir(const ExperimentConfig& config, const fs::path& out, const fs::path& dir,
                       const FeatureDataset& ds, CommandOutputs& outputs) {
  const std::string comment = provenance(config);
  for (int c = 1; c <= kClassCount; ++c) {
    std::ostringstream ss;
    write_dataset_csv(ss, ds.filter_class(c), comment);
    const fs::path file = dir / ("class" + std::to_string(c) + ".csv");
    write_file_atomic(file, ss.str());
    outputs.files.push_back(manifest_path(out, file));
  }
}

void write_output(const fs::path& out, const std::string& name, const std::string& contents, CommandOutputs& outputs) {
  write_file_atomic(out / name, contents);
  outputs.files.push_back(name);
}

void record(const std::string& command, const ExperimentConfig& config, const CommandPaths& paths,
            const CommandOutputs& outputs) {
  Manifest m = read_manifest(paths.out);
  m.record({command, config_to_json_text(config), paths.dataset.generic_string(), paths.model.generic_string(),
            paths.analysis_dataset.generic_string(), outputs.files});
  write_manifest(paths.out, m);
}

FeatureDataset load_checked(const fs::path& dir, FeatureMode mode) {
  if (!fs::is_directory(dir)) throw Error("dataset directory " + dir.string() + " does not exist");
  FeatureDataset ds = load_dataset_dir(dir);
  if (ds.mode() != mode)
    throw ModeMismatchError("dataset " + dir.string() + " is in " + std::string(to_string(ds.mode())) +
                            " mode, config asks for " + std::string(to_string(mode)));
  return ds;
}

FeatureDataset analysis_set(const ExperimentConfig& config, const CommandPaths& paths, CommandOutputs& outputs) {
  if (!paths.analysis_dataset.empty()) return load_checked(resolve(paths.out, paths.analysis_dataset), config.mode);
  FeatureDataset ds = generate_test_set(config, config.analysis_snr_db, config.mode);
  write_dataset_dir(config, paths.out, paths.out / ("analysis_snr" + format_snr(config.analysis_snr_db)), ds, outputs);
  return ds;
}

}  // namespace

std::uint64_t snr_stream_key(double snr_db) {
  return static_cast<std::uint64_t>(std::llround(snr_db * 1000.0));
}

std::string format_snr(double snr_db) { return format_double(snr_db); }

std::string confusion_file_name(double snr_db) { return "confusion_snr" + format_snr(snr_db) + ".csv"; }

EsscFeatures simulate_element(const ExperimentConfig& config, const SampledSignal& ideal, const NoiseSpec& noise,
                              const RngStream& stream, int class_id, FeatureMode mode) {
  const FilterSpec& filter = config.filter_for_class(class_id);
  for (int attempt = 0;; ++attempt) {
    RngStream rng = stream.split(static_cast<std::uint64_t>(attempt));
    const SampledSignal raw = simulate_acquisition(ideal, filter, noise, rng);
    try {
      return extract_features(raw, mode, config.features);
    } catch (const NoPulseDetectedError&) {
      if (attempt + 1 >= kExtractionAttempts) throw;
    }
  }
}

FeatureDataset generate_dataset(const ExperimentConfig& config, const NoiseSpec& noise, std::uint64_t purpose_key,
                                std::size_t per_class, FeatureMode mode) {
  const SampledSignal ideal = generate_pulse(config.pulse);
  const RngStream root(config.seed);
  const std::size_t total = per_class * kClassCount;
  std::vector<EsscFeatures> rows(total);
  detail::parallel_for(total, config.jobs, [&](std::size_t k) {
    const int c = static_cast<int>(k / per_class) + 1;
    const std::size_t i = k % per_class;
    const RngStream stream = root.split({purpose_key, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(i)});
    rows[k] = simulate_element(config, ideal, noise, stream, c, mode);
  });
  FeatureDataset ds(mode);
  for (std::size_t k = 0; k < total; ++k) ds.add(static_cast<int>(k / per_class) + 1, rows[k].values);
  return ds;
}

FeatureDataset generate_training_set(const ExperimentConfig& config, FeatureMode mode) {
  return generate_dataset(config, config.train_noise(), kTrainStreamTag, config.train_per_class, mode);
}

std::uint64_t test_purpose_key(double snr_db) { return mix64(kTestStreamTag ^ mix64(snr_stream_key(snr_db))); }

FeatureDataset generate_test_set(const ExperimentConfig& config, double snr_db, FeatureMode mode) {
  return generate_dataset(config, config.test_noise(snr_db), test_purpose_key(snr_db), config.test_per_class, mode);
}

TrainingOptions training_options(const ExperimentConfig& config) {
  TrainingOptions t = config.training;
  t.jobs = config.jobs;
  return t;
}

RngStream ann_stream(const ExperimentConfig& config) { return RngStream(config.seed).split(kAnnStreamTag); }

RngStream classify_stream(const ExperimentConfig& config, double snr_db) {
  return RngStream(config.seed).split({kClassifyStreamTag, snr_stream_key(snr_db)});
}

// --- commands ------------------------------------------------------------------

CommandOutputs cmd_generate(const ExperimentConfig& config, const CommandPaths& paths) {
  validate_config(config);
  CommandOutputs outputs;
  const FeatureDataset ds = generate_training_set(config, config.mode);
  write_dataset_dir(config, paths.out, resolve(paths.out, paths.dataset), ds, outputs);

  std::ostringstream g;
  g << header_comment(config) << "nu";
  for (int c = 1; c <= kClassCount; ++c) g << ",class" << c;
  g << '\n';
  std::vector<std::vector<GainPoint>> curves;
  for (int c = 1; c <= kClassCount; ++c) {
    const FilterSpec& f = config.filter_for_class(c);
    curves.push_back(gain_curve(f.is_deformation() ? f : config.filter_for_class(2), 0.0, 20.0, 0.05));
    if (!f.is_deformation()) {
      for (auto& p : curves.back()) p.gain = 1.0;
    }
  }
  for (std::size_t k = 0; k < curves[0].size(); ++k) {
    g << format_double(curves[0][k].nu);
    for (const auto& curve : curves) g << ',' << format_double(curve[k].gain);
    g << '\n';
  }
  write_output(paths.out, "filter_gains.csv", g.str(), outputs);
  record("generate", config, paths, outputs);
  return outputs;
}

CommandOutputs cmd_train(const ExperimentConfig& config, const CommandPaths& paths) {
  validate_config(config);
  CommandOutputs outputs;
  const FeatureDataset ds = load_checked(resolve(paths.out, paths.dataset), config.mode);
  ArchitectureSearch search = select_architecture(ds, config.hidden_sizes, training_options(config), ann_stream(config));

  MlpModel& model = search.best.model;
  model.pulse_family = std::string(to_string(config.pulse.family));
  model.seed = config.seed;
  const fs::path model_path = resolve(paths.out, paths.model);
  save_model(model_path, model);
  outputs.files.push_back(manifest_path(paths.out, model_path));

  std::ostringstream t;
  t << header_comment(config) << "n_hidden,ce_min,chosen_cycle\n";
  for (const auto& row : search.table)
    t << row.n_hidden << ',' << format_double(row.ce_min) << ',' << row.chosen_cycle << '\n';
  write_output(paths.out, "ce_vs_nhl.csv", t.str(), outputs);

  std::ostringstream h;
  h << header_comment(config) << "epoch,ce\n";
  const auto& hist = search.best.report.ce_history;
  for (std::size_t e = 0; e < hist.size(); ++e) h << e << ',' << format_double(hist[e]) << '\n';
  write_output(paths.out, "ce_history.csv", h.str(), outputs);

  record("train", config, paths, outputs);
  return outputs;
}

CommandOutputs cmd_evaluate(const ExperimentConfig& config, const CommandPaths& paths,
                            const std::optional<Classifier>& classifier) {
  validate_config(config);
  CommandOutputs outputs;
  std::optional<MlpModel> model;
  if (!classifier) {
    model = load_model(resolve(paths.out, paths.model));
    if (model->mode != config.mode)
      throw ModeMismatchError("model was trained in " + std::string(to_string(model->mode)) +
                              " mode, config asks for " + std::string(to_string(config.mode)));
  }

  std::ostringstream acc;
  acc << header_comment(config) << "snr_db,accuracy,total\n";
  for (double snr : config.test_snr_db) {
    const FeatureDataset test = generate_test_set(config, snr, config.mode);
    write_dataset_dir(config, paths.out, paths.out / ("test_snr" + format_snr(snr)), test, outputs);
    const RngStream rng = classify_stream(config, snr);
    ConfusionMatrix cm = classifier ? evaluate_confusion(test, *classifier, rng)
                                    : evaluate_confusion(*model, test, rng, config.decision);
    cm.snr_db = snr;

    std::ostringstream cs;
    cs << header_comment(config) << "target";
    for (int o = 1; o <= kClassCount; ++o) cs << ",out" << o;
    cs << '\n';
    for (int t = 1; t <= kClassCount; ++t) {
      cs << t;
      for (int o = 1; o <= kClassCount; ++o) cs << ',' << cm.counts[t - 1][o - 1];
      cs << '\n';
    }
    write_output(paths.out, confusion_file_name(snr), cs.str(), outputs);
    acc << format_snr(snr) << ',' << format_double(cm.accuracy()) << ',' << cm.total() << '\n';
  }
  write_output(paths.out, "accuracy.csv", acc.str(), outputs);
  if (!classifier) record("evaluate", config, paths, outputs);
  return outputs;
}

CommandOutputs cmd_sensitivity(const ExperimentConfig& config, const CommandPaths& paths) {
  validate_config(config);
  CommandOutputs outputs;
  const MlpModel model = load_model(resolve(paths.out, paths.model));
  if (model.mode != config.mode) throw ModeMismatchError("model and config feature modes differ");
  const FeatureDataset ds = analysis_set(config, paths, outputs);
  const SensitivityResult result = sensitivity_analysis(model, ds);

  const auto names = feature_names(config.mode);
  std::ostringstream s;
  s << header_comment(config)
    << "class,source,parameter,feature,s_p,delta_90,crossing_step,base_probability,saturated_high,saturated_low\n";
  for (const auto& e : result.entries) {
    s << e.class_id << ',' << kSourceNames[e.feature_index / kParamsPerSource] << ','
      << kParamNames[e.feature_index % kParamsPerSource] << ',' << names[e.feature_index] << ','
      << format_double(e.s_p) << ',' << format_double(e.delta_90) << ',' << e.crossing_step << ','
      << format_double(e.base_probability) << ',' << (e.saturated_high ? 1 : 0) << ',' << (e.saturated_low ? 1 : 0)
      << '\n';
  }
  write_output(paths.out, "sensitivity.csv", s.str(), outputs);
  record("sensitivity", config, paths, outputs);
  return outputs;
}

CommandOutputs cmd_relieff(const ExperimentConfig& config, const CommandPaths& paths) {
  validate_config(config);
  CommandOutputs outputs;
  const FeatureDataset ds = analysis_set(config, paths, outputs);
  const ReliefFResult r = relieff(ds, config.relieff_k, config.jobs);
  const auto m = static_cast<double>(r.m);

  std::vector<double> taus;
  for (double a : config.relieff_alpha) taus.push_back(relieff_threshold(a, m));

  const auto names = feature_names(ds.mode());
  std::ostringstream w;
  w << header_comment(config) << "source,parameter,feature,weight";
  for (double a : config.relieff_alpha) w << ",above_tau_alpha" << format_double(a);
  w << '\n';
  for (std::size_t j = 0; j < r.weights.size(); ++j) {
    w << kSourceNames[j / kParamsPerSource] << ',' << kParamNames[j % kParamsPerSource] << ',' << names[j] << ','
      << format_double(r.weights[j]);
    for (double tau : taus) w << ',' << (r.weights[j] > tau ? 1 : 0);
    w << '\n';
  }
  write_output(paths.out, "relieff.csv", w.str(), outputs);

  std::ostringstream t;
  t << header_comment(config) << "basis,alpha,m,tau,k_neighbors\n";
  for (std::size_t i = 0; i < taus.size(); ++i)
    t << "alpha," << format_double(config.relieff_alpha[i]) << ',' << r.m << ',' << format_double(taus[i]) << ','
      << r.k_neighbors << '\n';
  const double wmax = *std::max_element(r.weights.begin(), r.weights.end());
  if (wmax > 0.0)
    t << "max_weight," << format_double(relieff_alpha_for(wmax, m)) << ',' << r.m << ',' << format_double(wmax) << ','
      << r.k_neighbors << '\n';
  write_output(paths.out, "relieff_tau.csv", t.str(), outputs);
  record("relieff", config, paths, outputs);
  return outputs;
}

namespace {

nlohmann::json csv_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  nlohmann::json rows = nlohmann::json::array();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split(line);
    if (header.empty()) {
      for (auto c : cells) header.emplace_back(c);
      continue;
    }
    if (cells.size() != header.size()) throw FormatError("ragged CSV row in report input");
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        row[header[i]] = detail::parse_double(cells[i]);
      } catch (const FormatError&) {
        row[header[i]] = std::string(cells[i]);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

CommandOutputs cmd_report(const ExperimentConfig& config, const CommandPaths& paths) {
  validate_config(config);
  CommandOutputs outputs;
  nlohmann::json tables = nlohmann::json::object();
  std::vector<std::string> names = {"filter_gains.csv", "ce_vs_nhl.csv", "ce_history.csv", "accuracy.csv",
                                    "sensitivity.csv", "relieff.csv", "relieff_tau.csv"};
  for (double snr : config.test_snr_db) names.push_back(confusion_file_name(snr));
  for (const auto& name : names) {
    const fs::path p = paths.out / name;
    if (!fs::exists(p)) continue;
    tables[fs::path(name).stem().string()] = csv_table(read_file(p));
  }
  const nlohmann::json bundle = {{"config_hash", config_hash_hex(config)},
                                 {"seed", config.seed},
                                 {"pulse", std::string(to_string(config.pulse.family))},
                                 {"mode", std::string(to_string(config.mode))},
                                 {"config", nlohmann::json::parse(config_to_json_text(config))},
                                 {"tables", tables}};
  write_output(paths.out, "results.json", bundle.dump(1) + "\n", outputs);
  record("report", config, paths, outputs);
  return outputs;
}

VerifyResult cmd_verify(const fs::path& out) {
  const Manifest manifest = read_manifest(out);
  if (manifest.entries.empty()) throw Error("no manifest entries in " + out.string());

  std::random_device rd;
  const fs::path scratch =
      fs::temp_directory_path() / ("essc-verify-" + std::to_string((static_cast<std::uint64_t>(rd()) << 32) ^ rd()));
  fs::create_directories(scratch);

  // Files written outside `out` are redirected into the scratch tree.
  std::map<std::string, fs::path> redirected;
  auto map_path = [&](const std::string& p, bool produced) -> fs::path {
    if (p.empty() || !fs::path(p).is_absolute()) return p;
    if (auto it = redirected.find(p); it != redirected.end()) return it->second;
    if (!produced) return p;
    const fs::path target = scratch / ("external" + std::to_string(redirected.size()));
    redirected[p] = target;
    return target;
  };
  auto replay_file = [&](const std::string& recorded) -> fs::path {
    const fs::path p(recorded);
    if (!p.is_absolute()) return scratch / p;
    if (auto it = redirected.find(recorded); it != redirected.end()) return it->second;
    const fs::path parent = map_path(p.parent_path().generic_string(), false);
    return parent / p.filename();
  };

  VerifyResult result;
  try {
    for (const auto& e : manifest.entries) {
      const ExperimentConfig config = config_from_json_text(e.config_json);
      CommandPaths paths;
      paths.out = scratch;
      paths.dataset = map_path(e.dataset, e.command == "generate");
      paths.model = map_path(e.model, e.command == "train");
      paths.analysis_dataset = map_path(e.analysis_dataset, false);
      if (e.command == "generate")
        cmd_generate(config, paths);
      else if (e.command == "train")
        cmd_train(config, paths);
      else if (e.command == "evaluate")
        cmd_evaluate(config, paths);
      else if (e.command == "sensitivity")
        cmd_sensitivity(config, paths);
      else if (e.command == "relieff")
        cmd_relieff(config, paths);
      else if (e.command == "report")
        cmd_report(config, paths);
      else
        throw FormatError("manifest names unknown command '" + e.command + "'");

      for (const auto& f : e.outputs) {
        const fs::path original = fs::path(f).is_absolute() ? fs::path(f) : out / f;
        const fs::path replayed = replay_file(f);
        result.checked.push_back(f);
        bool same = false;
        if (fs::exists(original) && fs::exists(replayed)) same = read_file(original) == read_file(replayed);
        if (!same) {
          result.ok = false;
          result.mismatched.push_back(f);
        }
      }
    }
  } catch (...) {
    fs::remove_all(scratch);
    throw;
  }
  fs::remove_all(scratch);
  return result;
}

}  // namespace essc
