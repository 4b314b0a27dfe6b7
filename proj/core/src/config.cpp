#include "essc/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "essc/error.hpp"
#include "essc/manifest.hpp"
#include "essc/rng.hpp"

namespace essc {

using nlohmann::json;

NoiseSpec ExperimentConfig::train_noise() const {
  NoiseSpec n = acquisition;
  n.snr_db = NoiseSpec::snr_from_fraction(train_noise_fraction);
  return n;
}

NoiseSpec ExperimentConfig::test_noise(double snr_db) const {
  NoiseSpec n = acquisition;
  n.snr_db = snr_db;
  return n;
}

const FilterSpec& ExperimentConfig::filter_for_class(int class_id) const {
  for (const auto& f : filters) {
    if (f.class_id == class_id) return f;
  }
  throw ParameterError("no filter for class " + std::to_string(class_id));
}

ExperimentConfig default_config(PulseFamily family) {
  ExperimentConfig c;
  c.pulse.family = family;
  c.filters = default_filter_bank(family);
  return c;
}

namespace {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<ChirpEnvelope> kEnvelopes[] = {{ChirpEnvelope::RaisedCosine, "raised_cosine"},
                                                  {ChirpEnvelope::Constant, "constant"}};
constexpr EnumName<JitterMode> kJitterModes[] = {{JitterMode::PerAcquisition, "per_acquisition"},
                                                 {JitterMode::PerSample, "per_sample"}};
constexpr EnumName<FilterStage> kFilterStages[] = {{FilterStage::AfterDecimation, "after_decimation"},
                                                   {FilterStage::BeforeDecimation, "before_decimation"}};
constexpr EnumName<TimeWeight> kTimeWeights[] = {{TimeWeight::Signed, "signed"}, {TimeWeight::Absolute, "absolute"}};
constexpr EnumName<DecisionRule> kDecisionRules[] = {{DecisionRule::WeightedRandom, "weighted_random"},
                                                     {DecisionRule::Argmax, "argmax"}};

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

// Walks one JSON object, records type errors and unknown keys by dotted path.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }

  bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    seen_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key_path(key), "has the wrong type");
    }
  }

  void get_number(const std::string& key, double& out) {
    if (!has(key)) return;
    seen_.insert(key);
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      fail(key_path(key), "must be a number");
      return;
    }
    out = v.get<double>();
  }

  template <typename T>
  void get_count(const std::string& key, T& out) {
    if (!has(key)) return;
    seen_.insert(key);
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 && std::is_unsigned_v<T>)) {
      fail(key_path(key), "must be a non-negative integer");
      return;
    }
    out = v.get<T>();
  }

  template <typename E, std::size_t N>
  void get_enum(const std::string& key, const EnumName<E> (&table)[N], E& out) {
    if (!has(key)) return;
    seen_.insert(key);
    const auto& v = obj_.at(key);
    if (v.is_string()) {
      for (const auto& e : table) {
        if (v.get<std::string>() == e.name) {
          out = e.value;
          return;
        }
      }
    }
    fail(key_path(key), "is not a recognized choice");
  }

  template <typename Parse, typename E>
  void get_parsed(const std::string& key, Parse parse, E& out) {
    if (!has(key)) return;
    seen_.insert(key);
    try {
      out = parse(obj_.at(key).get<std::string>());
    } catch (const std::exception&) {
      fail(key_path(key), "is not a recognized choice");
    }
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    seen_.insert(key);
    return &obj_.at(key);
  }

  void forbid(const std::string& key, const std::string& why) {
    if (!has(key)) return;
    seen_.insert(key);
    fail(key_path(key), why);
  }

  void finish() {
    if (!obj_.is_object()) return;
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) fail(key_path(item.key()), "is not a recognized key");
    }
  }

  void fail(const std::string& key, const std::string& why) { errors_.push_back(key + " " + why); }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

constexpr const char* kTestOnly = "is a test-only key and cannot be used at train time";

[[noreturn]] void reject(const std::vector<std::string>& errors) {
  std::string msg = "invalid config:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ValidationError(msg);
}

void check(std::vector<std::string>& errors, const std::string& key, bool ok, const std::string& why) {
  if (!ok) errors.push_back(key + " " + why);
}

template <typename Fn>
void check_throws(std::vector<std::string>& errors, const std::string& key, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    errors.push_back(key + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, std::optional<PulseFamily> family) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<std::string> errors;
  Reader root(doc, "", errors);
  if (!errors.empty()) reject(errors);

  // The family picks the defaults everything else is layered on.
  PulseFamily fam = PulseFamily::Sinc;
  if (const json* p = doc.contains("pulse") ? &doc.at("pulse") : nullptr;
      p && p->is_object() && p->contains("family") && p->at("family").is_string()) {
    try {
      fam = parse_pulse_family(p->at("family").get<std::string>());
    } catch (const std::exception&) {
    }
  }
  if (family) fam = *family;
  ExperimentConfig c = default_config(fam);

  root.get_count("seed", c.seed);
  root.get("jobs", c.jobs);
  root.get_parsed("mode", [](const std::string& s) { return parse_feature_mode(s); }, c.mode);

  if (const json* p = root.child("pulse")) {
    Reader r(*p, "pulse", errors);
    r.get_parsed("family", [](const std::string& s) { return parse_pulse_family(s); }, c.pulse.family);
    if (family) c.pulse.family = *family;
    r.get_number("duration", c.pulse.duration);
    r.get_count("resolution", c.pulse.resolution);
    r.get_number("center", c.pulse.center);
    r.get_number("sinc_bandwidth", c.pulse.sinc_bandwidth);
    r.get_number("gauss_sigma_t", c.pulse.gauss_sigma_t);
    r.get_number("chirp_nu_lo", c.pulse.chirp_nu_lo);
    r.get_number("chirp_nu_hi", c.pulse.chirp_nu_hi);
    r.get_enum("chirp_envelope", kEnvelopes, c.pulse.chirp_envelope);
    r.finish();
  }

  if (const json* f = root.child("filters")) {
    if (!f->is_array()) {
      errors.push_back("filters must be an array of filter objects");
    } else {
      c.filters.clear();
      for (std::size_t i = 0; i < f->size(); ++i) {
        Reader r(f->at(i), "filters[" + std::to_string(i) + "]", errors);
        FilterSpec s;
        r.get("class_id", s.class_id);
        r.get_parsed("kind", [](const std::string& k) { return parse_filter_kind(k); }, s.kind);
        r.get_number("nu_c", s.nu_c);
        r.get_number("slew_rate", s.slew_rate);
        r.get_number("sigma_nu", s.sigma_nu);
        r.get_number("delta_a", s.delta_a);
        r.finish();
        c.filters.push_back(s);
      }
    }
  }

  if (const json* a = root.child("acquisition")) {
    Reader r(*a, "acquisition", errors);
    r.forbid("snr_db", kTestOnly);
    r.get_number("scale_max", c.acquisition.scale_max);
    r.get_number("offset_max", c.acquisition.offset_max);
    r.get("jitter_max", c.acquisition.jitter_max);
    r.get("decimation", c.acquisition.decimation);
    r.get_enum("jitter_mode", kJitterModes, c.acquisition.jitter_mode);
    r.get_enum("filter_stage", kFilterStages, c.acquisition.filter_stage);
    r.finish();
  }

  if (const json* t = root.child("train")) {
    Reader r(*t, "train", errors);
    r.forbid("snr_db", kTestOnly);
    r.forbid("decision", kTestOnly);
    r.get_number("noise_fraction", c.train_noise_fraction);
    r.get_count("per_class", c.train_per_class);
    r.finish();
  }

  if (const json* t = root.child("test")) {
    Reader r(*t, "test", errors);
    r.get("snr_db", c.test_snr_db);
    r.get_count("per_class", c.test_per_class);
    r.get_enum("decision", kDecisionRules, c.decision);
    r.finish();
  }

  if (const json* f = root.child("features")) {
    Reader r(*f, "features", errors);
    r.get_count("median_window", c.features.median_window);
    r.get_count("mean_window", c.features.mean_window);
    r.get_count("edge_window", c.features.edge_window);
    r.get_number("threshold_frac", c.features.threshold_frac);
    r.get_count("derivative_median_window", c.features.derivative_median_window);
    r.get_enum("time_weight", kTimeWeights, c.features.time_weight);
    r.finish();
  }

  if (const json* n = root.child("ann")) {
    Reader r(*n, "ann", errors);
    r.get("hidden_sizes", c.hidden_sizes);
    r.get("cycles", c.training.cycles);
    r.get_number("learning_rate", c.training.learning_rate);
    r.get_number("momentum", c.training.momentum);
    r.get("max_epochs", c.training.max_epochs);
    r.get("patience", c.training.patience);
    r.get_number("min_improvement", c.training.min_improvement);
    r.get_number("init_range", c.training.init_range);
    r.get_number("clip_eps", c.training.clip_eps);
    r.finish();
  }

  if (const json* n = root.child("analysis")) {
    Reader r(*n, "analysis", errors);
    r.get("relieff_k", c.relieff_k);
    r.get("relieff_alpha", c.relieff_alpha);
    r.get_number("snr_db", c.analysis_snr_db);
    r.finish();
  }

  root.finish();
  if (!errors.empty()) reject(errors);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<PulseFamily> family) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ValidationError(std::string("cannot read config: ") + e.what());
  }
  return config_from_json_text(text, family);
}

void validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  check_throws(errors, "pulse", [&] { c.pulse.validate(); });

  check(errors, "filters", c.filters.size() == static_cast<std::size_t>(kClassCount),
        "must list exactly 5 classes, found " + std::to_string(c.filters.size()));
  std::set<int> ids;
  for (std::size_t i = 0; i < c.filters.size(); ++i) {
    const auto& f = c.filters[i];
    const std::string key = "filters[" + std::to_string(i) + "]";
    check(errors, key + ".class_id", f.class_id >= 1 && f.class_id <= kClassCount, "must be in 1..5");
    check(errors, key + ".class_id", ids.insert(f.class_id).second, "is duplicated");
    check(errors, key + ".kind", f.class_id != 1 || f.kind == FilterKind::None, "class 1 must be undeformed");
    check(errors, key + ".kind", f.class_id == 1 || f.kind != FilterKind::None,
          "classes 2..5 need a deformation filter");
    check_throws(errors, key, [&] { f.validate(); });
  }
  for (int k = 1; k <= kClassCount; ++k) check(errors, "filters", ids.count(k) == 1, "is missing class " + std::to_string(k));

  check_throws(errors, "acquisition", [&] { c.acquisition.validate(); });
  check(errors, "train.noise_fraction", c.train_noise_fraction > 0.0 && c.train_noise_fraction < 1.0,
        "must lie in (0, 1)");
  check(errors, "train.per_class", c.train_per_class >= 1, "must be at least 1");
  check(errors, "test.per_class", c.test_per_class >= 1, "must be at least 1");
  check(errors, "test.snr_db", !c.test_snr_db.empty(), "must list at least one level");
  for (double s : c.test_snr_db) check(errors, "test.snr_db", std::isfinite(s), "must be finite");

  const auto& fc = c.features;
  check(errors, "features.median_window", fc.median_window >= 1, "must be at least 1");
  check(errors, "features.mean_window", fc.mean_window >= 1, "must be at least 1");
  check(errors, "features.edge_window", fc.edge_window >= 1, "must be at least 1");
  check(errors, "features.derivative_median_window", fc.derivative_median_window >= 1, "must be at least 1");
  check(errors, "features.threshold_frac", fc.threshold_frac > 0.0 && fc.threshold_frac < 1.0, "must lie in (0, 1)");

  check(errors, "ann.hidden_sizes", !c.hidden_sizes.empty(), "must not be empty");
  for (int h : c.hidden_sizes) check(errors, "ann.hidden_sizes", h >= 1, "entries must be at least 1");
  const auto& t = c.training;
  check(errors, "ann.cycles", t.cycles >= 1, "must be at least 1");
  check(errors, "ann.learning_rate", t.learning_rate > 0.0 && std::isfinite(t.learning_rate), "must be positive");
  check(errors, "ann.momentum", t.momentum >= 0.0 && t.momentum < 1.0, "must lie in [0, 1)");
  check(errors, "ann.max_epochs", t.max_epochs >= 1, "must be at least 1");
  check(errors, "ann.patience", t.patience >= 0, "must be non-negative");
  check(errors, "ann.min_improvement", t.min_improvement >= 0.0, "must be non-negative");
  check(errors, "ann.init_range", t.init_range > 0.0, "must be positive");
  check(errors, "ann.clip_eps", t.clip_eps > 0.0 && t.clip_eps < 0.5, "must lie in (0, 0.5)");

  check(errors, "analysis.relieff_k", c.relieff_k >= 1, "must be at least 1");
  for (double a : c.relieff_alpha) check(errors, "analysis.relieff_alpha", a > 0.0 && a < 1.0, "entries must lie in (0, 1)");
  check(errors, "analysis.snr_db", std::isfinite(c.analysis_snr_db), "must be finite");
  check(errors, "jobs", c.jobs >= 1, "must be at least 1");
  if (!errors.empty()) reject(errors);
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["mode"] = std::string(to_string(c.mode));
  j["pulse"] = {{"family", std::string(to_string(c.pulse.family))},
                {"duration", c.pulse.duration},
                {"resolution", c.pulse.resolution},
                {"center", c.pulse.center},
                {"sinc_bandwidth", c.pulse.sinc_bandwidth},
                {"gauss_sigma_t", c.pulse.gauss_sigma_t},
                {"chirp_nu_lo", c.pulse.chirp_nu_lo},
                {"chirp_nu_hi", c.pulse.chirp_nu_hi},
                {"chirp_envelope", enum_name(kEnvelopes, c.pulse.chirp_envelope)}};
  json filters = json::array();
  for (const auto& f : c.filters) {
    filters.push_back({{"class_id", f.class_id},
                       {"kind", std::string(to_string(f.kind))},
                       {"nu_c", f.nu_c},
                       {"slew_rate", f.slew_rate},
                       {"sigma_nu", f.sigma_nu},
                       {"delta_a", f.delta_a}});
  }
  j["filters"] = filters;
  j["acquisition"] = {{"scale_max", c.acquisition.scale_max},
                      {"offset_max", c.acquisition.offset_max},
                      {"jitter_max", c.acquisition.jitter_max},
                      {"decimation", c.acquisition.decimation},
                      {"jitter_mode", enum_name(kJitterModes, c.acquisition.jitter_mode)},
                      {"filter_stage", enum_name(kFilterStages, c.acquisition.filter_stage)}};
  j["train"] = {{"noise_fraction", c.train_noise_fraction}, {"per_class", c.train_per_class}};
  j["test"] = {{"snr_db", c.test_snr_db},
               {"per_class", c.test_per_class},
               {"decision", enum_name(kDecisionRules, c.decision)}};
  j["features"] = {{"median_window", c.features.median_window},
                   {"mean_window", c.features.mean_window},
                   {"edge_window", c.features.edge_window},
                   {"threshold_frac", c.features.threshold_frac},
                   {"derivative_median_window", c.features.derivative_median_window},
                   {"time_weight", enum_name(kTimeWeights, c.features.time_weight)}};
  j["ann"] = {{"hidden_sizes", c.hidden_sizes},
              {"cycles", c.training.cycles},
              {"learning_rate", c.training.learning_rate},
              {"momentum", c.training.momentum},
              {"max_epochs", c.training.max_epochs},
              {"patience", c.training.patience},
              {"min_improvement", c.training.min_improvement},
              {"init_range", c.training.init_range},
              {"clip_eps", c.training.clip_eps}};
  j["analysis"] = {{"relieff_k", c.relieff_k},
                   {"relieff_alpha", c.relieff_alpha},
                   {"snr_db", c.analysis_snr_db}};
  return j.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) { return fnv1a64(config_to_json_text(config)); }

std::string config_hash_hex(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

}  // namespace essc
