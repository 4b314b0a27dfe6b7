#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "essc/experiment.hpp"

namespace essc::acceptance {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::array<PulseFamily, 3> kFamilies = {PulseFamily::Sinc, PulseFamily::Gaussian, PulseFamily::Chirp};
constexpr std::array<FeatureMode, 2> kModes = {FeatureMode::Essc30, FeatureMode::Ssc4};
constexpr std::array<std::uint64_t, 3> kSeeds = {1, 2, 3};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// Desk-scale experiment: 300 elements per class, 5 restarts per size.
ExperimentConfig desk_config(PulseFamily family, FeatureMode mode, std::uint64_t seed, int jobs) {
  auto c = default_config(family);
  c.mode = mode;
  c.seed = seed;
  c.jobs = jobs;
  c.train_per_class = 300;
  c.test_per_class = 300;
  c.training.cycles = 5;
  return c;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

CommandPaths paths_in(const fs::path& dir) {
  CommandPaths p;
  p.out = dir;
  return p;
}

bool fresh(const fs::path& file, const ExperimentConfig& config) {
  std::ifstream in(file);
  std::string first;
  return in && std::getline(in, first) && first.find(config_hash_hex(config)) != std::string::npos;
}

struct Run {
  ExperimentConfig config;
  fs::path dir;
  std::map<double, double> accuracy;
  std::map<double, ConfusionMatrix> confusion;
};

/// One (family, mode, seed) experiment; generate, train and evaluate run once
/// per process and are shared by criteria 5-10.
class Runs {
 public:
  static Runs& instance() {
    static Runs r;
    return r;
  }

  Run& get(const Options& opt, PulseFamily family, FeatureMode mode, std::uint64_t seed) {
    const std::string key = std::string(to_string(family)) + "-" + std::string(to_string(mode)) + "-seed" +
                            std::to_string(seed);
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;

    Run run{desk_config(family, mode, seed, opt.jobs), opt.work / "runs" / key, {}, {}};
    const CommandPaths paths = paths_in(run.dir);
    if (!(opt.reuse && fresh(run.dir / "accuracy.csv", run.config))) {
      fs::remove_all(run.dir);
      fs::create_directories(run.dir);
      const auto t0 = Clock::now();
      cmd_generate(run.config, paths);
      cmd_train(run.config, paths);
      cmd_evaluate(run.config, paths);
      family_seconds_[family] += std::chrono::duration<double>(Clock::now() - t0).count();
    } else {
      reused_ = true;
    }
    for (const auto& row : read_csv(run.dir / "accuracy.csv")) run.accuracy[std::stod(row[0])] = std::stod(row[1]);
    for (double snr : run.config.test_snr_db) {
      ConfusionMatrix cm;
      for (const auto& row : read_csv(run.dir / confusion_file_name(snr))) {
        const int t = std::stoi(row[0]);
        for (int o = 1; o <= kClassCount; ++o) cm.counts[t - 1][o - 1] = std::stol(row[o]);
      }
      run.confusion[snr] = cm;
    }
    return runs_.emplace(key, std::move(run)).first->second;
  }

  double seconds(PulseFamily family) const {
    auto it = family_seconds_.find(family);
    return it == family_seconds_.end() ? 0.0 : it->second;
  }
  bool reused() const { return reused_; }

 private:
  std::map<std::string, Run> runs_;
  std::map<PulseFamily, double> family_seconds_;
  bool reused_ = false;
};

double mean_accuracy(const Options& opt, PulseFamily family, FeatureMode mode, double snr) {
  double sum = 0.0;
  for (auto seed : kSeeds) sum += Runs::instance().get(opt, family, mode, seed).accuracy.at(snr);
  return sum / static_cast<double>(kSeeds.size());
}

/// Runs an analysis command in the run directory unless a fresh output exists.
template <typename Cmd>
fs::path analysis_output(const Options& opt, Run& run, const char* file, Cmd cmd) {
  const fs::path out = run.dir / file;
  if (!(opt.reuse && fresh(out, run.config))) cmd(run.config, paths_in(run.dir));
  return out;
}

}  // namespace

Outcome essc_beats_ssc(const Options& opt) {
  Outcome o;
  o.pass = true;
  int wins = 0;
  int cases = 0;
  for (auto family : kFamilies) {
    std::string line = std::string(to_string(family)) + ":";
    for (double snr : desk_config(family, FeatureMode::Essc30, 1, 1).test_snr_db) {
      const double e = mean_accuracy(opt, family, FeatureMode::Essc30, snr);
      const double s = mean_accuracy(opt, family, FeatureMode::Ssc4, snr);
      ++cases;
      if (e >= s) ++wins;
      o.pass = o.pass && e >= s;
      line += "  " + format_snr(snr) + " dB essc " + fmt("%.3f", e) + " ssc " + fmt("%.3f", s) + (e >= s ? "" : " <");
    }
    const double secs = Runs::instance().seconds(family);
    line += "  [" + fmt("%.0f s", secs) + "]";
    if (!Runs::instance().reused()) o.pass = o.pass && secs < 1800.0;
    o.details.push_back(line);
  }
  o.summary = std::to_string(wins) + "/" + std::to_string(cases) + " (family, SNR) cases with ESSC >= SSC, 3-seed means";
  return o;
}

Outcome noise_monotonicity(const Options& opt) {
  Outcome o;
  o.pass = true;
  for (auto family : kFamilies) {
    const double hi = mean_accuracy(opt, family, FeatureMode::Essc30, 25.0);
    const double lo = mean_accuracy(opt, family, FeatureMode::Essc30, 10.0);
    o.pass = o.pass && lo <= hi;
    o.details.push_back(std::string(to_string(family)) + ": 25 dB " + fmt("%.3f", hi) + ", 10 dB " + fmt("%.3f", lo));
  }
  o.summary = "ESSC accuracy at 10 dB <= 25 dB for every family";
  return o;
}

Outcome gaussian_lp_confusion(const Options& opt) {
  ConfusionMatrix total;
  for (auto seed : kSeeds) {
    const auto& cm = Runs::instance().get(opt, PulseFamily::Gaussian, FeatureMode::Essc30, seed).confusion.at(25.0);
    for (int t = 0; t < kClassCount; ++t)
      for (int c = 0; c < kClassCount; ++c) total.counts[t][c] += cm.counts[t][c];
  }
  Outcome o;
  const long lp = total.pair_confusion(4, 5);
  long runner_up = 0;
  std::string runner;
  for (int a = 1; a <= kClassCount; ++a) {
    for (int b = a + 1; b <= kClassCount; ++b) {
      if (a == 4 && b == 5) continue;
      if (total.pair_confusion(a, b) > runner_up) {
        runner_up = total.pair_confusion(a, b);
        runner = std::to_string(a) + "<->" + std::to_string(b);
      }
    }
  }
  for (int t = 1; t <= kClassCount; ++t) {
    std::string row = "target " + std::to_string(t) + ":";
    for (int c = 1; c <= kClassCount; ++c) row += " " + std::to_string(total.counts[t - 1][c - 1]);
    o.details.push_back(row);
  }
  o.pass = lp > runner_up;
  o.summary = "4<->5 off-diagonal mass " + std::to_string(lp) + " vs next pair " + runner + " " +
              std::to_string(runner_up) + " (3 seeds pooled)";
  return o;
}

Outcome sensitivity_saturation(const Options& opt) {
  Outcome o;
  std::map<PulseFamily, std::array<double, kClassCount + 1>> frac;
  for (auto family : kFamilies) {
    std::array<std::size_t, kClassCount + 1> hit{};
    std::array<std::size_t, kClassCount + 1> n{};
    for (auto seed : kSeeds) {
      Run& run = Runs::instance().get(opt, family, FeatureMode::Essc30, seed);
      const auto file = analysis_output(opt, run, "sensitivity.csv", cmd_sensitivity);
      for (const auto& row : read_csv(file)) {
        const int c = std::stoi(row[0]);
        const bool high = row[8] == "1";
        hit[c] += high;
        hit[0] += high;
        ++n[c];
        ++n[0];
      }
    }
    std::string line = std::string(to_string(family)) + ": saturated (s_p = 100) overall " +
                       fmt("%.2f", static_cast<double>(hit[0]) / static_cast<double>(n[0])) + ", by class";
    for (int c = 0; c <= kClassCount; ++c) {
      frac[family][c] = static_cast<double>(hit[c]) / static_cast<double>(n[c]);
      if (c > 0) line += " " + fmt("%.2f", frac[family][c]);
    }
    o.details.push_back(line);
  }
  const bool gauss_lp = frac[PulseFamily::Gaussian][4] >= 0.9 && frac[PulseFamily::Gaussian][5] >= 0.9;
  const bool others = frac[PulseFamily::Sinc][0] < 0.9 && frac[PulseFamily::Chirp][0] < 0.9;
  o.pass = gauss_lp && others;
  o.summary = "Gaussian F_LP1/F_LP2 saturated " + fmt("%.2f", frac[PulseFamily::Gaussian][4]) + "/" +
              fmt("%.2f", frac[PulseFamily::Gaussian][5]) + " (>= 0.90); Sinc " +
              fmt("%.2f", frac[PulseFamily::Sinc][0]) + ", Chirp " + fmt("%.2f", frac[PulseFamily::Chirp][0]) +
              " overall (< 0.90)";
  return o;
}

Outcome relieff_positivity(const Options& opt) {
  Outcome o;
  o.pass = true;
  std::map<PulseFamily, double> max_weight;
  for (auto family : kFamilies) {
    double wmax_sum = 0.0;
    double wmin = 1.0;
    for (auto seed : kSeeds) {
      Run& run = Runs::instance().get(opt, family, FeatureMode::Essc30, seed);
      const auto file = analysis_output(opt, run, "relieff.csv", cmd_relieff);
      double wmax = -1.0;
      for (const auto& row : read_csv(file)) {
        const double w = std::stod(row[3]);
        wmax = std::max(wmax, w);
        wmin = std::min(wmin, w);
        o.pass = o.pass && w > 0.0;
      }
      wmax_sum += wmax;
    }
    max_weight[family] = wmax_sum / static_cast<double>(kSeeds.size());
    o.details.push_back(std::string(to_string(family)) + ": min weight " + fmt("%.4f", wmin) + ", mean max weight " +
                        fmt("%.4f", max_weight[family]));
  }
  const bool gauss_lowest = max_weight[PulseFamily::Gaussian] < max_weight[PulseFamily::Sinc] &&
                            max_weight[PulseFamily::Gaussian] < max_weight[PulseFamily::Chirp];
  o.summary = std::string(o.pass ? "all 90 weights positive" : "some weights not positive") + " per seed; Gaussian max " +
              (gauss_lowest ? "is" : "is not") + " the smallest";
  o.pass = o.pass && gauss_lowest;
  return o;
}

Outcome reproducibility(const Options& opt) {
  Run& run = Runs::instance().get(opt, PulseFamily::Sinc, FeatureMode::Essc30, 1);
  analysis_output(opt, run, "sensitivity.csv", cmd_sensitivity);
  analysis_output(opt, run, "relieff.csv", cmd_relieff);
  cmd_report(run.config, paths_in(run.dir));
  const auto v = cmd_verify(run.dir);
  Outcome o;
  o.pass = v.ok && v.mismatched.empty() && !v.checked.empty();
  for (const auto& m : v.mismatched) o.details.push_back("mismatch: " + m);
  o.summary = std::to_string(v.checked.size()) + " files replayed from the manifest, " +
              std::to_string(v.mismatched.size()) + " mismatched";
  return o;
}

}  // namespace essc::acceptance
