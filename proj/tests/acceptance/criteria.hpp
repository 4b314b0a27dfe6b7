#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace essc::acceptance {

struct Options {
  std::filesystem::path work;
  int jobs = 1;
  bool reuse = false;  // keep finished experiment runs found under `work`
};

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

Outcome statistical_oracles(const Options& opt);
Outcome gradient_check(const Options& opt);
Outcome cross_entropy_spot(const Options& opt);
Outcome linear_runtime(const Options& opt);

Outcome essc_beats_ssc(const Options& opt);
Outcome noise_monotonicity(const Options& opt);
Outcome gaussian_lp_confusion(const Options& opt);
Outcome sensitivity_saturation(const Options& opt);
Outcome relieff_positivity(const Options& opt);
Outcome reproducibility(const Options& opt);

}  // namespace essc::acceptance
