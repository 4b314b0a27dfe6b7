#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "criteria.hpp"

using namespace essc::acceptance;

namespace {

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)(const Options&);
};

const Criterion kCriteria[] = {
    {1, "statistical oracles", statistical_oracles},
    {2, "gradient check", gradient_check},
    {3, "cross-entropy spot value", cross_entropy_spot},
    {4, "linear extraction cost", linear_runtime},
    {5, "ESSC accuracy >= SSC accuracy", essc_beats_ssc},
    {6, "noise monotonicity", noise_monotonicity},
    {7, "Gaussian F_LP1/F_LP2 confusion", gaussian_lp_confusion},
    {8, "sensitivity saturation", sensitivity_saturation},
    {9, "ReliefF positivity", relieff_positivity},
    {10, "manifest reproducibility", reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  Options opt;
  opt.work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--work", opt.work, "Scratch directory for experiment runs")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_flag("--reuse", opt.reuse, "Reuse finished runs under --work");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(opt);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::printf("criterion %2d %s: %s (%s; %.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.summary.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
