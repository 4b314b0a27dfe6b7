#include <benchmark/benchmark.h>

#include "essc/experiment.hpp"
#include "essc/features.hpp"
#include "essc/mlp.hpp"

using namespace essc;

namespace {

SampledSignal noisy_pulse(std::size_t n) {
  auto cfg = default_config(PulseFamily::Sinc);
  cfg.pulse.resolution = n * 10;
  const SampledSignal ideal = generate_pulse(cfg.pulse);
  RngStream rng(3);
  return simulate_acquisition(ideal, cfg.filter_for_class(2), cfg.test_noise(20.0), rng);
}

void BM_ExtractFeatures(benchmark::State& state) {
  const SampledSignal raw = noisy_pulse(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(raw, FeatureMode::Essc30));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExtractFeatures)->RangeMultiplier(2)->Range(500, 8000)->Complexity();

void BM_SimulateElement(benchmark::State& state) {
  const auto cfg = default_config(PulseFamily::Sinc);
  const SampledSignal ideal = generate_pulse(cfg.pulse);
  const NoiseSpec noise = cfg.test_noise(20.0);
  std::uint64_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_element(cfg, ideal, noise, RngStream(1).split(i++), 3, FeatureMode::Essc30));
}
BENCHMARK(BM_SimulateElement);

void BM_TrainingStep(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const Eigen::Index m = 5000;
  RngStream rng(5);
  Eigen::MatrixXd x(m, 30);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal(0.0, 1.0);
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 5) + 1;
  const Eigen::MatrixXd y = one_hot(labels, 5);
  MlpModel model = MlpModel::zeros(30, hidden, 5);
  for (Eigen::Index i = 0; i < model.w1.size(); ++i) model.w1.data()[i] = rng.uniform(-0.1, 0.1);
  for (Eigen::Index i = 0; i < model.w2.size(); ++i) model.w2.data()[i] = rng.uniform(-0.1, 0.1);
  Gradients g;
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(model, x, y, g));
}
BENCHMARK(BM_TrainingStep)->Arg(5)->Arg(20)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
