#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "essc/acquisition.hpp"
#include "essc/error.hpp"
#include "essc/features.hpp"
#include "essc/rng.hpp"
#include "oracles.hpp"

using namespace essc;

namespace {

SampledSignal decimated_ideal(PulseFamily family) {
  PulseSpec p;
  p.family = family;
  NoiseSpec quiet;
  quiet.scale_max = 0.0;
  quiet.offset_max = 0.0;
  quiet.jitter_max = 0;
  RngStream rng(0);
  return decimate_with_jitter(generate_pulse(p), quiet, rng);
}

std::vector<double> random_vec(RngStream& r, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = r.uniform(lo, hi);
  return v;
}

}  // namespace

TEST(Extrema, MonotoneRampHasOnlyEndpoints) {
  const auto e = detect_extrema(SampledSignal({0, 1, 2, 3, 4}, 0.25));
  EXPECT_EQ(e.indices, (std::vector<std::size_t>{0, 4}));
}

TEST(Extrema, TriangleHasApex) {
  const auto e = detect_extrema(SampledSignal({0, 1, 2, 1, 0}, 0.25));
  EXPECT_EQ(e.indices, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(e.kinds[1], ExtremumKind::Max);
  EXPECT_EQ(e.kinds[0], ExtremumKind::Min);
  EXPECT_EQ(e.kinds[2], ExtremumKind::Min);
}

TEST(Extrema, SineThreePeriods) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 999.0);
  const auto e = detect_extrema(SampledSignal(v, 1.0 / 999.0));
  EXPECT_EQ(e.size(), 8u);
  for (std::size_t k = 1; k < e.size(); ++k) EXPECT_NE(e.kinds[k], e.kinds[k - 1]);
}

TEST(Extrema, PlateauCollapsesToMidpoint) {
  const auto e = detect_extrema(SampledSignal({0, 1, 3, 3, 3, 3, 3, 1, 0}, 1.0));
  EXPECT_EQ(e.indices, (std::vector<std::size_t>{0, 4, 8}));
}

TEST(Segments, SumOfDurationsIsSpan) {
  RngStream r(5);
  for (int k = 0; k < 100; ++k) {
    const auto v = random_vec(r, 50 + static_cast<std::size_t>(k), -1.0, 1.0);
    const SampledSignal s(v, 1.0 / static_cast<double>(v.size() - 1));
    const auto seg = segments_from_extrema(s, detect_extrema(s));
    double total = 0.0;
    for (double t : seg.durations) total += t;
    EXPECT_NEAR(total, 1.0, 1e-9);
    for (double a : seg.amplitudes) EXPECT_GE(a, 0.0);
  }
}

TEST(Ssc, Examples) {
  auto p = ssc_params({{1, 1, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  EXPECT_DOUBLE_EQ(p.m_a, 1.0);
  EXPECT_DOUBLE_EQ(p.d_a, 0.0);
  EXPECT_DOUBLE_EQ(p.m_t, 1.0 / 3);
  EXPECT_NEAR(p.d_t, 0.0, 1e-17);
  p = ssc_params({{2, 1}, {0.1, 0.3}});
  EXPECT_DOUBLE_EQ(p.m_a, 1.5);
  EXPECT_DOUBLE_EQ(p.d_a, 0.5);
  EXPECT_DOUBLE_EQ(p.m_t, 0.2);
  EXPECT_NEAR(p.d_t, 0.1, 1e-16);
  p = ssc_params({{0.7}, {1.0}});
  EXPECT_EQ(p.m_a, 0.7);
  EXPECT_EQ(p.m_t, 1.0);
  EXPECT_EQ(p.d_a, 0.0);
  EXPECT_EQ(p.d_t, 0.0);
  EXPECT_THROW(ssc_params({}), ParameterError);
}

TEST(TimeCumulants, Examples) {
  auto c = time_cumulants(SampledSignal({1, 1}, 1.0));
  EXPECT_DOUBLE_EQ(c.mean, 0.5);
  EXPECT_DOUBLE_EQ(c.c2, 0.25);
  EXPECT_DOUBLE_EQ(c.c3, 0.0);
  c = time_cumulants(SampledSignal({0, 0, 0, 2.5, 0}, 0.25));
  EXPECT_DOUBLE_EQ(c.mean, 0.75);
  EXPECT_NEAR(c.c2, 0.0, 1e-16);
  EXPECT_NEAR(c.c3, 0.0, 1e-16);
  EXPECT_THROW(time_cumulants(SampledSignal({0, 0}, 1.0)), ParameterError);
}

TEST(TimeCumulants, SymmetricPulse) {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-std::pow(static_cast<double>(i) / 1000.0 - 0.5, 2) / 0.005);
  const auto c = time_cumulants(SampledSignal(v, 1e-3));
  EXPECT_NEAR(c.mean, 0.5, 1e-9);
  EXPECT_NEAR(c.c3, 0.0, 1e-9);
}

TEST(AmplitudeMoments, Examples) {
  auto m = amplitude_moments(SampledSignal({0.3, 0.3, 0.3}, 1.0));
  EXPECT_NEAR(m.mean, 0.3, 1e-16);
  EXPECT_NEAR(m.variance, 0.0, 1e-16);
  EXPECT_NEAR(m.third, 0.0, 1e-16);
  m = amplitude_moments(SampledSignal({0, 1}, 1.0));
  EXPECT_DOUBLE_EQ(m.mean, 0.5);
  EXPECT_DOUBLE_EQ(m.variance, 0.25);
  EXPECT_DOUBLE_EQ(m.third, 0.0);
  m = amplitude_moments(SampledSignal({0, 0, 1}, 1.0));
  EXPECT_DOUBLE_EQ(m.mean, 1.0 / 3);
  EXPECT_DOUBLE_EQ(m.variance, 2.0 / 9);
  EXPECT_DOUBLE_EQ(m.third, 2.0 / 27);
}

TEST(Oracle, MomentsCumulantsAndSscOnRandomSignals) {
  RngStream r(77);
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<std::size_t>(r.uniform_int(2, 256));
    const auto v = random_vec(r, n, -1.0, 1.0);
    const double dt = 1.0 / static_cast<double>(n - 1);
    const SampledSignal s(v, dt);

    const auto tc = time_cumulants(s);
    const auto tref = oracle::time_cumulants(v, dt);
    EXPECT_LT(oracle::relative_error(tc.mean, tref.first), 1e-10);
    EXPECT_LT(oracle::relative_error(tc.c2, tref.second), 1e-10);
    EXPECT_LT(oracle::relative_error(tc.c3, tref.third), 1e-10);

    const auto am = amplitude_moments(s);
    const auto aref = oracle::amplitude_moments(v);
    EXPECT_LT(oracle::relative_error(am.mean, aref.first), 1e-10);
    EXPECT_LT(oracle::relative_error(am.variance, aref.second), 1e-10);
    EXPECT_LT(oracle::relative_error(am.third, aref.third), 1e-10);

    const auto a = random_vec(r, n, 0.0, 2.0);
    const auto t = random_vec(r, n, 0.001, 0.1);
    const auto p = ssc_params({a, t});
    const auto pref = oracle::ssc(a, t);
    EXPECT_LT(oracle::relative_error(p.m_a, pref.m_a), 1e-10);
    EXPECT_LT(oracle::relative_error(p.m_t, pref.m_t), 1e-10);
    EXPECT_LT(oracle::relative_error(p.d_a, pref.d_a), 1e-10);
    EXPECT_LT(oracle::relative_error(p.d_t, pref.d_t), 1e-10);
  }
}

TEST(Names, FixedSchema) {
  const auto names = feature_names(FeatureMode::Essc30);
  ASSERT_EQ(names.size(), 30u);
  EXPECT_EQ(names.front(), "sig_MT");
  EXPECT_EQ(names[10], "der_MT");
  EXPECT_EQ(names.back(), "int_Dt3");
  EXPECT_EQ(feature_names(FeatureMode::Ssc4), (std::vector<std::string>{"sig_MT", "sig_DT", "sig_MA", "sig_DA"}));
}

TEST(Extract, NoiselessGaussianSymmetry) {
  const auto raw = decimated_ideal(PulseFamily::Gaussian);
  const auto f = extract_features(raw, FeatureMode::Essc30);
  ASSERT_EQ(f.size(), 30u);
  EXPECT_NEAR(f.values[7], 0.5, 2e-3);   // sig_Mt1
  EXPECT_NEAR(f.values[9], 0.0, 1e-4);   // sig_Dt3

  // The derivative is odd about the centre: under the absolute weight its
  // centroid sits at 0.5; under the signed weight its net mass cancels.
  FeatureConfig abs_cfg;
  abs_cfg.time_weight = TimeWeight::Absolute;
  const auto fa = extract_features(raw, FeatureMode::Essc30, abs_cfg);
  EXPECT_NEAR(fa.values[17], 0.5, 2e-3);  // der_Mt1
  ExtractionTrace trace;
  extract_features(raw, FeatureMode::Essc30, {}, &trace);
  EXPECT_NEAR(time_cumulants(trace.normalized_derivative).zeroth, 0.0, 0.02);
}

TEST(Extract, SscModeIsProjection) {
  const auto raw = decimated_ideal(PulseFamily::Sinc);
  const auto full = extract_features(raw, FeatureMode::Essc30);
  const auto ssc = extract_features(raw, FeatureMode::Ssc4);
  ASSERT_EQ(ssc.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ssc.values[i], full.values[i]);
  EXPECT_EQ(full.project(FeatureMode::Ssc4).values, ssc.values);
  EXPECT_THROW(ssc.project(FeatureMode::Essc30), ModeMismatchError);
}

TEST(Extract, DeterministicAndFinite) {
  const auto raw = decimated_ideal(PulseFamily::Chirp);
  const auto a = extract_features(raw, FeatureMode::Essc30);
  EXPECT_EQ(a.values, extract_features(raw, FeatureMode::Essc30).values);
  for (double v : a.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(Extract, TimeShiftInsideZeroTails) {
  const auto ideal = decimated_ideal(PulseFamily::Gaussian);
  const auto core = ideal.samples();
  // Keep only the support so the tails are exactly zero.
  std::vector<double> pulse;
  for (double v : core)
    if (std::abs(v) > 1e-6) pulse.push_back(v);
  auto embed = [&](std::size_t lead) {
    std::vector<double> v(2000, 0.0);
    std::copy(pulse.begin(), pulse.end(), v.begin() + static_cast<std::ptrdiff_t>(lead));
    return SampledSignal(v, 1e-3);
  };
  const auto a = extract_features(embed(400), FeatureMode::Essc30);
  for (std::size_t lead : {350u, 700u, 1100u}) {
    const auto b = extract_features(embed(lead), FeatureMode::Essc30);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9) << i;
  }
}

TEST(Extract, AmplitudeScaleInvariance) {
  const auto raw = decimated_ideal(PulseFamily::Sinc);
  const auto a = extract_features(raw, FeatureMode::Essc30);
  for (double s : {0.25, 3.0, 1000.0}) {
    std::vector<double> v(raw.samples().begin(), raw.samples().end());
    for (auto& x : v) x *= s;
    const auto b = extract_features(raw.with_samples(v), FeatureMode::Essc30);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9) << i;
  }
}

TEST(Extract, MatchesGoldenFixture) {
  const auto raw = load_signal(std::string(ESSC_TEST_DATA_DIR) + "/fixture_acquired.csv");
  ASSERT_EQ(raw.size(), 1000u);
  const auto f = extract_features(raw, FeatureMode::Essc30);
  std::ifstream in(std::string(ESSC_TEST_DATA_DIR) + "/fixture_features.csv");
  ASSERT_TRUE(in);
  std::string line;
  std::getline(in, line);
  const auto names = feature_names(FeatureMode::Essc30);
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    ASSERT_LT(i, names.size());
    EXPECT_EQ(line.substr(0, comma), names[i]);
    EXPECT_LT(oracle::relative_error(f.values[i], std::stod(line.substr(comma + 1))), 1e-9) << names[i];
    ++i;
  }
  EXPECT_EQ(i, 30u);
}

TEST(Extract, ZeroSignalHasNoPulse) {
  EXPECT_THROW(extract_features(SampledSignal(std::vector<double>(1000, 0.0), 1e-3), FeatureMode::Essc30),
               NoPulseDetectedError);
}
