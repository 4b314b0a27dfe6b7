#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "essc/error.hpp"
#include "essc/signal.hpp"
#include "text.hpp"

namespace essc {
namespace {

constexpr char kMagic[8] = {'E', 'S', 'S', 'C', 'S', 'I', 'G', '\0'};
constexpr std::uint32_t kBinaryVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary signal format assumes little-endian hosts");

template <typename T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw FormatError("truncated binary signal");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

bool has_extension(const std::filesystem::path& path, const char* ext) { return path.extension() == ext; }

}  // namespace

void write_signal_csv(std::ostream& out, const SampledSignal& signal) {
  out << "time,amplitude\n";
  for (std::size_t n = 0; n < signal.size(); ++n) {
    out << detail::format_double(signal.time(n)) << ',' << detail::format_double(signal[n]) << '\n';
  }
}

SampledSignal read_signal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim_cr(line) != "time,amplitude")
    throw FormatError("signal CSV must start with a 'time,amplitude' header");
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    const auto text = detail::trim_cr(line);
    if (text.empty()) continue;
    const auto cols = detail::split(text);
    if (cols.size() != 2) throw FormatError("signal CSV rows need exactly two columns");
    times.push_back(detail::parse_double(cols[0]));
    values.push_back(detail::parse_double(cols[1]));
  }
  if (values.empty()) throw FormatError("signal CSV has no samples");
  const double dt = times.size() > 1 ? (times.back() - times.front()) / static_cast<double>(times.size() - 1) : 1.0;
  return SampledSignal(std::move(values), dt, times.front());
}

void write_signal_binary(std::ostream& out, const SampledSignal& signal) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, signal.size());
  put<double>(out, signal.dt());
  put<double>(out, signal.t0());
  for (double v : signal.samples()) put<double>(out, v);
}

SampledSignal read_signal_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a binary signal file (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kBinaryVersion) throw FormatError("unsupported binary signal version " + std::to_string(version));
  get<std::uint32_t>(in);
  const auto count = get<std::uint64_t>(in);
  const auto dt = get<double>(in);
  const auto t0 = get<double>(in);
  std::vector<double> samples(count);
  for (auto& v : samples) v = get<double>(in);
  return SampledSignal(std::move(samples), dt, t0);
}

void save_signal(const std::filesystem::path& path, const SampledSignal& signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (has_extension(path, ".csv"))
    write_signal_csv(out, signal);
  else
    write_signal_binary(out, signal);
  if (!out) throw Error("failed writing " + path.string());
}

SampledSignal load_signal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return has_extension(path, ".csv") ? read_signal_csv(in) : read_signal_binary(in);
}

}  // namespace essc
