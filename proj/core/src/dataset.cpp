#include "essc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <string>

#include "essc/error.hpp"
#include "text.hpp"

namespace essc {

FeatureDataset::FeatureDataset(FeatureMode mode) : mode_(mode) {}

void FeatureDataset::add(int class_id, std::span<const double> features) {
  if (features.size() != width())
    throw ShapeError("feature row has " + std::to_string(features.size()) + " values, expected " +
                     std::to_string(width()));
  if (class_id < 1 || class_id > kClassCount) throw ParameterError("class id must lie in 1..5");
  labels_.push_back(class_id);
  values_.insert(values_.end(), features.begin(), features.end());
}

void FeatureDataset::append(const FeatureDataset& other) {
  if (other.mode_ != mode_) throw ModeMismatchError("cannot append datasets of different feature modes");
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
}

std::span<const double> FeatureDataset::row(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * width(), width());
}

FeatureDataset FeatureDataset::filter_class(int class_id) const {
  FeatureDataset out(mode_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (labels_[i] == class_id) out.add(class_id, row(i));
  }
  return out;
}

FeatureDataset FeatureDataset::project(FeatureMode target) const {
  if (target == mode_) return *this;
  if (target == FeatureMode::Essc30) throw ModeMismatchError("cannot expand SSC4 features to ESSC30");
  FeatureDataset out(target);
  for (std::size_t i = 0; i < size(); ++i) out.add(labels_[i], row(i).first(kSscFeatureCount));
  return out;
}

std::vector<std::size_t> FeatureDataset::class_counts() const {
  std::vector<std::size_t> counts(kClassCount, 0);
  for (int c : labels_) ++counts[static_cast<std::size_t>(c - 1)];
  return counts;
}

std::vector<double> FeatureDataset::column_means() const {
  std::vector<long double> acc(width(), 0.0L);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = row(i);
    for (std::size_t j = 0; j < width(); ++j) acc[j] += r[j];
  }
  std::vector<double> out(width(), 0.0);
  if (empty()) return out;
  for (std::size_t j = 0; j < width(); ++j) out[j] = static_cast<double>(acc[j] / static_cast<long double>(size()));
  return out;
}

void write_dataset_csv(std::ostream& out, const FeatureDataset& dataset, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "class_id";
  for (const auto& name : feature_names(dataset.mode())) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.label(i);
    for (double v : dataset.row(i)) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

FeatureDataset read_dataset_csv(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) throw FormatError("dataset CSV has no header");
  } while (!line.empty() && line[0] == '#');

  const auto header = detail::split(detail::trim_cr(line));
  if (header.empty() || header[0] != "class_id") throw FormatError("dataset CSV header must start with class_id");
  FeatureMode mode;
  if (header.size() == kEsscFeatureCount + 1)
    mode = FeatureMode::Essc30;
  else if (header.size() == kSscFeatureCount + 1)
    mode = FeatureMode::Ssc4;
  else
    throw FormatError("dataset CSV must have 5 or 31 columns, got " + std::to_string(header.size()));
  const auto names = feature_names(mode);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (header[j + 1] != names[j]) throw FormatError("unexpected dataset column '" + std::string(header[j + 1]) + "'");
  }

  FeatureDataset ds(mode);
  std::vector<double> row(names.size());
  while (std::getline(in, line)) {
    const auto text = detail::trim_cr(line);
    if (text.empty() || text[0] == '#') continue;
    const auto cols = detail::split(text);
    if (cols.size() != header.size()) throw FormatError("dataset row has the wrong number of columns");
    const int label = static_cast<int>(detail::parse_double(cols[0]));
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = detail::parse_double(cols[j + 1]);
    ds.add(label, row);
  }
  return ds;
}

FeatureDataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  return read_dataset_csv(in);
}

FeatureDataset load_dataset_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("dataset directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  const std::regex pattern(R"(.*class[1-5]\.csv)");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern))
      files.push_back(entry.path());
  }
  if (files.empty()) throw Error("no class CSV files in " + dir.string());
  std::sort(files.begin(), files.end());
  FeatureDataset ds = load_dataset_csv(files.front());
  for (std::size_t i = 1; i < files.size(); ++i) ds.append(load_dataset_csv(files[i]));
  return ds;
}

}  // namespace essc
