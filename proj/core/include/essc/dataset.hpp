#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "essc/features.hpp"

namespace essc {

inline constexpr int kClassCount = 5;

/// Labeled feature rows (row-major), class ids in 1..5.
class FeatureDataset {
 public:
  explicit FeatureDataset(FeatureMode mode = FeatureMode::Essc30);

  FeatureMode mode() const { return mode_; }
  std::size_t width() const { return feature_count(mode_); }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  void add(int class_id, std::span<const double> features);
  void append(const FeatureDataset& other);

  std::span<const double> row(std::size_t i) const;
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  FeatureDataset filter_class(int class_id) const;
  FeatureDataset project(FeatureMode target) const;
  std::vector<std::size_t> class_counts() const;  // index 0 -> class 1
  /// Per-column mean over all rows.
  std::vector<double> column_means() const;

 private:
  FeatureMode mode_;
  std::vector<int> labels_;
  std::vector<double> values_;
};

/// `comment`, when non-empty, is written as a leading "# ..." line.
void write_dataset_csv(std::ostream& out, const FeatureDataset& dataset, const std::string& comment = {});
FeatureDataset read_dataset_csv(std::istream& in);

FeatureDataset load_dataset_csv(const std::filesystem::path& path);
/// Reads and concatenates every `*class<k>.csv` file in a directory.
FeatureDataset load_dataset_dir(const std::filesystem::path& dir);

}  // namespace essc
