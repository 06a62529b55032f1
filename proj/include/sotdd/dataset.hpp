#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sotdd/errors.hpp"

namespace sotdd {

// A labeled dataset: n rows of d features plus integer class labels.
// Immutable after construction; all downstream code takes read-only views.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::vector<std::int64_t> labels, std::size_t dim,
          std::string name = "")
      : features_(std::move(features)),
        labels_(std::move(labels)),
        dim_(dim),
        name_(std::move(name)) {}

  std::size_t rows() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features_.data() + i * dim_, dim_);
  }
  std::span<const double> features() const { return features_; }
  std::span<const std::int64_t> labels() const { return labels_; }
  std::int64_t label(std::size_t i) const { return labels_[i]; }

 private:
  std::vector<double> features_;
  std::vector<std::int64_t> labels_;
  std::size_t dim_ = 0;
  std::string name_;
};

inline void validate_dataset(const Dataset& dataset) {
  if (dataset.rows() == 0 || dataset.dim() == 0)
    raise(errc::empty_dataset, "dataset must have at least one row and one feature column");
  if (dataset.features().size() != dataset.rows() * dataset.dim())
    raise(errc::length_mismatch,
          "feature storage holds " + std::to_string(dataset.features().size()) +
              " values, expected " + std::to_string(dataset.rows() * dataset.dim()));
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const auto r = dataset.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!std::isfinite(r[j]))
        raise(errc::non_finite_feature,
              "non-finite feature at row " + std::to_string(i) + ", column " + std::to_string(j));
    }
  }
}

// Validating constructor used by all loaders.
inline Dataset make_dataset(std::vector<double> features, std::vector<std::int64_t> labels,
                            std::size_t dim, std::string name = "") {
  if (dim == 0 || labels.empty()) raise(errc::empty_dataset, "empty dataset");
  if (features.size() != labels.size() * dim)
    raise(errc::length_mismatch, "feature/label count mismatch: " +
                                     std::to_string(features.size() / std::max<std::size_t>(dim, 1)) +
                                     " feature rows vs " + std::to_string(labels.size()) + " labels");
  Dataset out(std::move(features), std::move(labels), dim, std::move(name));
  validate_dataset(out);
  return out;
}

// Per-class grouping: sorted distinct labels and, for each, the member rows.
struct ClassIndex {
  std::vector<std::int64_t> classes;          // ascending
  std::vector<std::vector<std::size_t>> members;  // row indices per class, in row order

  std::size_t class_count() const { return classes.size(); }

  std::size_t class_of_label(std::int64_t label) const {
    const auto it = std::lower_bound(classes.begin(), classes.end(), label);
    return static_cast<std::size_t>(it - classes.begin());
  }
};

// A read-only view of one class's rows inside its owning dataset.
struct ClassView {
  std::int64_t label;
  const Dataset* dataset;
  std::span<const std::size_t> rows;

  std::size_t size() const { return rows.size(); }
  std::span<const double> row(std::size_t i) const { return dataset->row(rows[i]); }
};

inline ClassIndex build_class_index(const Dataset& dataset) {
  std::map<std::int64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.rows(); ++i) groups[dataset.label(i)].push_back(i);
  ClassIndex index;
  index.classes.reserve(groups.size());
  index.members.reserve(groups.size());
  for (auto& [label, rows] : groups) {
    index.classes.push_back(label);
    index.members.push_back(std::move(rows));
  }
  return index;
}

inline ClassView class_view(const Dataset& dataset, const ClassIndex& index, std::size_t c) {
  return ClassView{index.classes[c], &dataset, index.members[c]};
}

// Pair-pooled standardization: subtract the pooled per-coordinate mean and
// divide by the pooled standard deviation, floored at 1e-12.
inline std::pair<Dataset, Dataset> standardized_pair(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim())
    raise(errc::dimension_mismatch, "datasets have different feature dimensions");
  const std::size_t d = a.dim();
  const std::size_t n = a.rows() + b.rows();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const Dataset* ds : {&a, &b})
    for (std::size_t i = 0; i < ds->rows(); ++i) {
      const auto r = ds->row(i);
      for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  for (const Dataset* ds : {&a, &b})
    for (std::size_t i = 0; i < ds->rows(); ++i) {
      const auto r = ds->row(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double c = r[j] - mean[j];
        var[j] += c * c;
      }
    }
  std::vector<double> scale(d);
  for (std::size_t j = 0; j < d; ++j)
    scale[j] = 1.0 / std::max(std::sqrt(var[j] / static_cast<double>(n)), 1e-12);

  auto transform = [&](const Dataset& ds) {
    std::vector<double> out(ds.rows() * d);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      const auto r = ds.row(i);
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = (r[j] - mean[j]) * scale[j];
    }
    return Dataset(std::move(out), std::vector<std::int64_t>(ds.labels().begin(), ds.labels().end()),
                   d, ds.name());
  };
  return {transform(a), transform(b)};
}

}  // namespace sotdd
