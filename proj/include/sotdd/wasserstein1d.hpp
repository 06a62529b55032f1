#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sotdd/errors.hpp"

namespace sotdd {

namespace detail {

inline double abs_diff_pow(double a, double b, double p) {
  const double d = std::fabs(a - b);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

}  // namespace detail

// A discrete distribution on the real line as a step inverse CDF: ascending
// positions with positive weights summing to one. Weights are renormalized
// exactly once at construction; later drift is an error.
struct SortedWeightedSamples {
  std::vector<double> positions;
  std::vector<double> weights;

  static SortedWeightedSamples from_unsorted(std::vector<double> positions,
                                             std::vector<double> weights) {
    if (positions.size() != weights.size())
      raise(errc::length_mismatch, "positions and weights differ in length");
    if (positions.empty()) raise(errc::empty_dataset, "empty sample set");
    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
    SortedWeightedSamples out;
    out.positions.reserve(order.size());
    out.weights.reserve(order.size());
    double mass = 0.0;
    for (std::size_t i : order) {
      if (!(weights[i] > 0.0)) raise(errc::mass_mismatch, "weights must be positive");
      out.positions.push_back(positions[i]);
      out.weights.push_back(weights[i]);
      mass += weights[i];
    }
    if (std::fabs(mass - 1.0) > 1e-12) {
      for (double& w : out.weights) w /= mass;
    }
    return out;
  }

  static SortedWeightedSamples uniform_from_sorted(std::vector<double> sorted_positions) {
    if (sorted_positions.empty()) raise(errc::empty_dataset, "empty sample set");
    SortedWeightedSamples out;
    const double w = 1.0 / static_cast<double>(sorted_positions.size());
    out.weights.assign(sorted_positions.size(), w);
    out.positions = std::move(sorted_positions);
    return out;
  }

  void check() const {
    if (positions.size() != weights.size())
      raise(errc::length_mismatch, "positions and weights differ in length");
    if (positions.empty()) raise(errc::empty_dataset, "empty sample set");
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
      if (positions[i] > positions[i + 1]) raise(errc::mass_mismatch, "positions not ascending");
    for (double w : weights) {
      if (!(w > 0.0)) raise(errc::mass_mismatch, "weights must be positive");
      mass += w;
    }
    if (std::fabs(mass - 1.0) > 1e-12)
      raise(errc::mass_mismatch, "total mass " + std::to_string(mass) + " is not 1");
  }
};

// W_p^p between two discrete one-dimensional distributions via a two-pointer
// sweep over the union of cumulative-weight breakpoints. Exact for discrete
// inputs: every quantile segment contributes (segment mass) * |qa - qb|^p.
inline double w1d_pp(const SortedWeightedSamples& a, const SortedWeightedSamples& b, double p) {
  if (!(p >= 1.0)) raise(errc::invalid_order, "order p must be >= 1");
  a.check();
  b.check();
  double total = 0.0;
  std::size_t i = 0, j = 0;
  double ra = a.weights[0], rb = b.weights[0];
  while (i < a.positions.size() && j < b.positions.size()) {
    const double seg = ra < rb ? ra : rb;
    total += seg * detail::abs_diff_pow(a.positions[i], b.positions[j], p);
    ra -= seg;
    rb -= seg;
    if (ra <= 0.0) {
      ++i;
      if (i < a.weights.size()) ra = a.weights[i];
    }
    if (rb <= 0.0) {
      ++j;
      if (j < b.weights.size()) rb = b.weights[j];
    }
  }
  return total;
}

// Uniform equal-size specialization of the closed form: (1/n) sum |a_i - b_i|^p
// over the sorted pairing.
inline double w1d_equal_uniform_pp(std::span<const double> a_sorted,
                                   std::span<const double> b_sorted, double p) {
  if (!(p >= 1.0)) raise(errc::invalid_order, "order p must be >= 1");
  if (a_sorted.size() != b_sorted.size())
    raise(errc::length_mismatch, "equal-uniform form needs equal sample counts");
  if (a_sorted.empty()) raise(errc::empty_dataset, "empty sample set");
  double total = 0.0;
  for (std::size_t i = 0; i < a_sorted.size(); ++i)
    total += detail::abs_diff_pow(a_sorted[i], b_sorted[i], p);
  return total / static_cast<double>(a_sorted.size());
}

// Dispatch used by the engine: equal sizes take the sorted-pairing path,
// unequal sizes the weighted merge with masses 1/n and 1/m.
inline double w1d_uniform_sorted_pp(std::span<const double> a_sorted,
                                    std::span<const double> b_sorted, double p) {
  if (a_sorted.size() == b_sorted.size()) return w1d_equal_uniform_pp(a_sorted, b_sorted, p);
  if (!(p >= 1.0)) raise(errc::invalid_order, "order p must be >= 1");
  if (a_sorted.empty() || b_sorted.empty()) raise(errc::empty_dataset, "empty sample set");
  const double wa = 1.0 / static_cast<double>(a_sorted.size());
  const double wb = 1.0 / static_cast<double>(b_sorted.size());
  double total = 0.0;
  std::size_t i = 0, j = 0;
  double ra = wa, rb = wb;
  while (i < a_sorted.size() && j < b_sorted.size()) {
    const double seg = ra < rb ? ra : rb;
    total += seg * detail::abs_diff_pow(a_sorted[i], b_sorted[j], p);
    ra -= seg;
    rb -= seg;
    if (ra <= 0.0) {
      ++i;
      ra = wa;
    }
    if (rb <= 0.0) {
      ++j;
      rb = wb;
    }
  }
  return total;
}

}  // namespace sotdd
