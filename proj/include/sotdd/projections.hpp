#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sotdd/dataset.hpp"
#include "sotdd/errors.hpp"
#include "sotdd/rng.hpp"

namespace sotdd {

namespace detail {

// Balanced pairwise summation with exact midpoint splits. Besides accuracy,
// the midpoint split guarantees sum(V ++ V) == 2 * sum(V) bitwise, which is
// what makes class moments invariant under merging identical classes.
inline double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n == 1) return values[0];
  if (n == 2) return values[0] + values[1];
  const std::size_t mid = n / 2;
  return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

template <typename Fn>
double pairwise_sum_transform(std::size_t lo, std::size_t hi, const Fn& fn) {
  const std::size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n == 1) return fn(lo);
  if (n == 2) return fn(lo) + fn(lo + 1);
  const std::size_t mid = lo + n / 2;
  return pairwise_sum_transform(lo, mid, fn) + pairwise_sum_transform(mid, hi, fn);
}

inline const double* factorial_table() {
  static const auto table = [] {
    static double t[21];
    t[0] = 1.0;
    for (int i = 1; i <= 20; ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  return table;
}

inline double pow_u64(double x, std::uint64_t e) {
  double result = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

// x^lambda / lambda!. Direct for lambda <= 20 (factorials fit comfortably);
// log-space via lgamma above that to dodge spurious intermediate overflow.
inline double scaled_power_term(double x, std::uint64_t lambda) {
  if (lambda <= 20) return pow_u64(x, lambda) / factorial_table()[lambda];
  if (x == 0.0) return 0.0;
  const double mag =
      std::exp(static_cast<double>(lambda) * std::log(std::fabs(x)) -
               std::lgamma(static_cast<double>(lambda) + 1.0));
  return (x < 0.0 && (lambda & 1)) ? -mag : mag;
}

}  // namespace detail

// --- Feature projections -----------------------------------------------------

inline double feature_project_linear(std::span<const double> direction,
                                     std::span<const double> x) {
  if (direction.size() != x.size())
    raise(errc::dimension_mismatch, "direction has dimension " + std::to_string(direction.size()) +
                                        ", point has " + std::to_string(x.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += direction[i] * x[i];
  return acc;
}

struct ConvShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t flat_size() const { return height * width * channels; }
  bool operator==(const ConvShape&) const = default;
};

// One stage of a strided convolution cascade. Stage 0 collapses all input
// channels; later stages are single-channel. weights are laid out
// [ksize][ksize][in_channels].
struct ConvStage {
  std::size_t ksize = 3;
  std::size_t stride = 2;
  std::size_t pad = 1;
  std::size_t in_channels = 1;
  std::vector<double> weights;

  std::size_t out_extent(std::size_t in) const { return (in + 2 * pad - ksize) / stride + 1; }
};

// A random convolution feature projector: strided kernel cascade down to a
// small spatial grid, then a mixing vector producing the final scalar. The
// whole map is linear in the input image.
struct ConvProjector {
  ConvShape shape;
  std::vector<ConvStage> stages;
  std::vector<double> mixing;

  void validate() const {
    if (shape.flat_size() == 0) raise(errc::shape_mismatch, "empty convolution input shape");
    std::size_t h = shape.height, w = shape.width, c = shape.channels;
    for (const auto& stage : stages) {
      if (stage.in_channels != c)
        raise(errc::shape_mismatch, "stage expects " + std::to_string(stage.in_channels) +
                                        " channels, pipeline carries " + std::to_string(c));
      if (stage.weights.size() != stage.ksize * stage.ksize * stage.in_channels)
        raise(errc::shape_mismatch, "stage kernel size mismatch");
      if (h + 2 * stage.pad < stage.ksize || w + 2 * stage.pad < stage.ksize)
        raise(errc::shape_mismatch, "kernel larger than padded input");
      h = stage.out_extent(h);
      w = stage.out_extent(w);
      c = 1;
    }
    if (mixing.size() != h * w * c)
      raise(errc::shape_mismatch, "mixing vector has " + std::to_string(mixing.size()) +
                                      " weights, feature map has " + std::to_string(h * w * c));
  }
};

namespace detail {

// Applies one stage. Input layout is row-major [h][w][channels]; output is
// single-channel [h'][w'].
inline void conv_stage_forward(const ConvStage& stage, std::span<const double> in, std::size_t h,
                               std::size_t w, std::vector<double>& out, std::size_t& oh,
                               std::size_t& ow) {
  oh = stage.out_extent(h);
  ow = stage.out_extent(w);
  out.assign(oh * ow, 0.0);
  const std::size_t c = stage.in_channels;
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (std::size_t ky = 0; ky < stage.ksize; ++ky) {
        const std::ptrdiff_t iy =
            static_cast<std::ptrdiff_t>(oy * stage.stride + ky) - static_cast<std::ptrdiff_t>(stage.pad);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t kx = 0; kx < stage.ksize; ++kx) {
          const std::ptrdiff_t ix =
              static_cast<std::ptrdiff_t>(ox * stage.stride + kx) - static_cast<std::ptrdiff_t>(stage.pad);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
          const double* px = in.data() + (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * c;
          const double* kw = stage.weights.data() + (ky * stage.ksize + kx) * c;
          for (std::size_t ch = 0; ch < c; ++ch) acc += px[ch] * kw[ch];
        }
      }
      out[oy * ow + ox] = acc;
    }
  }
}

// Adjoint of one stage: scatters an output-space gradient back to input space.
inline void conv_stage_adjoint(const ConvStage& stage, std::span<const double> grad_out,
                               std::size_t h, std::size_t w, std::vector<double>& grad_in) {
  const std::size_t oh = stage.out_extent(h);
  const std::size_t ow = stage.out_extent(w);
  const std::size_t c = stage.in_channels;
  grad_in.assign(h * w * c, 0.0);
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      const double g = grad_out[oy * ow + ox];
      if (g == 0.0) continue;
      for (std::size_t ky = 0; ky < stage.ksize; ++ky) {
        const std::ptrdiff_t iy =
            static_cast<std::ptrdiff_t>(oy * stage.stride + ky) - static_cast<std::ptrdiff_t>(stage.pad);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t kx = 0; kx < stage.ksize; ++kx) {
          const std::ptrdiff_t ix =
              static_cast<std::ptrdiff_t>(ox * stage.stride + kx) - static_cast<std::ptrdiff_t>(stage.pad);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
          double* px = grad_in.data() + (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * c;
          const double* kw = stage.weights.data() + (ky * stage.ksize + kx) * c;
          for (std::size_t ch = 0; ch < c; ++ch) px[ch] += g * kw[ch];
        }
      }
    }
  }
}

}  // namespace detail

inline double feature_project_conv(const ConvProjector& projector, std::span<const double> image) {
  if (image.size() != projector.shape.flat_size())
    raise(errc::shape_mismatch, "image has " + std::to_string(image.size()) +
                                    " values, projector expects " +
                                    std::to_string(projector.shape.flat_size()));
  std::size_t h = projector.shape.height, w = projector.shape.width;
  std::vector<double> cur(image.begin(), image.end());
  std::vector<double> next;
  for (const auto& stage : projector.stages) {
    std::size_t oh = 0, ow = 0;
    detail::conv_stage_forward(stage, cur, h, w, next, oh, ow);
    cur.swap(next);
    h = oh;
    w = ow;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) acc += cur[i] * projector.mixing[i];
  return acc;
}

// The composite map is a linear functional x -> a.x; this recovers a exactly
// by pushing the scalar 1 through the adjoint of every stage.
inline std::vector<double> conv_representing_vector(const ConvProjector& projector) {
  std::vector<std::size_t> hs, ws;
  std::size_t h = projector.shape.height, w = projector.shape.width;
  for (const auto& stage : projector.stages) {
    hs.push_back(h);
    ws.push_back(w);
    h = stage.out_extent(h);
    w = stage.out_extent(w);
  }
  std::vector<double> grad(projector.mixing.begin(), projector.mixing.end());
  std::vector<double> prev;
  for (std::size_t s = projector.stages.size(); s-- > 0;) {
    detail::conv_stage_adjoint(projector.stages[s], grad, hs[s], ws[s], prev);
    grad.swap(prev);
  }
  return grad;
}

// Random cascade: 3x3 kernels, stride 2, zero padding, repeated until the
// spatial extent is <= 3, then a dense mixing vector. Kernel and mixing
// entries are i.i.d. standard Gaussian; the mixing vector is rescaled so the
// composite linear functional has unit Euclidean norm.
inline ConvProjector make_random_conv_projector(const ConvShape& shape, RngStream& stream) {
  if (shape.flat_size() == 0) raise(errc::shape_mismatch, "empty convolution input shape");
  ConvProjector projector;
  projector.shape = shape;
  std::size_t h = shape.height, w = shape.width, c = shape.channels;
  while (h > 3 || w > 3) {
    ConvStage stage;
    stage.in_channels = c;
    stage.weights.resize(stage.ksize * stage.ksize * c);
    for (double& v : stage.weights) v = stream.next_gaussian();
    h = stage.out_extent(h);
    w = stage.out_extent(w);
    c = 1;
    projector.stages.push_back(std::move(stage));
  }
  projector.mixing.resize(h * w * c);
  for (double& v : projector.mixing) v = stream.next_gaussian();
  projector.validate();

  const std::vector<double> rep = conv_representing_vector(projector);
  double norm_sq = 0.0;
  for (double v : rep) norm_sq += v * v;
  if (norm_sq > 1e-300) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : projector.mixing) v *= inv;
  }
  return projector;
}

// Either projection family behind one call surface.
struct FeatureProjector {
  std::variant<std::vector<double>, ConvProjector> impl;

  static FeatureProjector linear(std::vector<double> direction) {
    return FeatureProjector{std::move(direction)};
  }
  static FeatureProjector convolution(ConvProjector projector) {
    return FeatureProjector{std::move(projector)};
  }

  double operator()(std::span<const double> x) const {
    if (const auto* dir = std::get_if<std::vector<double>>(&impl))
      return feature_project_linear(*dir, x);
    return feature_project_conv(std::get<ConvProjector>(impl), x);
  }
};

// --- Moments -----------------------------------------------------------------

// (1/n) sum x_i^lambda / lambda!. Raises MomentOverflow when any term or the
// total leaves the finite range of 64-bit reals.
inline double scaled_moment(std::span<const double> values, std::uint64_t lambda) {
  if (values.empty()) raise(errc::empty_dataset, "scaled moment of an empty sample");
  if (lambda < 1) raise(errc::invalid_order, "moment order must be >= 1");
  bool bad_term = false;
  const double total = detail::pairwise_sum_transform(0, values.size(), [&](std::size_t i) {
    const double term = detail::scaled_power_term(values[i], lambda);
    if (!std::isfinite(term)) bad_term = true;
    return term;
  });
  const double result = total / static_cast<double>(values.size());
  if (bad_term || !std::isfinite(result))
    raise(errc::moment_overflow,
          "scaled moment of order " + std::to_string(lambda) + " is non-finite");
  return result;
}

// Moment Transform Projection of one class: project each member feature to a
// scalar, then take the scaled moment. A caller-supplied cache of per-row
// projected values short-circuits the projection pass; both routes agree
// bitwise because the same term sequence is summed.
inline double mtp(const ClassView& cls, const FeatureProjector& projector, std::uint64_t lambda,
                  std::span<const double> projected_cache = {}) {
  if (cls.size() == 0) raise(errc::empty_dataset, "MTP of an empty class");
  if (lambda < 1) raise(errc::invalid_order, "moment order must be >= 1");
  bool bad_term = false;
  const double total = detail::pairwise_sum_transform(0, cls.size(), [&](std::size_t i) {
    const double projected =
        projected_cache.empty() ? projector(cls.row(i)) : projected_cache[cls.rows[i]];
    const double term = detail::scaled_power_term(projected, lambda);
    if (!std::isfinite(term)) bad_term = true;
    return term;
  });
  const double result = total / static_cast<double>(cls.size());
  if (bad_term || !std::isfinite(result))
    raise(errc::moment_overflow, "MTP of class " + std::to_string(cls.label) + " at order " +
                                     std::to_string(lambda) + " is non-finite");
  return result;
}

// psi^(1) * feature value + sum_i psi^(i+1) * MTP_i.
inline double data_point_project(std::span<const double> psi, double fp_value,
                                 std::span<const double> mtp_values) {
  if (psi.size() != mtp_values.size() + 1)
    raise(errc::length_mismatch, "psi has " + std::to_string(psi.size()) + " weights for " +
                                     std::to_string(mtp_values.size()) + " moment values");
  double acc = psi[0] * fp_value;
  for (std::size_t i = 0; i < mtp_values.size(); ++i) acc += psi[i + 1] * mtp_values[i];
  return acc;
}

}  // namespace sotdd
