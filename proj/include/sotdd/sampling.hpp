#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sotdd/errors.hpp"
#include "sotdd/rng.hpp"

namespace sotdd {

// Law for the moment-order vector: either uniform on {1..lambda_max}^k or a
// product of zero-truncated Poisson distributions with one rate per coordinate.
struct MomentOrderLaw {
  enum class Kind { uniform_finite, ztpoisson_product };

  Kind kind = Kind::ztpoisson_product;
  std::uint64_t lambda_max = 1;  // uniform variant
  std::vector<double> rates;     // Poisson variant, one per coordinate

  static MomentOrderLaw uniform(std::uint64_t lambda_max) {
    if (lambda_max < 1) raise(errc::invalid_rate, "lambda_max must be >= 1");
    MomentOrderLaw law;
    law.kind = Kind::uniform_finite;
    law.lambda_max = lambda_max;
    return law;
  }

  static MomentOrderLaw poisson(std::vector<double> rates) {
    if (rates.empty()) raise(errc::invalid_rate, "rate list must be non-empty");
    for (double r : rates)
      if (!(r > 0.0)) raise(errc::invalid_rate, "all rates must be positive");
    MomentOrderLaw law;
    law.kind = Kind::ztpoisson_product;
    law.rates = std::move(rates);
    return law;
  }

  // Default configuration: rates 1..k.
  static MomentOrderLaw default_poisson(std::size_t k) {
    std::vector<double> rates(k);
    for (std::size_t j = 0; j < k; ++j) rates[j] = static_cast<double>(j + 1);
    return poisson(std::move(rates));
  }
};

// One draw of all projection parameters: mixing weights psi on the k-sphere,
// feature direction theta on S^{d-1}, k positive moment orders, and the label
// direction phi (or a marker that phi is tied to theta).
struct ProjectionParams {
  std::vector<double> psi;      // size k + 1, unit norm
  std::vector<double> theta;    // size d, unit norm
  std::vector<std::uint64_t> lambdas;  // size k, all >= 1
  std::vector<double> phi;      // size d when untied; empty when tied to theta
  bool phi_tied = true;

  std::span<const double> label_direction() const {
    return phi_tied ? std::span<const double>(theta) : std::span<const double>(phi);
  }
};

inline void sample_unit_sphere(std::size_t dim, RngStream& stream, std::vector<double>& out) {
  if (dim == 0) raise(errc::invalid_dimension, "sphere dimension must be >= 1");
  out.resize(dim);
  for (;;) {
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = stream.next_gaussian();
      norm_sq += out[i] * out[i];
    }
    if (norm_sq > 1e-300) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

inline std::vector<double> sample_unit_sphere(std::size_t dim, RngStream& stream) {
  std::vector<double> out;
  sample_unit_sphere(dim, stream, out);
  return out;
}

// Zero-truncated Poisson via rejection: draw Poisson(rate) and retry on zero.
// Acceptance is 1 - e^{-rate}; cheap for the rates used here.
inline std::uint64_t sample_ztpoisson(double rate, RngStream& stream) {
  if (!(rate > 0.0)) raise(errc::invalid_rate, "rate must be positive");
  const double threshold = std::exp(-rate);
  for (;;) {
    // Knuth's product-of-uniforms Poisson sampler.
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= stream.next_unit_open_low();
    } while (p > threshold);
    if (k - 1 >= 1) return k - 1;
  }
}

inline std::uint64_t sample_moment_order(const MomentOrderLaw& law, std::size_t coordinate,
                                         RngStream& stream) {
  if (law.kind == MomentOrderLaw::Kind::uniform_finite) return stream.next_index1(law.lambda_max);
  return sample_ztpoisson(law.rates[coordinate], stream);
}

// Draws one full parameter tuple. Consumption order within the stream is part
// of the sketch-compatibility contract: theta first, then the k moment
// orders, then psi, then phi (when untied). Drawing theta first lets the
// plain sliced-Wasserstein baseline share theta streams bitwise.
inline ProjectionParams sample_projection_params(std::size_t d, std::size_t k,
                                                 const MomentOrderLaw& law, bool tie_phi,
                                                 RngStream& stream) {
  if (d == 0) raise(errc::invalid_dimension, "feature dimension must be >= 1");
  if (k == 0) raise(errc::invalid_dimension, "moment count must be >= 1");
  if (law.kind == MomentOrderLaw::Kind::ztpoisson_product && law.rates.size() != k)
    raise(errc::length_mismatch, "moment law carries " + std::to_string(law.rates.size()) +
                                     " rates but k = " + std::to_string(k));
  ProjectionParams params;
  sample_unit_sphere(d, stream, params.theta);
  params.lambdas.resize(k);
  for (std::size_t j = 0; j < k; ++j) params.lambdas[j] = sample_moment_order(law, j, stream);
  sample_unit_sphere(k + 1, stream, params.psi);
  params.phi_tied = tie_phi;
  if (!tie_phi) sample_unit_sphere(d, stream, params.phi);
  return params;
}

}  // namespace sotdd
