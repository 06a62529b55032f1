#pragma once

#include <stdexcept>
#include <string>

namespace sotdd {

enum class errc {
  non_finite_feature,
  length_mismatch,
  empty_dataset,
  invalid_dimension,
  invalid_rate,
  dimension_mismatch,
  shape_mismatch,
  moment_overflow,
  invalid_order,
  mass_mismatch,
  fingerprint_mismatch,
  scale_exceeded,
  infeasible_marginals,
  eigen_failure,
  parse_error,
  ragged_rows,
  missing_label_column,
  bad_magic,
  truncated_file,
  version_unsupported,
  count_mismatch,
  degenerate_series,
  non_positive_input,
  io_failure,
  usage_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_finite_feature: return "NonFiniteFeature";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::invalid_dimension: return "InvalidDimension";
    case errc::invalid_rate: return "InvalidRate";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::moment_overflow: return "MomentOverflow";
    case errc::invalid_order: return "InvalidOrder";
    case errc::mass_mismatch: return "MassMismatch";
    case errc::fingerprint_mismatch: return "FingerprintMismatch";
    case errc::scale_exceeded: return "ScaleExceeded";
    case errc::infeasible_marginals: return "InfeasibleMarginals";
    case errc::eigen_failure: return "EigenFailure";
    case errc::parse_error: return "ParseError";
    case errc::ragged_rows: return "RaggedRows";
    case errc::missing_label_column: return "MissingLabelColumn";
    case errc::bad_magic: return "BadMagic";
    case errc::truncated_file: return "TruncatedFile";
    case errc::version_unsupported: return "VersionUnsupported";
    case errc::count_mismatch: return "CountMismatch";
    case errc::degenerate_series: return "DegenerateSeries";
    case errc::non_positive_input: return "NonPositiveInput";
    case errc::io_failure: return "IoFailure";
    case errc::usage_error: return "UsageError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace sotdd
