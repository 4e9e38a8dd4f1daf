#pragma once

#include <stdexcept>
#include <string>

namespace optstab {

/// Malformed arguments: dimension mismatches, non-finite matrix entries,
/// parameters outside the range of an operator.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The hypotheses a verifier needs are not met, so it refuses to run.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inputs contradict each other (e.g. level brackets that do not intersect).
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Convex set handed to a gauge does not contain the origin.
class InvalidGaugeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A supplied unboundedness certificate failed to deliver.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CatalogError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Grid is too coarse to contain any strictly feasible point.
class RefineFirstError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace optstab
