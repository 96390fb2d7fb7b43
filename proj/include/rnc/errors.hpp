#pragma once

#include <stdexcept>
#include <string>

namespace rnc {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  int rank;
  double threshold;
  RankDeficient(int rank_, double threshold_)
      : std::runtime_error("RankDeficient: rank " + std::to_string(rank_) +
                           " below full row rank (threshold " +
                           std::to_string(threshold_) + ")"),
        rank(rank_),
        threshold(threshold_) {}
};

struct GridTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HorizonMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificateMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotCanonical : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OnSingularLine : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAdmissible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotInvertible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonMonotone : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KLookupOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPlanar : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rnc
