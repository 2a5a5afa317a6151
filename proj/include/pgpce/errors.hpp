#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pgpce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or ambient dimensions of the operands disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The logarithmic map hit the cut locus (some principal angle is pi/2).
class CutLocusError : public Error {
 public:
  CutLocusError()
      : Error("log map undefined: subspaces contain orthogonal directions") {}
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Singular systems, non-finite values and similar numerical breakdowns.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Surrogate training failed; names the stage and, when known, the cluster.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& stage, int cluster, const std::string& cause)
      : Error("training failed at " + stage +
              (cluster >= 0 ? " (cluster " + std::to_string(cluster) + ")" : std::string()) +
              ": " + cause),
        stage_(stage),
        cluster_(cluster) {}

  const std::string& stage() const noexcept { return stage_; }
  /// -1 for stages that run before clustering.
  int cluster() const noexcept { return cluster_; }

 private:
  std::string stage_;
  int cluster_;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace pgpce
