#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace hilbert {

/// Largest supported ambient dimension of a body.
inline constexpr int kMaxDim = 8;
/// One extra slot for homogeneous coordinates and barycentric lifts.
inline constexpr int kMaxLift = kMaxDim + 1;

/// Point in the ambient space. Stack-allocated; at most kMaxLift entries.
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxLift, 1>;
/// Square matrix acting on (possibly lifted) points.
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxLift, kMaxLift>;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotInterior,
  DegenerateChord,
  InvalidBody,
  InvalidMap,
  MapLeak,
  SamplingFailure,
  InsufficientSweep,
  FixedPointDetected,
  NotEllipsoid,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Containment slack below which a point counts as on the boundary.
inline constexpr double kTolGeom = 1e-12;
/// Gauge residual allowed for computed boundary points.
inline constexpr double kTolBoundary = 1e-10;
/// Two points closer than this are treated as equal.
inline constexpr double kEpsDir = 1e-14;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

Vector make_vector(std::initializer_list<double> values);

}  // namespace hilbert
