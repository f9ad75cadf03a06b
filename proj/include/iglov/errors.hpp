#pragma once

#include <stdexcept>
#include <string>

namespace iglov {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometry: query point coincides with the camera.
struct ZeroRangeError : Error {
  using Error::Error;
};

// Fisher information queried inside the guard radius.
struct RangeTooSmallError : Error {
  using Error::Error;
};

struct NonFiniteInputError : Error {
  using Error::Error;
};

// Polynomial design matrix has numerical rank below degree + 1.
struct RankDeficientError : Error {
  using Error::Error;
};

struct EmptyGridError : Error {
  using Error::Error;
};

struct EmptyModelError : Error {
  using Error::Error;
};

struct WindowTooShortError : Error {
  using Error::Error;
};

struct IndexOutOfWindowError : Error {
  using Error::Error;
};

struct NotInitializedError : Error {
  using Error::Error;
};

// Scenario file failed validation (unknown field, bad value, ...).
struct ScenarioError : Error {
  using Error::Error;
};

// A planner aborted mid-run; the partial telemetry is flagged.
struct PlannerAbortError : Error {
  using Error::Error;
};

}  // namespace iglov
