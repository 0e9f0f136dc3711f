#pragma once

#include <stdexcept>
#include <string>

namespace keydyn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BehindCamera : Error {
  using Error::Error;
};
struct ObjectNotVisible : Error {
  using Error::Error;
};
struct DegenerateHeatmap : Error {
  using Error::Error;
};
struct NoValidDepth : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct InsufficientMask : Error {
  using Error::Error;
};
struct SelectionInfeasible : Error {
  using Error::Error;
};
struct MissingWeights : Error {
  using Error::Error;
};
struct AugmentationUnsupported : Error {
  using Error::Error;
};
struct GoalGenerationFailed : Error {
  using Error::Error;
};
struct UnsupportedTask : Error {
  using Error::Error;
};
struct EmptyReference : Error {
  using Error::Error;
};
struct NonFiniteLoss : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace keydyn
