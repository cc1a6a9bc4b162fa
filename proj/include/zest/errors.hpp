#pragma once

#include <stdexcept>
#include <string>

namespace zest {

// Data too short, too noisy, or not exciting enough to bound the model set.
class LearningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Measurements are inconsistent with the declared noise bounds (empty estimate).
class InconsistentMeasurementError : public std::runtime_error {
 public:
  InconsistentMeasurementError(const std::string& what, int step = -1)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zest
