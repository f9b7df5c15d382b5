#pragma once

#include <stdexcept>
#include <string>

namespace hwrec {

// Bad input data: failed validation, malformed files, unknown ids,
// violated preconditions. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A sensor read failed. Carries the sensor name.
class SensorError : public std::runtime_error {
 public:
  SensorError(const std::string& sensor, const std::string& what)
      : std::runtime_error(sensor + ": " + what), sensor_(sensor) {}
  const std::string& sensor() const { return sensor_; }

 private:
  std::string sensor_;
};

}  // namespace hwrec
