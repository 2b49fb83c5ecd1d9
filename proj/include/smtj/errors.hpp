#pragma once

#include <stdexcept>
#include <string>

namespace smtj {

/// Malformed input file (TSPLIB text, artifact JSON). Carries the 1-based
/// line number when known, 0 otherwise.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")"
                                : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Input is well-formed but uses a feature this library does not convert
/// (e.g. GEO edge weights).
class unsupported_format : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Calibration fit cannot be determined from the given data.
class fit_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace smtj
