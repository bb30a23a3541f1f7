#ifndef RANDHORIZON_ERRORS_HPP
#define RANDHORIZON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace randhorizon {

// Root bracketing failed: no sign change over the supplied interval.
class bracket_error : public std::runtime_error {
public:
  explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

// Free-boundary search failed (outward scan found no sign change).
class boundary_error : public std::runtime_error {
public:
  explicit boundary_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation is ill-posed for the given input (e.g. constant function has
// every b as a boundary).
class degenerate_error : public std::runtime_error {
public:
  explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

// A recursion stage failed; carries the 1-based stage index.
class stage_error : public std::runtime_error {
public:
  stage_error(int stage, const std::string& what)
      : std::runtime_error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const { return stage_; }

private:
  int stage_;
};

// Invalid numerical configuration (grid sizes, parameter ranges, ...).
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Explicit-scheme stability violated; a numerical failure, not a usage error.
class cfl_error : public config_error {
public:
  explicit cfl_error(const std::string& what) : config_error(what) {}
};

}  // namespace randhorizon

#endif
