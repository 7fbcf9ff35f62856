#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace obstacle_fem {

/// Bad argument or configuration value.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Mesh is not a conforming triangulation.
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A user-supplied field returned a non-finite value.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Linear solver breakdown (indefinite or singular operator, residual too large).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The active set iteration hit its cap. Carries the last iterate.
struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, std::vector<double> last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

/// Inputs that should describe the same mesh do not.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedOperation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace obstacle_fem
