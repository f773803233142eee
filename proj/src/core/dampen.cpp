#include <cmath>
#include <string>

#include "dampen/core.hpp"
#include "dampen/error.hpp"

namespace dampen {
namespace {

constexpr std::size_t kMaxSteps = std::size_t{1} << 26;

}  // namespace

double dampen_column(double u_value, double global_sensitivity, std::size_t database_size, bool bounded,
                     const std::function<double(std::size_t)>& delta_t) {
  if (!std::isfinite(u_value)) throw InvalidInput("dampen: utility value is not finite");
  if (!(global_sensitivity > 0.0)) throw InvalidInput("dampen: global sensitivity must be positive");
  if (u_value == 0.0) return 0.0;

  const double a = std::fabs(u_value);
  const double sign = u_value < 0 ? -1.0 : 1.0;
  double b = 0.0;
  for (std::size_t t = 0;; ++t) {
    if (bounded && t >= database_size) return sign * (static_cast<double>(t) + (a - b) / global_sensitivity);
    const double d = delta_t(t);
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ContractViolation("dampen: sensitivity function returned " + std::to_string(d) + " at t=" +
                              std::to_string(t));
    }
    if (bounded && d >= global_sensitivity) {
      return sign * (static_cast<double>(t) + (a - b) / global_sensitivity);
    }
    if (d > 0.0 && a < b + d) return sign * (static_cast<double>(t) + (a - b) / d);
    b += d;
    if (t >= kMaxSteps) throw ResourceExhausted("dampen: breakpoint search exceeded step limit");
  }
}

double dampen(const SelectionProblem& problem, const SensitivityFunction& delta, std::size_t r, double u_value) {
  if (r >= problem.size()) throw InvalidInput("dampen: candidate index out of range");
  const bool saturating = delta.declared_bounded && delta.declared_admissible;
  return dampen_column(u_value, problem.global_sensitivity, problem.database_size, saturating,
                       [&](std::size_t t) { return delta.eval(t, r); });
}

}  // namespace dampen
