#include <algorithm>
#include <memory>
#include <mutex>
#include <vector>

#include "dampen/sensitivity.hpp"

namespace dampen {

SensitivityFunction bound_sensitivity(const SensitivityFunction& delta, double global_sensitivity,
                                      std::size_t database_size) {
  if (!(global_sensitivity >= 0.0)) throw InvalidInput("bound_sensitivity: negative global sensitivity");
  SensitivityFunction out = delta;
  out.eval = [e = delta.eval, global_sensitivity, database_size](std::size_t t, std::size_t r) {
    return t >= database_size ? global_sensitivity : std::min(e(t, r), global_sensitivity);
  };
  out.declared_bounded = true;
  return out;
}

SensitivityFunction flatten_sensitivity(const SensitivityFunction& delta, const SelectionProblem& problem) {
  struct Memo {
    std::mutex lock;
    std::vector<double> per_t;
    std::vector<bool> known;
  };
  auto memo = std::make_shared<Memo>();
  const std::size_t m = problem.size();
  SensitivityFunction out = delta;
  out.eval = [e = delta.eval, m, memo](std::size_t t, std::size_t) {
    {
      std::lock_guard<std::mutex> g(memo->lock);
      if (t < memo->known.size() && memo->known[t]) return memo->per_t[t];
    }
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) best = std::max(best, e(t, r));
    std::lock_guard<std::mutex> g(memo->lock);
    if (memo->known.size() <= t) {
      memo->known.resize(t + 1, false);
      memo->per_t.resize(t + 1, 0.0);
    }
    memo->known[t] = true;
    memo->per_t[t] = best;
    return best;
  };
  out.monotonicity = Monotonicity::flat;
  return out;
}

}  // namespace dampen
