#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dampen/core.hpp"
#include "dampen/error.hpp"

namespace dampen {

// A family of databases reachable from one another by unit edits, with a
// fixed candidate range. Used by the exhaustive oracles on tiny instances.
template <class Db>
struct DatasetModel {
  std::function<std::vector<double>(const Db&)> utilities;
  std::function<void(const Db&, const std::function<void(const Db&)>&)> neighbors;
  std::function<std::string(const Db&)> key;
  double global_sensitivity = 0.0;
  std::size_t database_size = 1;

  SelectionProblem problem(const Db& x) const {
    return SelectionProblem::from_utilities(utilities(x), global_sensitivity, database_size);
  }
};

// delta(x, t, r) over every database of a model.
template <class Db>
struct SensitivityModel {
  std::function<double(const Db&, std::size_t, std::size_t)> eval;
  bool declared_admissible = false;
  bool declared_bounded = false;
  Monotonicity monotonicity = Monotonicity::none;

  SensitivityFunction at(const Db& x) const {
    SensitivityFunction f;
    f.eval = [e = eval, x](std::size_t t, std::size_t r) { return e(x, t, r); };
    f.declared_admissible = declared_admissible;
    f.declared_bounded = declared_bounded;
    f.monotonicity = monotonicity;
    return f;
  }
};

struct SearchBudget {
  std::size_t max_evaluations = 5'000'000;
};

// All databases within distance t of x, x first, in breadth-first order.
template <class Db>
std::vector<Db> ball(const DatasetModel<Db>& model, const Db& x, std::size_t t, const SearchBudget& budget = {}) {
  std::vector<Db> out{x};
  std::unordered_set<std::string> seen{model.key(x)};
  std::size_t level_begin = 0;
  std::size_t evaluations = 1;
  for (std::size_t level = 0; level < t; ++level) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      const Db current = out[i];
      model.neighbors(current, [&](const Db& y) {
        if (++evaluations > budget.max_evaluations) {
          throw ResourceExhausted("neighbourhood search exceeded " + std::to_string(budget.max_evaluations) +
                                  " evaluations");
        }
        if (seen.insert(model.key(y)).second) out.push_back(y);
      });
    }
    level_begin = level_end;
  }
  return out;
}

// max over y with d(x,y) <= t and neighbours z of y of |u(y,r) - u(z,r)|, for every r.
template <class Db>
std::vector<double> brute_element_ls(const DatasetModel<Db>& model, const Db& x, std::size_t t,
                                     const SearchBudget& budget = {}) {
  const std::vector<Db> region = ball(model, x, t, budget);
  std::vector<double> ls;
  std::size_t evaluations = region.size();
  for (const Db& y : region) {
    const std::vector<double> uy = model.utilities(y);
    if (ls.empty()) ls.assign(uy.size(), 0.0);
    model.neighbors(y, [&](const Db& z) {
      if (++evaluations > budget.max_evaluations) {
        throw ResourceExhausted("element local sensitivity search exceeded " +
                                std::to_string(budget.max_evaluations) + " evaluations");
      }
      const std::vector<double> uz = model.utilities(z);
      for (std::size_t r = 0; r < ls.size(); ++r) ls[r] = std::max(ls[r], std::fabs(uy[r] - uz[r]));
    });
  }
  return ls;
}

template <class Db>
double brute_element_ls(const DatasetModel<Db>& model, const Db& x, std::size_t t, std::size_t r,
                        const SearchBudget& budget = {}) {
  const auto ls = brute_element_ls(model, x, t, budget);
  if (r >= ls.size()) throw InvalidInput("brute_element_ls: candidate out of range");
  return ls[r];
}

// Element local sensitivity as a sensitivity model, memoised per database.
template <class Db>
SensitivityModel<Db> brute_ls_model(const DatasetModel<Db>& model, const SearchBudget& budget = {}) {
  using Memo = std::unordered_map<std::string, std::vector<std::vector<double>>>;
  auto memo = std::make_shared<Memo>();
  SensitivityModel<Db> m;
  m.eval = [model, budget, memo](const Db& x, std::size_t t, std::size_t r) {
    auto& per_t = (*memo)[model.key(x)];
    while (per_t.size() <= t) per_t.push_back(brute_element_ls(model, x, per_t.size(), budget));
    return per_t[t][r];
  };
  m.declared_admissible = true;
  m.declared_bounded = false;
  m.monotonicity = Monotonicity::none;
  return m;
}

// min(delta, du) for t < n and du from t = n on.
SensitivityFunction bound_sensitivity(const SensitivityFunction& delta, double global_sensitivity,
                                      std::size_t database_size);

template <class Db>
SensitivityModel<Db> bound_sensitivity(const SensitivityModel<Db>& delta, double global_sensitivity,
                                       std::size_t database_size) {
  SensitivityModel<Db> out = delta;
  out.eval = [e = delta.eval, global_sensitivity, database_size](const Db& x, std::size_t t, std::size_t r) {
    return t >= database_size ? global_sensitivity : std::min(e(x, t, r), global_sensitivity);
  };
  out.declared_bounded = true;
  return out;
}

// max over the range of delta(t, .), memoised per t.
SensitivityFunction flatten_sensitivity(const SensitivityFunction& delta, const SelectionProblem& problem);

template <class Db>
SensitivityModel<Db> flatten_sensitivity(const SensitivityModel<Db>& delta, const DatasetModel<Db>& model) {
  SensitivityModel<Db> out = delta;
  out.eval = [e = delta.eval, model](const Db& x, std::size_t t, std::size_t) {
    const std::size_t m = model.utilities(x).size();
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) best = std::max(best, e(x, t, r));
    return best;
  };
  out.monotonicity = Monotonicity::flat;
  return out;
}

struct AdmissibilityWitness {
  std::string condition;
  std::size_t t = 0;
  std::size_t r = 0;
  std::string database;
  double required = 0.0;
  double actual = 0.0;
};

struct AdmissibilityReport {
  bool pass = true;
  std::optional<AdmissibilityWitness> witness;
  std::size_t comparisons = 0;
};

// Checks delta(z,0,r) >= LS(z,0,r) for z = x and its neighbours,
// delta(x,t+1,r) >= delta(y,t,r) and delta(y,t+1,r) >= delta(x,t,r) for
// neighbours y and t < max_t, and optionally delta(x,t,r) >= LS(x,t,r) for t <= max_t.
template <class Db>
AdmissibilityReport check_admissibility(const SensitivityModel<Db>& delta, const DatasetModel<Db>& model,
                                        const Db& x, std::size_t max_t, const SearchBudget& budget = {},
                                        bool check_minimality = true, double tolerance = 1e-9) {
  AdmissibilityReport report;
  auto fail = [&](std::string cond, std::size_t t, std::size_t r, const Db& at, double required, double actual) {
    report.pass = false;
    report.witness = AdmissibilityWitness{std::move(cond), t, r, model.key(at), required, actual};
  };

  std::vector<Db> first_ring;
  model.neighbors(x, [&](const Db& y) { first_ring.push_back(y); });

  auto check_base = [&](const Db& z) {
    const auto ls0 = brute_element_ls(model, z, 0, budget);
    for (std::size_t r = 0; r < ls0.size(); ++r) {
      ++report.comparisons;
      const double d = delta.eval(z, 0, r);
      if (d + tolerance < ls0[r]) {
        fail("delta(x,0,r) >= LS(x,0,r)", 0, r, z, ls0[r], d);
        return false;
      }
    }
    return true;
  };
  if (!check_base(x)) return report;
  for (const Db& y : first_ring) {
    if (!check_base(y)) return report;
  }

  const std::size_t m = model.utilities(x).size();
  for (std::size_t t = 0; t < max_t; ++t) {
    for (const Db& y : first_ring) {
      for (std::size_t r = 0; r < m; ++r) {
        report.comparisons += 2;
        const double xt1 = delta.eval(x, t + 1, r);
        const double yt = delta.eval(y, t, r);
        if (xt1 + tolerance < yt) {
          fail("delta(x,t+1,r) >= delta(y,t,r)", t, r, y, yt, xt1);
          return report;
        }
        const double yt1 = delta.eval(y, t + 1, r);
        const double xt = delta.eval(x, t, r);
        if (yt1 + tolerance < xt) {
          fail("delta(y,t+1,r) >= delta(x,t,r)", t, r, y, xt, yt1);
          return report;
        }
      }
    }
  }

  if (check_minimality) {
    for (std::size_t t = 0; t <= max_t; ++t) {
      const auto ls = brute_element_ls(model, x, t, budget);
      for (std::size_t r = 0; r < ls.size(); ++r) {
        ++report.comparisons;
        const double d = delta.eval(x, t, r);
        if (d + tolerance < ls[r]) {
          fail("delta(x,t,r) >= LS(x,t,r)", t, r, x, ls[r], d);
          return report;
        }
      }
    }
  }
  return report;
}

struct MonotonicityReport {
  Monotonicity classification = Monotonicity::none;
  // Mean Spearman rank correlation between u and delta(t, .) over the t
  // values where both are non-constant; 0 when undefined everywhere.
  double spearman = 0.0;
};

MonotonicityReport check_monotonicity(const SensitivityFunction& delta, const SelectionProblem& problem,
                                      std::span<const std::size_t> ts);

double spearman_correlation(std::span<const double> a, std::span<const double> b);

// Which way the gap sequence must run for the dominating function to give
// the more accurate shifted mechanism. `follow_shift` reads it off the shift
// direction of the two functions; `literal` always requires nonincreasing gaps.
enum class GapOrientation { follow_shift, literal };

struct DominanceReport {
  std::vector<std::size_t> ordered_range;  // range positions, utility descending
  std::vector<std::size_t> ts;
  std::vector<std::vector<double>> gaps;  // gaps[i][j]: t = ts[i], candidate ordered_range[j]
  bool dominates = true;
  bool nonincreasing_required = false;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;  // (t, position in ordered_range)
  std::string note;
};

std::vector<std::size_t> utility_order(const SelectionProblem& problem);
std::vector<std::size_t> default_dominance_ts(const SelectionProblem& problem);

// Does a dominate b? Gaps are b - a.
DominanceReport check_dominance(const SensitivityFunction& a, const SensitivityFunction& b,
                                const SelectionProblem& problem, std::span<const std::size_t> ts,
                                GapOrientation orientation = GapOrientation::follow_shift, double tolerance = 1e-12);

struct AccuracyOrderReport {
  bool pass = false;
  double error_a = 0.0;
  double error_b = 0.0;
  std::vector<double> thetas;
  std::vector<double> tail_a;
  std::vector<double> tail_b;
};

// Exact shifted-mechanism errors with a and b; requires a to dominate b on
// every t < n and both to be stable. Throws ContractViolation otherwise.
AccuracyOrderReport accuracy_order_check(const SensitivityFunction& a, const SensitivityFunction& b,
                                         const SelectionProblem& problem, double epsilon,
                                         GapOrientation orientation = GapOrientation::follow_shift,
                                         double tolerance = 1e-9);

}  // namespace dampen
