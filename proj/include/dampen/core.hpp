#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dampen/rng.hpp"

namespace dampen {

enum class Mechanism { em, pf, ld, sld };
enum class Monotonicity { non_decreasing, non_increasing, flat, none };

std::string_view to_string(Mechanism m);
std::string_view to_string(Monotonicity m);
Mechanism parse_mechanism(std::string_view name);

// Candidates and their utilities at one fixed database.
struct SelectionProblem {
  std::vector<std::string> range;
  std::vector<double> utility;
  double global_sensitivity = 0.0;
  std::size_t database_size = 1;

  std::size_t size() const { return range.size(); }
  void validate() const;
  double max_utility() const;
  double min_utility() const;

  // Range identifiers r0, r1, ... in utility order of the argument.
  static SelectionProblem from_utilities(std::vector<double> utility, double global_sensitivity,
                                         std::size_t database_size);
};

// delta(t, r) at a fixed database, r being a position in the problem's range.
struct SensitivityFunction {
  std::function<double(std::size_t t, std::size_t r)> eval;
  bool declared_admissible = false;
  bool declared_bounded = false;
  Monotonicity monotonicity = Monotonicity::none;

  double operator()(std::size_t t, std::size_t r) const { return eval(t, r); }

  static SensitivityFunction constant(double value, bool admissible, bool bounded);
};

struct CandidateProbability {
  std::string id;
  double probability = 0.0;
  double dampened_score = 0.0;
};

struct SelectionDistribution {
  std::vector<CandidateProbability> per_candidate;
  double epsilon = 0.0;
  Mechanism mechanism = Mechanism::em;

  std::vector<double> probabilities() const;
};

struct Selection {
  std::size_t index = 0;
  SelectionDistribution distribution;
};

// Piecewise-linear dampening of `u_value` for candidate r.
double dampen(const SelectionProblem& problem, const SensitivityFunction& delta, std::size_t r, double u_value);

// Same map with delta supplied as a column t -> delta(t). With `bounded`
// set, delta is taken to be nondecreasing in t and equal to the global
// sensitivity from t = database_size on, which allows a closed-form tail.
double dampen_column(double u_value, double global_sensitivity, std::size_t database_size, bool bounded,
                     const std::function<double(std::size_t)>& delta_t);

SelectionDistribution exponential_distribution(const SelectionProblem& problem, double epsilon);
SelectionDistribution local_dampening_distribution(const SelectionProblem& problem, const SensitivityFunction& delta,
                                                   double epsilon);
// `extra_shift` moves the utilities further in the shift direction; the
// distribution does not depend on it.
SelectionDistribution shifted_local_dampening_distribution(const SelectionProblem& problem,
                                                           const SensitivityFunction& delta, double epsilon,
                                                           double extra_shift = 0.0);
// Signed constant s with shifted utility u - s.
double sld_shift(const SelectionProblem& problem, const SensitivityFunction& delta);

std::size_t sample(const SelectionDistribution& dist, Rng& rng);

Selection select_exponential(const SelectionProblem& problem, double epsilon, Rng& rng);
std::size_t select_permute_and_flip(const SelectionProblem& problem, double epsilon, Rng& rng);
Selection select_local_dampening(const SelectionProblem& problem, const SensitivityFunction& delta, double epsilon,
                                 Rng& rng);
Selection select_shifted_local_dampening(const SelectionProblem& problem, const SensitivityFunction& delta,
                                         double epsilon, Rng& rng, double extra_shift = 0.0);

double expected_error(const SelectionDistribution& dist, const SelectionProblem& problem);
// Pr[u* - u(M(x)) >= theta].
double error_tail(const SelectionDistribution& dist, const SelectionProblem& problem, double theta);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t runs = 0;
};
MonteCarloEstimate permute_and_flip_error(const SelectionProblem& problem, double epsilon, std::size_t runs,
                                          Rng& rng);

enum class Composition { sequential, parallel };

class BudgetAccountant {
 public:
  struct Entry {
    std::string scope;
    double epsilon;
    std::string note;
  };

  BudgetAccountant();

  // The root scope "" is sequential and always exists.
  void open_scope(const std::string& id, Composition mode, const std::string& parent = "");
  bool has_scope(const std::string& id) const;
  BudgetAccountant& account(const std::string& scope, double epsilon, std::string note = {});

  // Sequential: sum of entries and child totals. Parallel: their maximum.
  double total(const std::string& scope = "") const;
  const std::vector<Entry>& ledger() const { return ledger_; }

 private:
  struct Scope {
    Composition mode;
    std::vector<std::string> children;
    std::vector<double> entries;
  };
  std::map<std::string, Scope> scopes_;
  std::vector<Entry> ledger_;
};

}  // namespace dampen
