#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "dampen/core.hpp"
#include "dampen/error.hpp"
#include "dampen/kernels.hpp"

namespace dampen {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::em: return "em";
    case Mechanism::pf: return "pf";
    case Mechanism::ld: return "ld";
    case Mechanism::sld: return "sld";
  }
  return "?";
}

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::non_decreasing: return "nonDecreasing";
    case Monotonicity::non_increasing: return "nonIncreasing";
    case Monotonicity::flat: return "flat";
    case Monotonicity::none: return "none";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "em") return Mechanism::em;
  if (name == "pf") return Mechanism::pf;
  if (name == "ld") return Mechanism::ld;
  if (name == "sld") return Mechanism::sld;
  throw InvalidInput("unknown mechanism '" + std::string(name) + "' (expected em, pf, ld or sld)");
}

void SelectionProblem::validate() const {
  if (range.empty()) throw InvalidInput("selection problem: empty range");
  if (utility.size() != range.size()) throw InvalidInput("selection problem: utility/range size mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& id : range) {
    if (!seen.insert(id).second) throw InvalidInput("selection problem: duplicate candidate '" + id + "'");
  }
  for (double u : utility) {
    if (!std::isfinite(u)) throw InvalidInput("selection problem: non-finite utility");
  }
  if (!(global_sensitivity >= 0.0) || !std::isfinite(global_sensitivity)) {
    throw InvalidInput("selection problem: global sensitivity must be finite and nonnegative");
  }
  if (database_size < 1) throw InvalidInput("selection problem: database size must be at least 1");
}

double SelectionProblem::max_utility() const { return *std::max_element(utility.begin(), utility.end()); }
double SelectionProblem::min_utility() const { return *std::min_element(utility.begin(), utility.end()); }

SelectionProblem SelectionProblem::from_utilities(std::vector<double> utility, double global_sensitivity,
                                                  std::size_t database_size) {
  SelectionProblem p;
  p.range.reserve(utility.size());
  for (std::size_t i = 0; i < utility.size(); ++i) p.range.push_back("r" + std::to_string(i));
  p.utility = std::move(utility);
  p.global_sensitivity = global_sensitivity;
  p.database_size = database_size;
  return p;
}

SensitivityFunction SensitivityFunction::constant(double value, bool admissible, bool bounded) {
  SensitivityFunction f;
  f.eval = [value](std::size_t, std::size_t) { return value; };
  f.declared_admissible = admissible;
  f.declared_bounded = bounded;
  f.monotonicity = Monotonicity::flat;
  return f;
}

std::vector<double> SelectionDistribution::probabilities() const {
  std::vector<double> p;
  p.reserve(per_candidate.size());
  for (const auto& c : per_candidate) p.push_back(c.probability);
  return p;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || std::isnan(epsilon)) throw InvalidInput("epsilon must be positive");
}

SelectionDistribution from_scores(const SelectionProblem& problem, const std::vector<double>& scores,
                                  double epsilon, Mechanism tag, bool uniform) {
  const std::size_t m = problem.size();
  std::vector<double> probs(m, 1.0 / static_cast<double>(m));
  if (!uniform) {
    std::vector<double> logits(m);
    for (std::size_t i = 0; i < m; ++i) logits[i] = 0.5 * epsilon * scores[i];
    kernels::softmax(logits, probs);
  }
  SelectionDistribution dist;
  dist.epsilon = epsilon;
  dist.mechanism = tag;
  dist.per_candidate.reserve(m);
  for (std::size_t i = 0; i < m; ++i) dist.per_candidate.push_back({problem.range[i], probs[i], scores[i]});
  return dist;
}

std::vector<double> dampened_scores(const SelectionProblem& problem, const SensitivityFunction& delta,
                                    double shift) {
  std::vector<double> scores(problem.size());
  for (std::size_t r = 0; r < problem.size(); ++r) scores[r] = dampen(problem, delta, r, problem.utility[r] - shift);
  return scores;
}

}  // namespace

SelectionDistribution exponential_distribution(const SelectionProblem& problem, double epsilon) {
  problem.validate();
  check_epsilon(epsilon);
  const double du = problem.global_sensitivity;
  std::vector<double> scores(problem.size(), 0.0);
  if (du > 0.0) {
    for (std::size_t r = 0; r < problem.size(); ++r) scores[r] = problem.utility[r] / du;
  }
  return from_scores(problem, scores, epsilon, Mechanism::em, du == 0.0);
}

SelectionDistribution local_dampening_distribution(const SelectionProblem& problem, const SensitivityFunction& delta,
                                                   double epsilon) {
  problem.validate();
  check_epsilon(epsilon);
  if (!delta.declared_admissible) throw ContractViolation("local dampening requires an admissible sensitivity function");
  if (problem.global_sensitivity == 0.0) {
    return from_scores(problem, std::vector<double>(problem.size(), 0.0), epsilon, Mechanism::ld, true);
  }
  return from_scores(problem, dampened_scores(problem, delta, 0.0), epsilon, Mechanism::ld, false);
}

double sld_shift(const SelectionProblem& problem, const SensitivityFunction& delta) {
  const double reach = static_cast<double>(problem.database_size) * problem.global_sensitivity;
  if (delta.monotonicity == Monotonicity::non_increasing) return -(reach - problem.min_utility());
  return reach + problem.max_utility();
}

SelectionDistribution shifted_local_dampening_distribution(const SelectionProblem& problem,
                                                           const SensitivityFunction& delta, double epsilon,
                                                           double extra_shift) {
  problem.validate();
  check_epsilon(epsilon);
  if (!delta.declared_admissible) {
    throw ContractViolation("shifted local dampening requires an admissible sensitivity function");
  }
  if (!delta.declared_bounded) {
    throw ContractViolation("shifted local dampening requires a bounded sensitivity function");
  }
  if (!(extra_shift >= 0.0)) throw InvalidInput("extra shift must be nonnegative");
  if (problem.global_sensitivity == 0.0) {
    return from_scores(problem, std::vector<double>(problem.size(), 0.0), epsilon, Mechanism::sld, true);
  }
  double s = sld_shift(problem, delta);
  s += delta.monotonicity == Monotonicity::non_increasing ? -extra_shift : extra_shift;
  return from_scores(problem, dampened_scores(problem, delta, s), epsilon, Mechanism::sld, false);
}

std::size_t sample(const SelectionDistribution& dist, Rng& rng) {
  if (dist.per_candidate.empty()) throw InvalidInput("sample: empty distribution");
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.per_candidate.size(); ++i) {
    const double p = dist.per_candidate[i].probability;
    if (p > 0.0) last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_positive;
}

Selection select_exponential(const SelectionProblem& problem, double epsilon, Rng& rng) {
  Selection s{0, exponential_distribution(problem, epsilon)};
  s.index = sample(s.distribution, rng);
  return s;
}

Selection select_local_dampening(const SelectionProblem& problem, const SensitivityFunction& delta, double epsilon,
                                 Rng& rng) {
  Selection s{0, local_dampening_distribution(problem, delta, epsilon)};
  s.index = sample(s.distribution, rng);
  return s;
}

Selection select_shifted_local_dampening(const SelectionProblem& problem, const SensitivityFunction& delta,
                                         double epsilon, Rng& rng, double extra_shift) {
  Selection s{0, shifted_local_dampening_distribution(problem, delta, epsilon, extra_shift)};
  s.index = sample(s.distribution, rng);
  return s;
}

std::size_t select_permute_and_flip(const SelectionProblem& problem, double epsilon, Rng& rng) {
  problem.validate();
  check_epsilon(epsilon);
  const std::size_t m = problem.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
  if (problem.global_sensitivity == 0.0) return order.front();

  const double best = problem.max_utility();
  const double scale = epsilon / (2.0 * problem.global_sensitivity);
  for (std::size_t r : order) {
    const double p = std::exp(scale * (problem.utility[r] - best));
    if (uniform01(rng) < p) return r;
  }
  // Unreachable: a maximizer has p = 1 and uniform01 < 1.
  return order.back();
}

double expected_error(const SelectionDistribution& dist, const SelectionProblem& problem) {
  if (dist.per_candidate.size() != problem.size()) throw InvalidInput("expected_error: distribution/range mismatch");
  const double best = problem.max_utility();
  double err = 0.0;
  for (std::size_t r = 0; r < problem.size(); ++r) err += dist.per_candidate[r].probability * (best - problem.utility[r]);
  return std::max(err, 0.0);
}

double error_tail(const SelectionDistribution& dist, const SelectionProblem& problem, double theta) {
  if (dist.per_candidate.size() != problem.size()) throw InvalidInput("error_tail: distribution/range mismatch");
  const double best = problem.max_utility();
  double mass = 0.0;
  for (std::size_t r = 0; r < problem.size(); ++r) {
    if (best - problem.utility[r] >= theta) mass += dist.per_candidate[r].probability;
  }
  return mass;
}

MonteCarloEstimate permute_and_flip_error(const SelectionProblem& problem, double epsilon, std::size_t runs,
                                          Rng& rng) {
  if (runs == 0) throw InvalidInput("permute_and_flip_error: runs must be positive");
  const double best = problem.max_utility();
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < runs; ++i) {
    const double err = best - problem.utility[select_permute_and_flip(problem, epsilon, rng)];
    const double d = err - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (err - mean);
  }
  MonteCarloEstimate est;
  est.mean = mean;
  est.runs = runs;
  est.standard_error = runs > 1 ? std::sqrt(m2 / static_cast<double>(runs - 1) / static_cast<double>(runs)) : 0.0;
  return est;
}

}  // namespace dampen
