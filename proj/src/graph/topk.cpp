#include <algorithm>
#include <numeric>

#include "dampen/error.hpp"
#include "dampen/graph.hpp"

namespace dampen {
namespace {

SensitivityFunction topk_sensitivity(const EdgeGraph& g, const std::vector<std::size_t>& range,
                                     const SelectionProblem& problem, Mechanism mechanism) {
  SensitivityFunction per_node = ebc_sensitivity(g, range);
  if (mechanism == Mechanism::ld) per_node = flatten_sensitivity(per_node, problem);
  return bound_sensitivity(per_node, problem.global_sensitivity, problem.database_size);
}

}  // namespace

TopKResult priv_topk(const EdgeGraph& g, double epsilon, std::size_t k, Mechanism mechanism, Rng& rng,
                     BudgetAccountant& accountant, const TopKOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidInput("priv_topk: epsilon must be positive");
  if (k == 0 || k > g.node_count()) throw InvalidInput("priv_topk: k must lie in [1, |V|]");
  if (!accountant.has_scope(options.scope)) accountant.open_scope(options.scope, Composition::sequential);

  TopKResult result;
  result.per_iteration_epsilon = epsilon / static_cast<double>(k);
  result.accountant_scope = options.scope;

  std::vector<std::size_t> remaining(g.node_count());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  const std::uint64_t base = rng();
  for (std::size_t it = 0; it < k; ++it) {
    Rng step(mix_seed({base, it}));
    const SelectionProblem problem = ebc_problem(g, remaining, options.global_sensitivity);
    const double eps = result.per_iteration_epsilon;
    std::size_t pick = 0;
    switch (mechanism) {
      case Mechanism::em:
        pick = select_exponential(problem, eps, step).index;
        break;
      case Mechanism::pf:
        pick = select_permute_and_flip(problem, eps, step);
        break;
      case Mechanism::ld:
        pick = select_local_dampening(problem, topk_sensitivity(g, remaining, problem, mechanism), eps, step).index;
        break;
      case Mechanism::sld:
        pick = select_shifted_local_dampening(problem, topk_sensitivity(g, remaining, problem, mechanism), eps, step)
                   .index;
        break;
    }
    accountant.account(options.scope, eps, "pick " + std::to_string(it + 1) + " of " + std::to_string(k));
    result.chosen.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return result;
}

SelectionDistribution ebc_pick_distribution(const EdgeGraph& g, double epsilon, Mechanism mechanism,
                                            std::optional<double> global_sensitivity) {
  std::vector<std::size_t> all(g.node_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const SelectionProblem problem = ebc_problem(g, all, global_sensitivity);
  switch (mechanism) {
    case Mechanism::em:
      return exponential_distribution(problem, epsilon);
    case Mechanism::ld:
      return local_dampening_distribution(problem, topk_sensitivity(g, all, problem, mechanism), epsilon);
    case Mechanism::sld:
      return shifted_local_dampening_distribution(problem, topk_sensitivity(g, all, problem, mechanism), epsilon);
    case Mechanism::pf:
      break;
  }
  throw InvalidInput("ebc_pick_distribution: permute-and-flip has no exact distribution here");
}

std::vector<std::size_t> true_topk(const EdgeGraph& g, std::size_t k) {
  if (k > g.node_count()) throw InvalidInput("true_topk: k exceeds node count");
  const auto scores = ebc_all(g);
  std::vector<std::size_t> order(g.node_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  return order;
}

double topk_accuracy(const std::vector<std::size_t>& retrieved, const std::vector<std::size_t>& truth) {
  if (truth.empty()) throw InvalidInput("topk_accuracy: empty reference set");
  std::size_t hits = 0;
  for (std::size_t v : retrieved) hits += std::find(truth.begin(), truth.end(), v) != truth.end();
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace dampen
