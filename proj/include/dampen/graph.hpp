#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dampen/core.hpp"
#include "dampen/sensitivity.hpp"

namespace dampen {

// Undirected simple graph over a fixed node list.
class EdgeGraph {
 public:
  EdgeGraph() = default;
  explicit EdgeGraph(std::vector<std::string> nodes);
  static EdgeGraph from_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                              std::vector<std::string> extra_nodes = {});

  std::size_t add_node(const std::string& id);
  // False for self-loops and edges already present.
  bool add_edge(std::size_t u, std::size_t v);
  bool remove_edge(std::size_t u, std::size_t v);
  void flip_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const;

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_; }
  std::size_t degree(std::size_t u) const { return adj_[u].size(); }
  // Sorted ascending.
  const std::vector<std::size_t>& neighbors(std::size_t u) const { return adj_[u]; }
  const std::string& id(std::size_t u) const { return ids_[u]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t index_of(const std::string& id) const;

  std::size_t observed_max_degree() const;
  // The public bound when one is configured, otherwise the observed maximum.
  std::size_t max_degree() const;
  void set_max_degree_bound(std::optional<std::size_t> bound);

  // One character per unordered pair (u < v), row-major.
  std::string adjacency_key() const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adj_;
  std::size_t edges_ = 0;
  std::optional<std::size_t> degree_bound_;
};

struct EdgeListReport {
  EdgeGraph graph;
  std::size_t lines = 0;
  std::size_t edges_kept = 0;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
};

// "u v" per line; '#' comments and blank lines skipped.
EdgeListReport load_edge_list(std::istream& in);

double ebc(const EdgeGraph& g, std::size_t c);
std::vector<double> ebc_all(const EdgeGraph& g);
// Explicit geodesic counting by breadth-first search on the ego subgraph.
double ebc_oracle(const EdgeGraph& g, std::size_t c, std::size_t max_degree = 24);

double global_sensitivity_ebc(std::size_t max_degree);
double delta_ebc(std::size_t degree, std::size_t t);
double delta_ebc(const EdgeGraph& g, std::size_t t, std::size_t v);

// Maximum number of edge flips between graphs on the same node set.
std::size_t edge_database_size(const EdgeGraph& g);

// Range = given nodes (all nodes when empty), utility = EBC.
SelectionProblem ebc_problem(const EdgeGraph& g, const std::vector<std::size_t>& range = {},
                             std::optional<double> global_sensitivity = std::nullopt);
// Raw delta^EBC over a range of node indices (admissible, unbounded).
SensitivityFunction ebc_sensitivity(const EdgeGraph& g, const std::vector<std::size_t>& range);

// Edge-flip model over all node pairs; utilities are EBC of every node.
DatasetModel<EdgeGraph> ebc_dataset_model(const EdgeGraph& g);
SensitivityModel<EdgeGraph> ebc_sensitivity_model();

struct TopKResult {
  std::vector<std::size_t> chosen;
  double per_iteration_epsilon = 0.0;
  std::string accountant_scope;
};

struct TopKOptions {
  std::optional<double> global_sensitivity;  // defaults to the max-degree formula
  std::string scope = "topk";
};

// LD uses the flattened bounded delta^EBC, SLD the bounded per-node one.
TopKResult priv_topk(const EdgeGraph& g, double epsilon, std::size_t k, Mechanism mechanism, Rng& rng,
                     BudgetAccountant& accountant, const TopKOptions& options = {});

// Exact single-pick distribution of a mechanism over the whole node set.
// PF has no closed form here and is rejected.
SelectionDistribution ebc_pick_distribution(const EdgeGraph& g, double epsilon, Mechanism mechanism,
                                            std::optional<double> global_sensitivity = std::nullopt);

// Exact EBC ranking, ties broken by node index.
std::vector<std::size_t> true_topk(const EdgeGraph& g, std::size_t k);
double topk_accuracy(const std::vector<std::size_t>& retrieved, const std::vector<std::size_t>& truth);

}  // namespace dampen
