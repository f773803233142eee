#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dampen/graph.hpp"
#include "dampen/percentile.hpp"
#include "dampen/tree.hpp"

namespace dampen {

// Outcome of one randomized or exhaustive property run.
struct PropertyResult {
  bool pass = true;
  std::size_t cases = 0;
  double worst = 0.0;   // largest observed value of the checked quantity
  std::string witness;  // first failing case

  void fail(const std::string& w) {
    if (pass) witness = w;
    pass = false;
  }
};

// Tiny finite database families for the exhaustive properties: value vectors
// on a five-point grid, graphs on four or five nodes, and two-attribute binary
// tables of at most four rows.
enum class TinyModel { percentile, graph, table };
std::string_view to_string(TinyModel m);

// LD and SLD with delta = global sensitivity against EM, per candidate.
PropertyResult em_instance_equality(std::uint64_t seed, std::size_t problems, double tolerance = 1e-12);

// |D(x,r) - D(y,r)| over every neighbour pair, with brute-force element LS.
PropertyResult bounded_shift(TinyModel model, std::uint64_t seed, std::size_t instances, double tolerance = 1e-9);

// Largest |log(P_x(r) / P_y(r))| / epsilon for EM and LD over every neighbour
// pair; passes when it stays within 1.
PropertyResult indistinguishability(TinyModel model, std::uint64_t seed, std::size_t instances, double epsilon);

PropertyResult percentile_ls0_matches_oracle(std::uint64_t seed, std::size_t vectors, std::size_t max_n = 8,
                                             std::size_t grid = 64);
PropertyResult percentile_ls_t_matches_oracle(std::uint64_t seed, std::size_t vectors, std::size_t max_n = 5,
                                              std::size_t max_t = 2, std::size_t grid = 8);
PropertyResult ig_ls_matches_oracle(std::uint64_t seed, std::size_t tables, std::size_t max_tau = 6,
                                    std::size_t max_t = 3);
PropertyResult ebc_matches_oracle(std::uint64_t seed, std::size_t graphs, std::size_t max_nodes = 12);
PropertyResult ebc_admissible(std::uint64_t seed, std::size_t graphs, std::size_t max_nodes = 6, std::size_t max_t = 2);
PropertyResult kernels_agree(std::uint64_t seed, std::size_t cases);

// The table that attains the largest single-row IG change for n rows:
// every row shares one attribute value and one class, with a second class present.
Contingency ig_worst_case(std::size_t rows);

// delta_beta(t, r) = min(u(r) t / beta, du), bounded, declared nondecreasing.
SensitivityFunction beta_sensitivity(const SelectionProblem& problem, double beta);

struct BetaPoint {
  double beta = 0.0;
  double expected_error = 0.0;
};
struct DominanceStudy {
  PropertyResult result;
  std::vector<BetaPoint> beta_errors;
};
// Every dominating pair among the beta family on u = (10, 20, 30), du = 100,
// n = 50, eps = 1, plus `synthetic` random monotone functions against du,
// must have ordered exact errors and tails.
DominanceStudy dominance_accuracy_study(GapOrientation orientation, std::uint64_t seed, std::size_t synthetic);

struct TrendRow {
  std::string dataset;
  double epsilon = 0.0;
  double em = 0.0, ld = 0.0, sld = 0.0;
  double pf_mean = 0.0, pf_stderr = 0.0;
};
// Concentrated numeric vector and sparse graph with a loose degree bound.
NumericVector concentrated_vector(std::size_t n, double lambda);
EdgeGraph sparse_graph(std::size_t nodes, std::size_t degree, std::uint64_t seed);
std::vector<TrendRow> trend_study(const std::vector<double>& epsilons, std::size_t pf_runs, std::uint64_t seed);

// 200 rows, six binary attributes; the class is a0 or (a1 and a2).
LabeledTable separable_toy_table(std::size_t rows, std::uint64_t seed);

struct TreeRun {
  std::size_t depth = 0;
  TreeVariant variant = TreeVariant::global;
  bool matches_id3 = false;
  std::string difference;
  double budget_total = 0.0;
};
std::vector<TreeRun> tree_reproduction(const LabeledTable& table, double epsilon, const std::vector<std::size_t>& depths,
                                       std::uint64_t seed);

// The 8-node graphs of the worked examples. `usual` has a and b sharing v2, v3.
EdgeGraph example_graph_usual();
EdgeGraph example_graph_worst();

}  // namespace dampen
