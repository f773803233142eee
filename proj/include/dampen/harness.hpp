#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dampen/core.hpp"
#include "dampen/graph.hpp"
#include "dampen/percentile.hpp"
#include "dampen/tree.hpp"

namespace dampen {

enum class Application { percentile, topk, tree, mechanism_compare };
std::string_view to_string(Application a);
Application parse_application(std::string_view name);

// A selection problem given candidate by candidate. Missing sensitivity
// columns mean delta = global sensitivity; short columns repeat their last
// value. Columns are bounded before use.
struct CompareProblem {
  SelectionProblem problem;
  std::vector<std::vector<double>> sensitivity;
  Monotonicity monotonicity = Monotonicity::none;
  SensitivityFunction delta() const;
};
// {"global_sensitivity": x, "database_size": n, "monotonicity": "none",
//  "candidates": [{"id": "...", "utility": u, "sensitivity": [d0, d1, ...]}, ...]}
CompareProblem parse_compare_problem(std::istream& in);

using Dataset = std::variant<NumericVector, EdgeGraph, LabeledTable, CompareProblem>;

struct ExperimentSpec {
  Application application = Application::percentile;
  std::string dataset_name;
  std::vector<double> epsilons;
  std::vector<Mechanism> mechanisms;
  std::uint64_t base_seed = 1;
  std::optional<std::size_t> runs;  // application default when unset
  bool record_timing = false;       // runtimeMs stays 0 otherwise, keeping output byte-stable

  std::vector<int> percentiles{50};  // percentile
  std::size_t k = 1;                 // topk
  std::size_t depth = 5;             // tree
  std::size_t folds = 10;            // tree

  void validate() const;
  std::size_t effective_runs() const;
};

struct ResultRow {
  std::string application;
  std::string dataset;
  std::string setting;  // application parameter, e.g. "p=50" or "k=3"
  std::string mechanism;
  double epsilon = 0.0;
  std::string metric;  // expectedError, meanError, topkAccuracy, cvAccuracy
  double value = 0.0;
  double dispersion = 0.0;  // standard error for Monte Carlo metrics, 0 for exact ones
  double runtime_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

// Per-cell seed from (base seed, application, mechanism, epsilon index, run index).
std::uint64_t cell_seed(std::uint64_t base, Application app, Mechanism mech, std::size_t eps_index,
                        std::size_t run_index);

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const Dataset& data);

enum class DatasetKind { numeric, edges, table, selection };
struct LoadOptions {
  double lambda = 0.0;                      // numeric
  std::optional<std::size_t> degree_bound;  // edges
  std::string schema_path;                  // table
};
struct LoadedDataset {
  Dataset data;
  std::string report;  // human-readable ingestion summary
};
LoadedDataset load_dataset(const std::string& path, DatasetKind kind, const LoadOptions& options);

enum class OutputFormat { json, csv };
void emit(const std::vector<ResultRow>& rows, const ExperimentSpec& spec, OutputFormat format, std::ostream& out);
void emit(const std::vector<ResultRow>& rows, const ExperimentSpec& spec, OutputFormat format,
          const std::string& path);
std::vector<ResultRow> parse_rows_json(std::istream& in);
std::vector<ResultRow> parse_rows_csv(std::istream& in);

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = true;
  std::string detail;  // witness on failure
};
struct CheckReport {
  std::vector<CheckResult> results;
  bool pass() const;
};

// Suites: core, sensitivity, percentile, graph, tree, all. `budget` scales
// the number of random instances (1.0 = default). `inject_fault` adds an
// admissibility check on delta = 0, which must fail with a witness.
CheckReport run_checks(const std::string& suite, std::uint64_t seed, double budget = 1.0, bool inject_fault = false);

}  // namespace dampen
