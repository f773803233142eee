#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dampen/error.hpp"
#include "dampen/harness.hpp"
#include "dampen/parallel.hpp"

namespace dampen {
namespace {

struct Cell {
  std::size_t setting = 0;
  std::size_t eps = 0;
  std::size_t mech = 0;
};

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!on_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

Monotonicity parse_monotonicity(const std::string& s) {
  if (s == "nonDecreasing") return Monotonicity::non_decreasing;
  if (s == "nonIncreasing") return Monotonicity::non_increasing;
  if (s == "flat") return Monotonicity::flat;
  if (s == "none") return Monotonicity::none;
  throw ParseError("unknown monotonicity '" + s + "'");
}

std::vector<Cell> grid(std::size_t settings, const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < settings; ++s) {
    for (std::size_t e = 0; e < spec.epsilons.size(); ++e) {
      for (std::size_t m = 0; m < spec.mechanisms.size(); ++m) cells.push_back({s, e, m});
    }
  }
  return cells;
}

// Exact selection metrics shared by the percentile and mechanism-compare runs.
ResultRow selection_row(const ExperimentSpec& spec, const Cell& cell, const SelectionProblem& problem,
                        const SensitivityFunction* delta, const SensitivityFunction* flat) {
  const Stopwatch watch(spec.record_timing);
  const Mechanism mech = spec.mechanisms[cell.mech];
  const double eps = spec.epsilons[cell.eps];
  ResultRow row;
  row.mechanism = std::string(to_string(mech));
  row.epsilon = eps;
  row.metric = "expectedError";
  switch (mech) {
    case Mechanism::em:
      row.value = expected_error(exponential_distribution(problem, eps), problem);
      break;
    case Mechanism::ld:
      row.value = expected_error(local_dampening_distribution(problem, *flat, eps), problem);
      break;
    case Mechanism::sld:
      row.value = expected_error(shifted_local_dampening_distribution(problem, *delta, eps), problem);
      break;
    case Mechanism::pf: {
      Rng rng(cell_seed(spec.base_seed, spec.application, mech, cell.eps, cell.setting));
      const auto est = permute_and_flip_error(problem, eps, spec.effective_runs(), rng);
      row.metric = "meanError";
      row.value = est.mean;
      row.dispersion = est.standard_error;
      break;
    }
  }
  row.runtime_ms = watch.ms();
  return row;
}

bool needs_sensitivity(const ExperimentSpec& spec) {
  for (Mechanism m : spec.mechanisms) {
    if (m == Mechanism::ld || m == Mechanism::sld) return true;
  }
  return false;
}

std::vector<ResultRow> run_percentile(const ExperimentSpec& spec, const NumericVector& x) {
  struct Setting {
    SelectionProblem problem;
    SensitivityFunction delta, flat;
  };
  std::vector<Setting> settings;
  for (int p : spec.percentiles) {
    const PercentileQuery q{p};
    Setting s;
    s.problem = percentile_problem(x, q);
    if (needs_sensitivity(spec)) {
      s.delta = percentile_sensitivity(x, q);
      s.flat = bound_sensitivity(flatten_sensitivity(s.delta, s.problem), s.problem.global_sensitivity,
                                 s.problem.database_size);
    }
    settings.push_back(std::move(s));
  }
  const auto cells = grid(settings.size(), spec);
  std::vector<ResultRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto& s = settings[cells[i].setting];
    rows[i] = selection_row(spec, cells[i], s.problem, &s.delta, &s.flat);
    rows[i].setting = "p=" + std::to_string(spec.percentiles[cells[i].setting]);
  });
  return rows;
}

std::vector<ResultRow> run_compare(const ExperimentSpec& spec, const CompareProblem& cp) {
  const SensitivityFunction delta = cp.delta();
  const SensitivityFunction flat = bound_sensitivity(flatten_sensitivity(delta, cp.problem),
                                                     cp.problem.global_sensitivity, cp.problem.database_size);
  const auto cells = grid(1, spec);
  std::vector<ResultRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    rows[i] = selection_row(spec, cells[i], cp.problem, &delta, &flat);
    rows[i].setting = "candidates=" + std::to_string(cp.problem.size());
  });
  return rows;
}

std::vector<ResultRow> run_topk(const ExperimentSpec& spec, const EdgeGraph& g) {
  if (spec.k == 0 || spec.k > g.node_count()) throw InvalidInput("topk: k must lie in [1, |V|]");
  const auto truth = true_topk(g, spec.k);
  const auto cells = grid(1, spec);
  const std::size_t runs = spec.effective_runs();
  std::vector<ResultRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Stopwatch watch(spec.record_timing);
    const Mechanism mech = spec.mechanisms[cells[i].mech];
    const double eps = spec.epsilons[cells[i].eps];
    double sum = 0.0, sq = 0.0;
    for (std::size_t run = 0; run < runs; ++run) {
      Rng rng(cell_seed(spec.base_seed, spec.application, mech, cells[i].eps, run));
      BudgetAccountant accountant;
      const double acc = topk_accuracy(priv_topk(g, eps, spec.k, mech, rng, accountant).chosen, truth);
      sum += acc;
      sq += acc * acc;
    }
    const double n = static_cast<double>(runs);
    const double mean = sum / n;
    const double var = runs > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
    rows[i] = {"", "", "k=" + std::to_string(spec.k), std::string(to_string(mech)), eps, "topkAccuracy", mean,
               std::sqrt(var / n), watch.ms()};
  });
  return rows;
}

TreeVariant variant_for(Mechanism m) {
  switch (m) {
    case Mechanism::em: return TreeVariant::global;
    case Mechanism::ld: return TreeVariant::local;
    case Mechanism::sld: return TreeVariant::shifted;
    case Mechanism::pf: break;
  }
  throw InvalidInput("tree: permute-and-flip is not a DiffPID3 variant (use em, ld or sld)");
}

std::vector<ResultRow> run_tree(const ExperimentSpec& spec, const LabeledTable& table) {
  for (Mechanism m : spec.mechanisms) variant_for(m);
  const auto cells = grid(1, spec);
  const std::size_t runs = spec.effective_runs();
  std::vector<ResultRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Stopwatch watch(spec.record_timing);
    const Mechanism mech = spec.mechanisms[cells[i].mech];
    TreeParams params;
    params.depth = spec.depth;
    params.epsilon = spec.epsilons[cells[i].eps];
    params.variant = variant_for(mech);
    std::vector<double> acc;
    for (std::size_t run = 0; run < runs; ++run) {
      const auto cv = cross_validate(table, params, spec.folds, cell_seed(spec.base_seed, spec.application, mech,
                                                                          cells[i].eps, run));
      acc.insert(acc.end(), cv.fold_accuracy.begin(), cv.fold_accuracy.end());
    }
    const double n = static_cast<double>(acc.size());
    const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    const double se = acc.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    rows[i] = {"", "", "depth=" + std::to_string(spec.depth), std::string(to_string(params.variant)),
               params.epsilon, "cvAccuracy", mean, se, watch.ms()};
  });
  return rows;
}

}  // namespace

std::string_view to_string(Application a) {
  switch (a) {
    case Application::percentile: return "percentile";
    case Application::topk: return "topk";
    case Application::tree: return "tree";
    case Application::mechanism_compare: return "mechanismCompare";
  }
  return "?";
}

Application parse_application(std::string_view name) {
  if (name == "percentile") return Application::percentile;
  if (name == "topk") return Application::topk;
  if (name == "tree") return Application::tree;
  if (name == "mechanismCompare" || name == "mechanism-compare") return Application::mechanism_compare;
  throw InvalidInput("unknown application '" + std::string(name) + "'");
}

SensitivityFunction CompareProblem::delta() const {
  SensitivityFunction f;
  const double du = problem.global_sensitivity;
  f.eval = [cols = sensitivity, du](std::size_t t, std::size_t r) {
    if (r >= cols.size() || cols[r].empty()) return du;
    return cols[r][std::min(t, cols[r].size() - 1)];
  };
  f.declared_admissible = true;
  f.monotonicity = monotonicity;
  return bound_sensitivity(f, du, problem.database_size);
}

CompareProblem parse_compare_problem(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("selection problem: ") + e.what());
  }
  CompareProblem cp;
  try {
    cp.problem.global_sensitivity = doc.at("global_sensitivity").get<double>();
    cp.problem.database_size = doc.value("database_size", std::size_t{1});
    cp.monotonicity = parse_monotonicity(doc.value("monotonicity", std::string("none")));
    for (const auto& c : doc.at("candidates")) {
      cp.problem.range.push_back(c.at("id").get<std::string>());
      cp.problem.utility.push_back(c.at("utility").get<double>());
      std::vector<double> col;
      if (c.contains("sensitivity")) col = c["sensitivity"].get<std::vector<double>>();
      for (double d : col) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw ParseError("sensitivity values must be finite and nonnegative");
      }
      cp.sensitivity.push_back(std::move(col));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("selection problem: ") + e.what());
  }
  try {
    cp.problem.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return cp;
}

void ExperimentSpec::validate() const {
  if (epsilons.empty()) throw InvalidInput("experiment: at least one epsilon is required");
  for (double e : epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidInput("experiment: epsilons must be positive and finite");
  }
  if (mechanisms.empty()) throw InvalidInput("experiment: at least one mechanism is required");
  if (runs && *runs == 0) throw InvalidInput("experiment: runs must be at least 1");
  if (application == Application::percentile) {
    if (percentiles.empty()) throw InvalidInput("experiment: at least one percentile is required");
    for (int p : percentiles) {
      if (p < 1 || p > 100) throw InvalidInput("experiment: percentiles must lie in [1, 100]");
    }
  }
  if (application == Application::tree && folds < 2) throw InvalidInput("experiment: folds must be at least 2");
}

std::size_t ExperimentSpec::effective_runs() const {
  if (runs) return *runs;
  switch (application) {
    case Application::percentile:
    case Application::mechanism_compare: return 100000;
    case Application::topk: return 100;
    case Application::tree: return 1;
  }
  return 1;
}

std::uint64_t cell_seed(std::uint64_t base, Application app, Mechanism mech, std::size_t eps_index,
                        std::size_t run_index) {
  return mix_seed({base, hash_label(to_string(app)), hash_label(to_string(mech)), eps_index, run_index});
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const Dataset& data) {
  spec.validate();
  std::vector<ResultRow> rows;
  switch (spec.application) {
    case Application::percentile:
      if (!std::holds_alternative<NumericVector>(data)) throw InvalidInput("percentile: numeric dataset required");
      rows = run_percentile(spec, std::get<NumericVector>(data));
      break;
    case Application::topk:
      if (!std::holds_alternative<EdgeGraph>(data)) throw InvalidInput("topk: graph dataset required");
      rows = run_topk(spec, std::get<EdgeGraph>(data));
      break;
    case Application::tree:
      if (!std::holds_alternative<LabeledTable>(data)) throw InvalidInput("tree: table dataset required");
      rows = run_tree(spec, std::get<LabeledTable>(data));
      break;
    case Application::mechanism_compare:
      if (!std::holds_alternative<CompareProblem>(data)) throw InvalidInput("mechanismCompare: selection problem required");
      rows = run_compare(spec, std::get<CompareProblem>(data));
      break;
  }
  for (auto& r : rows) {
    r.application = std::string(to_string(spec.application));
    r.dataset = spec.dataset_name;
  }
  return rows;
}

LoadedDataset load_dataset(const std::string& path, DatasetKind kind, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream report;
  switch (kind) {
    case DatasetKind::numeric: {
      if (!(options.lambda > 0.0)) throw InvalidInput("numeric dataset: lambda must be positive");
      NumericVector x = load_numeric_vector(in, options.lambda);
      report << "values kept: " << x.size();
      return {std::move(x), report.str()};
    }
    case DatasetKind::edges: {
      EdgeListReport rep = load_edge_list(in);
      if (options.degree_bound) rep.graph.set_max_degree_bound(options.degree_bound);
      report << "nodes: " << rep.graph.node_count() << ", edges kept: " << rep.edges_kept
             << ", duplicate edges dropped: " << rep.duplicate_edges << ", self-loops dropped: " << rep.self_loops;
      return {std::move(rep.graph), report.str()};
    }
    case DatasetKind::table: {
      std::ifstream schema_in(options.schema_path);
      if (!schema_in) throw IoError("cannot open schema '" + options.schema_path + "'");
      const TableSchema schema = parse_schema(schema_in);
      IngestionReport ing;
      LabeledTable table = discretize(load_table_csv(in, schema, &ing));
      report << "rows kept: " << ing.rows_kept << ", rows dropped: " << ing.rows_dropped;
      return {std::move(table), report.str()};
    }
    case DatasetKind::selection: {
      CompareProblem cp = parse_compare_problem(in);
      report << "candidates: " << cp.problem.size();
      return {std::move(cp), report.str()};
    }
  }
  throw InvalidInput("unknown dataset kind");
}

}  // namespace dampen
