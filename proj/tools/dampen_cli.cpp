#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dampen/error.hpp"
#include "dampen/harness.hpp"

namespace {

enum Exit { ok = 0, validation = 1, check_failed = 2, io = 3 };

struct Common {
  std::vector<double> epsilons;
  std::vector<std::string> mechanisms;
  std::uint64_t seed = 1;
  std::size_t runs = 0;
  std::string output = "json";
  std::string out;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_experiment = true) {
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd->add_option("--output", c.output, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_option("--out", c.out, "Write output to this path instead of stdout");
  if (!with_experiment) return;
  cmd->add_option("--epsilon", c.epsilons, "Privacy budgets, comma separated")->delimiter(',')->required();
  cmd->add_option("--mechanism", c.mechanisms, "Mechanisms among em, pf, ld, sld, comma separated")->delimiter(',');
  cmd->add_option("--runs", c.runs, "Monte Carlo runs (application default when omitted)");
  cmd->add_flag("--timing", c.timing, "Record wall-clock runtime per cell");
}

dampen::ExperimentSpec make_spec(dampen::Application app, const Common& c, const std::string& dataset,
                                 std::vector<std::string> default_mechanisms) {
  dampen::ExperimentSpec spec;
  spec.application = app;
  spec.dataset_name = dataset;
  spec.epsilons = c.epsilons;
  for (const auto& m : c.mechanisms.empty() ? default_mechanisms : c.mechanisms) {
    spec.mechanisms.push_back(dampen::parse_mechanism(m));
  }
  spec.base_seed = c.seed;
  if (c.runs) spec.runs = c.runs;
  spec.record_timing = c.timing;
  return spec;
}

void write(const std::vector<dampen::ResultRow>& rows, const dampen::ExperimentSpec& spec, const Common& c) {
  const auto format = c.output == "csv" ? dampen::OutputFormat::csv : dampen::OutputFormat::json;
  if (c.out.empty()) dampen::emit(rows, spec, format, std::cout);
  else dampen::emit(rows, spec, format, c.out);
}

std::string basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private selection with local dampening: experiments and verification suites"};
  app.require_subcommand(1);

  Common pc, tc, rc, mc, cc;
  std::string p_data, t_graph, r_data, r_schema, m_data, suite = "all";
  double lambda = 0.0, budget = 1.0;
  std::vector<int> percentiles{50};
  std::size_t k = 1, depth = 5, folds = 10, degree_bound = 0;
  bool inject = false;

  auto* percentile = app.add_subcommand("percentile", "Percentile selection over a numeric vector");
  add_common(percentile, pc);
  percentile->add_option("--data", p_data, "One value per line")->required();
  percentile->add_option("--lambda", lambda, "Upper end of the value domain")->required();
  percentile->add_option("--p", percentiles, "Percentiles, comma separated")->delimiter(',')->capture_default_str();

  auto* topk = app.add_subcommand("topk", "Top-k egocentric betweenness selection over an edge list");
  add_common(topk, tc);
  topk->add_option("--graph", t_graph, "Edge list, one 'u v' pair per line")->required();
  topk->add_option("--k", k, "Number of nodes to select")->capture_default_str();
  topk->add_option("--degree-bound", degree_bound, "Public bound on the maximum degree");

  auto* tree = app.add_subcommand("tree", "Private ID3 cross-validated accuracy");
  add_common(tree, rc);
  tree->add_option("--data", r_data, "CSV with a header row")->required();
  tree->add_option("--schema", r_schema, "JSON attribute schema")->required();
  tree->add_option("--depth", depth, "Maximum tree depth")->capture_default_str();
  tree->add_option("--folds", folds, "Cross-validation folds")->capture_default_str();

  auto* compare = app.add_subcommand("mechanism-compare", "Exact errors of the mechanisms on one selection problem");
  add_common(compare, mc);
  compare->add_option("--data", m_data, "Selection problem JSON")->required();

  auto* check = app.add_subcommand("check", "Run the verification suites");
  add_common(check, cc, false);
  check->add_option("--suite", suite, "Suite to run")
      ->check(CLI::IsMember({"core", "sensitivity", "percentile", "graph", "tree", "all"}))
      ->capture_default_str();
  check->add_option("--budget", budget, "Scale factor for the number of random instances")->capture_default_str();
  check->add_flag("--inject-faulty", inject, "Add an admissibility check on delta = 0, which must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return validation;
  }

  try {
    if (check->parsed()) {
      const auto report = dampen::run_checks(suite, cc.seed, budget, inject);
      std::ostream* out = &std::cout;
      std::ofstream file;
      if (!cc.out.empty()) {
        file.open(cc.out);
        if (!file) throw dampen::IoError("cannot open '" + cc.out + "' for writing");
        out = &file;
      }
      if (cc.output == "csv") {
        *out << "suite,check,status,detail\n";
        for (const auto& r : report.results) {
          std::string detail = r.detail;
          for (char& ch : detail) {
            if (ch == '"') ch = '\'';
          }
          *out << r.suite << ",\"" << r.name << "\"," << (r.pass ? "PASS" : "FAIL") << ",\"" << detail << "\"\n";
        }
      } else {
        for (const auto& r : report.results) {
          *out << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.name << " (" << r.detail << ")\n";
        }
      }
      if (!*out) throw dampen::IoError("write failure");
      return report.pass() ? ok : check_failed;
    }

    dampen::ExperimentSpec spec;
    std::optional<dampen::LoadedDataset> loaded;
    const Common* common = nullptr;
    if (percentile->parsed()) {
      dampen::LoadOptions opt;
      opt.lambda = lambda;
      loaded = dampen::load_dataset(p_data, dampen::DatasetKind::numeric, opt);
      spec = make_spec(dampen::Application::percentile, pc, basename(p_data), {"em", "pf", "ld", "sld"});
      spec.percentiles = percentiles;
      common = &pc;
    } else if (topk->parsed()) {
      dampen::LoadOptions opt;
      if (degree_bound) opt.degree_bound = degree_bound;
      loaded = dampen::load_dataset(t_graph, dampen::DatasetKind::edges, opt);
      spec = make_spec(dampen::Application::topk, tc, basename(t_graph), {"em", "ld", "sld"});
      spec.k = k;
      common = &tc;
    } else if (tree->parsed()) {
      dampen::LoadOptions opt;
      opt.schema_path = r_schema;
      loaded = dampen::load_dataset(r_data, dampen::DatasetKind::table, opt);
      spec = make_spec(dampen::Application::tree, rc, basename(r_data), {"em", "ld", "sld"});
      spec.depth = depth;
      spec.folds = folds;
      common = &rc;
    } else {
      loaded = dampen::load_dataset(m_data, dampen::DatasetKind::selection, {});
      spec = make_spec(dampen::Application::mechanism_compare, mc, basename(m_data), {"em", "pf", "ld", "sld"});
      common = &mc;
    }
    std::cerr << spec.dataset_name << ": " << loaded->report << '\n';
    write(dampen::run_experiment(spec, loaded->data), spec, *common);
    return ok;
  } catch (const dampen::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  }
}
