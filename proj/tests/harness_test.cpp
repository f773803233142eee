#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/harness.hpp"
#include "dampen/properties.hpp"

using namespace dampen;

namespace {

std::string fixture(const std::string& name) { return std::string(DAMPEN_TEST_DATA) + "/" + name; }

ExperimentSpec compare_spec() {
  ExperimentSpec spec;
  spec.application = Application::mechanism_compare;
  spec.dataset_name = "compare.json";
  spec.epsilons = {0.5, 1.0};
  spec.mechanisms = {Mechanism::em, Mechanism::pf, Mechanism::ld, Mechanism::sld};
  spec.runs = 2000;
  spec.base_seed = 42;
  return spec;
}

std::string emit_string(const std::vector<ResultRow>& rows, const ExperimentSpec& spec, OutputFormat f) {
  std::ostringstream os;
  emit(rows, spec, f, os);
  return os.str();
}

struct ThreadsOverride {
  explicit ThreadsOverride(const char* value) {
    if (const char* old = std::getenv("DAMPEN_THREADS")) saved = old;
    setenv("DAMPEN_THREADS", value, 1);
  }
  ~ThreadsOverride() {
    if (saved.empty()) unsetenv("DAMPEN_THREADS");
    else setenv("DAMPEN_THREADS", saved.c_str(), 1);
  }
  std::string saved;
};

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("experiment settings validation") {
    ExperimentSpec spec = compare_spec();
    spec.epsilons.clear();
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = compare_spec();
    spec.epsilons = {0.0};
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = compare_spec();
    spec.mechanisms.clear();
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = compare_spec();
    spec.runs.reset();
    CHECK(spec.effective_runs() == 100000);
    spec.application = Application::topk;
    CHECK(spec.effective_runs() == 100);
    spec.application = Application::tree;
    CHECK(spec.effective_runs() == 1);
  }

  TEST_CASE("application names") {
    CHECK(parse_application("mechanism-compare") == Application::mechanism_compare);
    CHECK(to_string(Application::mechanism_compare) == "mechanismCompare");
    CHECK_THROWS_AS(parse_application("nope"), InvalidInput);
  }

  TEST_CASE("cell seeds differ across cells") {
    const auto a = cell_seed(1, Application::topk, Mechanism::em, 0, 0);
    CHECK(a == cell_seed(1, Application::topk, Mechanism::em, 0, 0));
    CHECK(a != cell_seed(1, Application::topk, Mechanism::em, 0, 1));
    CHECK(a != cell_seed(1, Application::topk, Mechanism::ld, 0, 0));
    CHECK(a != cell_seed(2, Application::topk, Mechanism::em, 0, 0));
  }

  TEST_CASE("compare problems") {
    const auto loaded = load_dataset(fixture("compare.json"), DatasetKind::selection, {});
    const auto& cp = std::get<CompareProblem>(loaded.data);
    CHECK(cp.problem.range == std::vector<std::string>{"alpha", "beta", "gamma"});
    const auto delta = cp.delta();
    CHECK(delta(0, 0) == 1.0);
    CHECK(delta(5, 0) == 3.0);
    CHECK(delta(5, 1) == 1.5);
    CHECK(delta(0, 2) == 4.0);
    CHECK(delta(100, 0) == 4.0);

    std::istringstream bad(R"({"global_sensitivity": 1, "candidates": [{"id": "x"}]})");
    CHECK_THROWS_AS(parse_compare_problem(bad), ParseError);
    std::istringstream not_json("{");
    CHECK_THROWS_AS(parse_compare_problem(not_json), ParseError);
  }

  TEST_CASE("rows round-trip through both formats") {
    const auto spec = compare_spec();
    const auto data = load_dataset(fixture("compare.json"), DatasetKind::selection, {}).data;
    const auto rows = run_experiment(spec, data);
    REQUIRE(rows.size() == 8);
    std::istringstream json(emit_string(rows, spec, OutputFormat::json));
    CHECK(parse_rows_json(json) == rows);
    std::istringstream csv(emit_string(rows, spec, OutputFormat::csv));
    CHECK(parse_rows_csv(csv) == rows);
  }

  TEST_CASE("a single row still emits a results array") {
    const ResultRow row{"percentile", "d", "p=50", "em", 1.0, "expectedError", 0.5, 0.0, 0.0};
    const auto text = emit_string({row}, compare_spec(), OutputFormat::json);
    std::istringstream in(text);
    CHECK(parse_rows_json(in).size() == 1);
    CHECK(text.find("\"results\": [") != std::string::npos);
    CHECK_THROWS_AS(emit_string({}, compare_spec(), OutputFormat::csv), InvalidInput);
  }

  TEST_CASE("output is byte-identical across reruns and thread counts") {
    auto spec = compare_spec();
    const auto data = load_dataset(fixture("compare.json"), DatasetKind::selection, {}).data;
    std::string one, four;
    {
      ThreadsOverride t("1");
      one = emit_string(run_experiment(spec, data), spec, OutputFormat::json);
    }
    {
      ThreadsOverride t("4");
      four = emit_string(run_experiment(spec, data), spec, OutputFormat::json);
      CHECK(emit_string(run_experiment(spec, data), spec, OutputFormat::json) == four);
    }
    CHECK(one == four);

    LoadOptions opt;
    opt.lambda = 10;
    const auto numeric = load_dataset(fixture("values.txt"), DatasetKind::numeric, opt).data;
    spec.application = Application::percentile;
    spec.percentiles = {25, 50};
    std::string a, b;
    {
      ThreadsOverride t("1");
      a = emit_string(run_experiment(spec, numeric), spec, OutputFormat::csv);
    }
    {
      ThreadsOverride t("3");
      b = emit_string(run_experiment(spec, numeric), spec, OutputFormat::csv);
    }
    CHECK(a == b);
  }

  TEST_CASE("timing is opt-in") {
    auto spec = compare_spec();
    spec.runs = 10;
    const auto data = load_dataset(fixture("compare.json"), DatasetKind::selection, {}).data;
    for (const auto& row : run_experiment(spec, data)) CHECK(row.runtime_ms == 0.0);
  }

  TEST_CASE("every application runs on its fixture") {
    ExperimentSpec spec = compare_spec();
    spec.mechanisms = {Mechanism::em, Mechanism::ld, Mechanism::sld};
    spec.epsilons = {1.0};

    spec.application = Application::topk;
    spec.k = 2;
    spec.runs = 4;
    const auto graph = load_dataset(fixture("graph.txt"), DatasetKind::edges, {}).data;
    const auto topk = run_experiment(spec, graph);
    REQUIRE(topk.size() == 3);
    CHECK(topk[0].metric == "topkAccuracy");
    CHECK(topk[0].setting == "k=2");

    spec.application = Application::tree;
    spec.depth = 2;
    spec.folds = 2;
    spec.runs = 1;
    LoadOptions opt;
    opt.schema_path = fixture("schema.json");
    const auto table = load_dataset(fixture("table.csv"), DatasetKind::table, opt).data;
    const auto tree = run_experiment(spec, table);
    REQUIRE(tree.size() == 3);
    CHECK(tree[0].mechanism == "global");
    CHECK(tree[2].mechanism == "shifted");
    for (const auto& r : tree) CHECK((r.value >= 0.0 && r.value <= 1.0));

    spec.mechanisms = {Mechanism::pf};
    CHECK_THROWS_AS(run_experiment(spec, table), InvalidInput);
    spec.application = Application::percentile;
    CHECK_THROWS(run_experiment(spec, table));
  }

  TEST_CASE("dataset loading errors") {
    CHECK_THROWS_AS(load_dataset(fixture("missing.txt"), DatasetKind::numeric, {}), IoError);
    LoadOptions opt;
    opt.schema_path = fixture("missing.json");
    CHECK_THROWS_AS(load_dataset(fixture("table.csv"), DatasetKind::table, opt), IoError);
    LoadOptions tight;
    tight.degree_bound = 1;
    CHECK_THROWS_AS(load_dataset(fixture("graph.txt"), DatasetKind::edges, tight), InvalidInput);
  }

  TEST_CASE("writing to an unwritable path is an I/O error") {
    const ResultRow row{"percentile", "d", "p=50", "em", 1.0, "expectedError", 0.5, 0.0, 0.0};
    CHECK_THROWS_AS(emit({row}, compare_spec(), OutputFormat::csv, "/nonexistent-dir/out.csv"), IoError);
  }
}

TEST_SUITE("checks") {
  TEST_CASE("core suite passes") {
    const auto report = run_checks("core", 1, 0.2);
    CHECK(report.pass());
    CHECK_FALSE(report.results.empty());
  }

  TEST_CASE("injected fault is caught with a witness") {
    const auto report = run_checks("core", 1, 0.1, true);
    CHECK_FALSE(report.pass());
    const auto& last = report.results.back();
    CHECK(last.suite == "fault");
    CHECK_FALSE(last.pass);
    CHECK(last.detail.find("t=0") != std::string::npos);
  }

  TEST_CASE("unknown suites and budgets are rejected") {
    CHECK_THROWS_AS(run_checks("everything", 1), InvalidInput);
    CHECK_THROWS_AS(run_checks("core", 1, 0.0), InvalidInput);
  }
}
