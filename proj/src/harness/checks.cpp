#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/harness.hpp"
#include "dampen/properties.hpp"

namespace dampen {
namespace {

struct Suite {
  std::string name;
  std::uint64_t seed;
  double budget;
  CheckReport* report;

  std::size_t scaled(std::size_t base) const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(base) * budget)));
  }

  void record(const std::string& check, const PropertyResult& r) {
    std::ostringstream os;
    if (r.pass) {
      os << r.cases << " cases";
    } else {
      os << r.witness;
    }
    report->results.push_back({name, check, r.pass, os.str()});
  }

  void record(const std::string& check, bool pass, const std::string& detail) {
    report->results.push_back({name, check, pass, detail});
  }

  void guarded(const std::string& check, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(check, false, std::string("threw: ") + e.what());
    }
  }
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

void core_suite(Suite& s) {
  s.guarded("kernels: dispatched equals scalar", [&] { s.record("kernels: dispatched equals scalar", kernels_agree(s.seed, s.scaled(200))); });
  s.guarded("LD and SLD with delta = du equal EM", [&] {
    s.record("LD and SLD with delta = du equal EM", em_instance_equality(s.seed, s.scaled(200)));
  });
  s.guarded("dampening is odd and nondecreasing", [&] {
    const auto problem = SelectionProblem::from_utilities({-7.0, -1.0, 0.0, 0.5, 3.0, 12.0}, 4.0, 10);
    SensitivityFunction delta;
    delta.eval = [](std::size_t t, std::size_t) { return 0.5 + static_cast<double>(t); };
    delta.declared_admissible = true;
    delta = bound_sensitivity(delta, 4.0, 10);
    bool ok = dampen(problem, delta, 0, 0.0) == 0.0;
    double prev = -INFINITY;
    for (double u = -20.0; u <= 20.0; u += 0.25) {
      const double d = dampen(problem, delta, 0, u);
      ok = ok && d >= prev && near(d, -dampen(problem, delta, 0, -u), 1e-12);
      prev = d;
    }
    s.record("dampening is odd and nondecreasing", ok, ok ? "u in [-20, 20]" : "monotonicity or symmetry broken");
  });
  s.guarded("budget composition", [&] {
    BudgetAccountant acc;
    acc.open_scope("q", Composition::sequential);
    acc.open_scope("p", Composition::parallel, "q");
    acc.open_scope("p/0", Composition::sequential, "p");
    acc.open_scope("p/1", Composition::sequential, "p");
    acc.account("q", 0.25).account("p/0", 0.5).account("p/0", 0.25).account("p/1", 0.5);
    const bool ok = near(acc.total(), 1.0, 1e-15);
    s.record("budget composition", ok, "total " + std::to_string(acc.total()));
  });
  s.guarded("permute-and-flip never worse than EM", [&] {
    const auto problem = SelectionProblem::from_utilities({0.0, 1.0, 2.0, 5.0, 5.5}, 1.0, 10);
    Rng rng(mix_seed({s.seed, 0xfu}));
    const auto est = permute_and_flip_error(problem, 1.0, s.scaled(20000), rng);
    const double em = expected_error(exponential_distribution(problem, 1.0), problem);
    const bool ok = est.mean <= em + 3.0 * est.standard_error;
    std::ostringstream os;
    os << "PF " << est.mean << " +- " << est.standard_error << ", EM " << em;
    s.record("permute-and-flip never worse than EM", ok, os.str());
  });
}

void sensitivity_suite(Suite& s) {
  for (TinyModel m : {TinyModel::percentile, TinyModel::graph, TinyModel::table}) {
    const std::string name = "bounded shift |D(x)-D(y)| <= 1 (" + std::string(to_string(m)) + ")";
    s.guarded(name, [&] { s.record(name, bounded_shift(m, s.seed, s.scaled(15))); });
    const std::string ind = "EM and LD probability ratios within e^eps (" + std::string(to_string(m)) + ")";
    s.guarded(ind, [&] { s.record(ind, indistinguishability(m, s.seed, s.scaled(10), 1.0)); });
  }
  s.guarded("dominance implies accuracy ordering", [&] {
    s.record("dominance implies accuracy ordering",
             dominance_accuracy_study(GapOrientation::follow_shift, s.seed, s.scaled(40)).result);
  });
  s.guarded("global sensitivity is admissible", [&] {
    const EdgeGraph g = example_graph_usual();
    const auto model = ebc_dataset_model(g);
    SensitivityModel<EdgeGraph> du;
    du.eval = [gs = model.global_sensitivity](const EdgeGraph&, std::size_t, std::size_t) { return gs; };
    du.declared_admissible = true;
    const auto rep = check_admissibility(du, model, g, 1, {}, false);
    s.record("global sensitivity is admissible", rep.pass, std::to_string(rep.comparisons) + " comparisons");
  });
  s.guarded("flattening bounds delta from above", [&] {
    const EdgeGraph g = example_graph_usual();
    std::vector<std::size_t> all(g.node_count());
    for (std::size_t v = 0; v < all.size(); ++v) all[v] = v;
    const auto problem = ebc_problem(g);
    const auto raw = ebc_sensitivity(g, all);
    const auto flat = flatten_sensitivity(raw, problem);
    bool ok = true;
    for (std::size_t t = 0; t < 6; ++t) {
      for (std::size_t r = 0; r < problem.size(); ++r) ok = ok && flat(t, r) >= raw(t, r) && flat(t, r) == flat(t, 0);
    }
    s.record("flattening bounds delta from above", ok, ok ? "t < 6" : "flattened value below delta");
  });
}

void percentile_suite(Suite& s) {
  s.guarded("LS0 closed form equals brute force", [&] {
    s.record("LS0 closed form equals brute force", percentile_ls0_matches_oracle(s.seed, s.scaled(150)));
  });
  s.guarded("LS_t equals brute force (t <= 2, n <= 4)", [&] {
    s.record("LS_t equals brute force (t <= 2, n <= 4)", percentile_ls_t_matches_oracle(s.seed, s.scaled(12), 4, 2));
  });
  s.guarded("LD error <= EM error on concentrated data", [&] {
    const auto x = concentrated_vector(21, 1000.0);
    const PercentileQuery q{50};
    const auto problem = percentile_problem(x, q);
    const auto flat = bound_sensitivity(flatten_sensitivity(percentile_sensitivity(x, q), problem),
                                        problem.global_sensitivity, problem.database_size);
    const double ld = expected_error(local_dampening_distribution(problem, flat, 1.0), problem);
    const double em = expected_error(exponential_distribution(problem, 1.0), problem);
    std::ostringstream os;
    os << "LD " << ld << ", EM " << em;
    s.record("LD error <= EM error on concentrated data", ld <= em + 1e-12, os.str());
  });
}

void graph_suite(Suite& s) {
  s.guarded("worked example values", [&] {
    const EdgeGraph usual = example_graph_usual();
    EdgeGraph worst = example_graph_worst();
    const double e1 = ebc(worst, worst.index_of("a"));
    worst.remove_edge(worst.index_of("a"), worst.index_of("b"));
    const double e2 = ebc(worst, worst.index_of("a"));
    const double e3 = ebc(usual, usual.index_of("a"));
    const bool ok = near(e1, 7.5, 1e-12) && near(e2, 15.0, 1e-12) && near(e3, 6.5, 1e-12);
    std::ostringstream os;
    os << "EBC " << e1 << " / " << e2 << " / " << e3;
    s.record("worked example values", ok, os.str());
  });
  s.guarded("EBC equals explicit geodesic counting", [&] {
    s.record("EBC equals explicit geodesic counting", ebc_matches_oracle(s.seed, s.scaled(60)));
  });
  s.guarded("delta EBC admissible (t <= 2)", [&] {
    s.record("delta EBC admissible (t <= 2)", ebc_admissible(s.seed, s.scaled(20), 6, 2));
  });
  s.guarded("top-k budget totals epsilon", [&] {
    const EdgeGraph g = sparse_graph(30, 4, s.seed);
    BudgetAccountant acc;
    Rng rng(mix_seed({s.seed, 0x70u}));
    const auto res = priv_topk(g, 2.0, 5, Mechanism::sld, rng, acc);
    const bool ok = near(acc.total(), 2.0, 1e-12) && res.chosen.size() == 5;
    s.record("top-k budget totals epsilon", ok, "total " + std::to_string(acc.total()));
  });
}

void tree_suite(Suite& s) {
  s.guarded("IG LS0 and LS_t equal brute force", [&] {
    s.record("IG LS0 and LS_t equal brute force", ig_ls_matches_oracle(s.seed, s.scaled(60), 6, 3));
  });
  s.guarded("IG LS0 bounded by the global sensitivity", [&] {
    bool ok = true;
    for (std::size_t n = 1; n <= 1000; n += 37) ok = ok && ls0_ig(ig_worst_case(n), 2) <= global_sensitivity_ig(n);
    s.record("IG LS0 bounded by the global sensitivity", ok, "worst-case tables up to 1000 rows");
  });
  s.guarded("high-epsilon trees reproduce ID3", [&] {
    const auto table = separable_toy_table(200, s.seed);
    bool ok = true;
    std::string detail = "depths 2 and 5, all variants";
    for (const auto& run : tree_reproduction(table, 1e6, {2, 5}, s.seed)) {
      const bool budget = near(run.budget_total, 1e6, 1e6 * 1e-12);
      if (ok && (!run.matches_id3 || !budget)) {
        detail = std::string(to_string(run.variant)) + " depth " + std::to_string(run.depth) + ": " +
                 (run.matches_id3 ? "budget total " + std::to_string(run.budget_total) : run.difference);
      }
      ok = ok && run.matches_id3 && budget;
    }
    s.record("high-epsilon trees reproduce ID3", ok, detail);
  });
}

void injected_fault(Suite& s) {
  s.guarded("injected fault: delta = 0 admissibility", [&] {
    const EdgeGraph g = example_graph_usual();
    SensitivityModel<EdgeGraph> zero;
    zero.eval = [](const EdgeGraph&, std::size_t, std::size_t) { return 0.0; };
    zero.declared_admissible = true;
    const auto rep = check_admissibility(zero, ebc_dataset_model(g), g, 1);
    std::ostringstream os;
    if (rep.witness) {
      const auto& w = *rep.witness;
      os << w.condition << " violated at t=" << w.t << ", candidate " << g.id(w.r) << ": required " << w.required
         << ", actual " << w.actual;
    } else {
      os << "no violation found";
    }
    s.record("injected fault: delta = 0 admissibility", rep.pass, os.str());
  });
}

}  // namespace

bool CheckReport::pass() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

CheckReport run_checks(const std::string& suite, std::uint64_t seed, double budget, bool inject_fault) {
  static const std::vector<std::pair<std::string, void (*)(Suite&)>> suites{{"core", core_suite},
                                                                            {"sensitivity", sensitivity_suite},
                                                                            {"percentile", percentile_suite},
                                                                            {"graph", graph_suite},
                                                                            {"tree", tree_suite}};
  if (!(budget > 0.0) || !std::isfinite(budget)) throw InvalidInput("check: budget must be positive");
  const bool known = suite == "all" || std::any_of(suites.begin(), suites.end(),
                                                   [&](const auto& s) { return s.first == suite; });
  if (!known) throw InvalidInput("unknown check suite '" + suite + "'");
  CheckReport report;
  for (const auto& [name, fn] : suites) {
    if (suite != "all" && suite != name) continue;
    Suite s{name, seed, budget, &report};
    fn(s);
  }
  if (inject_fault) {
    Suite s{"fault", seed, budget, &report};
    injected_fault(s);
  }
  return report;
}

}  // namespace dampen
