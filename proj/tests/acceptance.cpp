// One PASS/FAIL line per acceptance criterion. Exit status is 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "dampen/properties.hpp"

using namespace dampen;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= limit_s) {
    v.pass = false;
    v.detail += "; over the time limit";
  }
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s [%.2fs / %.0fs] %s\n", v.pass ? "PASS" : "FAIL", id, name, secs, limit_s,
              v.detail.c_str());
  std::fflush(stdout);
}

bool within(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Verdict merge(std::initializer_list<std::pair<const char*, PropertyResult>> parts) {
  Verdict v;
  std::ostringstream os;
  for (const auto& [label, r] : parts) {
    if (os.tellp() > 0) os << "; ";
    os << label << ": " << (r.pass ? "ok" : "violated") << " over " << r.cases << " cases";
    if (!r.pass) os << " (" << r.witness << ")";
    v.pass = v.pass && r.pass;
  }
  v.detail = os.str();
  return v;
}

Verdict worked_examples() {
  const double tol = 0.005;
  std::ostringstream os;
  bool ok = true;
  auto expect = [&](const char* what, double got, double want) {
    const bool good = within(got, want, tol);
    ok = ok && good;
    os << what << "=" << got << (good ? "" : "(!)") << ' ';
  };

  EdgeGraph worst = example_graph_worst();
  const std::size_t wa = worst.index_of("a");
  expect("ebc_worst(a)", ebc(worst, wa), 7.5);
  worst.remove_edge(wa, worst.index_of("b"));
  expect("ebc_worst-edge(a)", ebc(worst, wa), 15.0);

  const EdgeGraph g = example_graph_usual();
  const std::size_t a = g.index_of("a"), b = g.index_of("b"), v4 = g.index_of("v_4");
  expect("ebc_usual(a)", ebc(g, a), 6.5);
  const auto model = ebc_dataset_model(g);
  const auto ls0 = brute_element_ls(model, g, 0);
  const auto ls1 = brute_element_ls(model, g, 1);
  expect("LS(G,0)", *std::max_element(ls0.begin(), ls0.end()), 3.0);
  expect("LS(G,1)", *std::max_element(ls1.begin(), ls1.end()), 5.0);
  expect("LS(G,0,v4)", ls0[v4], 2.0);

  const auto problem = ebc_problem(g, {}, 7.5);
  const auto flat = bound_sensitivity(flatten_sensitivity(brute_ls_model(model), model), problem.global_sensitivity,
                                      problem.database_size)
                        .at(g);
  expect("D(a)", dampen::dampen(problem, flat, a, problem.utility[a]), 1.7);
  const auto ld = local_dampening_distribution(problem, flat, 2.0).probabilities();
  const auto em = exponential_distribution(problem, 2.0).probabilities();
  expect("LD(a)", ld[a], 0.32);
  expect("LD(b)", ld[b], 0.32);
  expect("LD(v4)", ld[v4], 0.06);
  expect("EM(a)", em[a], 0.22);
  expect("EM(b)", em[b], 0.22);
  expect("EM(v4)", em[v4], 0.09);
  return {ok, os.str()};
}

Verdict dominance() {
  const auto corrected = dominance_accuracy_study(GapOrientation::follow_shift, 5, 200);
  const auto literal = dominance_accuracy_study(GapOrientation::literal, 5, 200);
  std::ostringstream os;
  os << "shift-aware gap orientation: " << (corrected.result.pass ? "ordered" : "violated") << " on "
     << corrected.result.cases << " dominating pairs";
  if (!corrected.result.pass) os << " (" << corrected.result.witness << ")";
  os << "; literal nonincreasing-gap orientation: " << (literal.result.pass ? "ordered" : "violated") << " on "
     << literal.result.cases << " dominating pairs";
  if (!literal.result.pass) os << " (" << literal.result.witness << ")";
  os << "; beta-family errors";
  for (const auto& p : corrected.beta_errors) os << ' ' << p.beta << ':' << p.expected_error;
  return {corrected.result.pass && literal.result.pass, os.str()};
}

Verdict ig_sensitivity_check() {
  const auto oracle = ig_ls_matches_oracle(7, 300, 6, 3);
  bool bounded = true;
  for (std::size_t n = 1; n <= 2000; ++n) bounded = bounded && ls0_ig(ig_worst_case(n), 2) <= global_sensitivity_ig(n);
  const std::size_t n = 200;
  const double worst = ls0_ig(ig_worst_case(n), 2);
  const double gs = global_sensitivity_ig(n);
  const bool equal = within(worst, gs, 1e-9);
  Verdict v = merge({{"LS0/LS_t vs exhaustive oracle", oracle}});
  std::ostringstream os;
  os << v.detail << "; LS0 <= global sensitivity for worst-case tables n <= 2000: " << (bounded ? "ok" : "violated")
     << "; worst case n=" << n << ": LS0 " << worst << " vs global sensitivity " << gs << " (gap " << gs - worst
     << ", equality " << (equal ? "holds" : "does not hold") << ")";
  return {v.pass && bounded && equal, os.str()};
}

Verdict trends() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : trend_study({0.1, 1.0, 10.0}, 100000, 11)) {
    const bool order = r.sld <= r.ld + 1e-9 && r.ld <= r.em + 1e-9;
    const bool pf = r.pf_mean <= r.em + 3.0 * r.pf_stderr;
    ok = ok && order && pf;
    os << r.dataset << "@" << r.epsilon << " SLD " << r.sld << " LD " << r.ld << " EM " << r.em << " PF " << r.pf_mean
       << "+-" << r.pf_stderr << (order && pf ? "" : " (!)") << "; ";
  }
  return {ok, os.str()};
}

Verdict trees() {
  const auto table = separable_toy_table(200, 3);
  bool ok = true;
  std::ostringstream os;
  for (const auto& run : tree_reproduction(table, 1e6, {2, 5}, 3)) {
    const bool budget = within(run.budget_total, 1e6, 1e6 * 1e-12);
    ok = ok && run.matches_id3 && budget;
    os << to_string(run.variant) << "/d" << run.depth << ": " << (run.matches_id3 ? "matches ID3" : run.difference)
       << ", budget " << run.budget_total << (budget ? "" : " (!)") << "; ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  criterion(1, "worked-example replication", 1, worked_examples);
  criterion(2, "EM-instance equality", 5, [] { return merge({{"LD/SLD vs EM", em_instance_equality(2, 200)}}); });
  criterion(3, "bounded shift of the dampening function", 30, [] {
    return merge({{"percentile", bounded_shift(TinyModel::percentile, 3, 100)},
                  {"graph", bounded_shift(TinyModel::graph, 3, 100)},
                  {"table", bounded_shift(TinyModel::table, 3, 100)}});
  });
  criterion(4, "epsilon-indistinguishability witness", 30, [] {
    Verdict all;
    std::ostringstream os;
    for (double eps : {0.5, 1.0, 2.0}) {
      const Verdict v = merge({{"percentile", indistinguishability(TinyModel::percentile, 4, 40, eps)},
                               {"graph", indistinguishability(TinyModel::graph, 4, 40, eps)},
                               {"table", indistinguishability(TinyModel::table, 4, 40, eps)}});
      all.pass = all.pass && v.pass;
      os << "eps " << eps << " [" << v.detail << "] ";
    }
    all.detail = os.str();
    return all;
  });
  criterion(5, "dominance implies accuracy ordering", 10, dominance);
  criterion(6, "percentile local sensitivity vs oracle", 60, [] {
    return merge({{"LS0 (500 vectors, n <= 8, grid 64)", percentile_ls0_matches_oracle(6, 500, 8, 64)},
                  {"LS_t (t <= 2, n <= 5)", percentile_ls_t_matches_oracle(6, 60, 5, 2, 8)}});
  });
  criterion(7, "IG sensitivity", 60, ig_sensitivity_check);
  criterion(8, "delta EBC admissibility", 60,
            [] { return merge({{"100 graphs, <= 6 nodes, t <= 2", ebc_admissible(8, 100, 6, 2)}}); });
  criterion(9, "desk-scale trend checks", 120, trends);
  criterion(10, "tree end-to-end", 30, trees);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
