#include "dampen/properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/kernels.hpp"

namespace dampen {
namespace {

constexpr double kTinyLambda = 4.0;
constexpr std::size_t kTinyGrid = 5;
constexpr std::size_t kTableRowsCap = 64;

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

std::string describe(const AdmissibilityWitness& w) {
  std::ostringstream os;
  os << w.condition << " violated at t=" << w.t << ", r=" << w.r << ", database " << w.database << ": required "
     << w.required << ", actual " << w.actual;
  return os.str();
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

EdgeGraph random_graph(std::size_t n, double p, Rng& rng) {
  EdgeGraph g;
  for (std::size_t v = 0; v < n; ++v) g.add_node("n" + std::to_string(v));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (uniform01(rng) < p) g.add_edge(u, v);
    }
  }
  return g;
}

// Calls visit(model, sensitivity model, x) for `instances` tiny databases.
template <class Visit>
void for_tiny_instances(TinyModel kind, std::uint64_t seed, std::size_t instances, Visit&& visit) {
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(mix_seed({seed, hash_label(to_string(kind)), i}));
    switch (kind) {
      case TinyModel::percentile: {
        const std::size_t n = 1 + uniform_below(rng, 3);
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(uniform_below(rng, kTinyGrid));
        const NumericVector x = NumericVector::from_values(v, kTinyLambda);
        const PercentileQuery q{static_cast<int>(1 + uniform_below(rng, 100))};
        // Grid points coincide with the values, so the neighbour relation is symmetric.
        const auto model = percentile_dataset_model(x, q, kTinyGrid);
        const auto delta = bound_sensitivity(brute_ls_model(model), model.global_sensitivity, model.database_size);
        visit(model, delta, x.values(), "percentile p=" + std::to_string(q.p) + " x=" + join(v));
        break;
      }
      case TinyModel::graph: {
        const EdgeGraph g = random_graph(4 + uniform_below(rng, 2), 0.5, rng);
        const auto model = ebc_dataset_model(g);
        const auto delta = bound_sensitivity(brute_ls_model(model), model.global_sensitivity, model.database_size);
        visit(model, delta, g, "graph " + g.adjacency_key());
        break;
      }
      case TinyModel::table: {
        const std::vector<std::size_t> arities{2, 2};
        auto model = ig_table_dataset_model(arities, 2, kTableRowsCap);
        // The lattice of tables is unbounded, so element LS is used unbounded
        // with a global sensitivity valid for every table the search can reach.
        const auto delta = brute_ls_model(model);
        Contingency joint(8, 0);
        const std::size_t rows = uniform_below(rng, 5);
        for (std::size_t r = 0; r < rows; ++r) ++joint[uniform_below(rng, joint.size())];
        std::vector<double> jd(joint.begin(), joint.end());
        visit(model, delta, joint, "table counts=" + join(jd));
        break;
      }
    }
  }
}

}  // namespace

std::string_view to_string(TinyModel m) {
  switch (m) {
    case TinyModel::percentile: return "percentile";
    case TinyModel::graph: return "graph";
    case TinyModel::table: return "table";
  }
  return "?";
}

PropertyResult em_instance_equality(std::uint64_t seed, std::size_t problems, double tolerance) {
  PropertyResult res;
  for (std::size_t i = 0; i < problems; ++i) {
    Rng rng(mix_seed({seed, 0xe3u, i}));
    const std::size_t m = 1 + uniform_below(rng, 12);
    std::vector<double> u(m);
    for (auto& x : u) x = uniform(rng, -50.0, 50.0);
    const double du = uniform(rng, 0.1, 20.0);
    const std::size_t n = 1 + uniform_below(rng, 200);
    const double eps = std::exp(uniform(rng, std::log(0.01), std::log(10.0)));
    const auto problem = SelectionProblem::from_utilities(u, du, n);
    const auto delta = SensitivityFunction::constant(du, true, true);
    const auto em = exponential_distribution(problem, eps).probabilities();
    const auto ld = local_dampening_distribution(problem, delta, eps).probabilities();
    const auto sld = shifted_local_dampening_distribution(problem, delta, eps).probabilities();
    for (std::size_t r = 0; r < m; ++r) {
      ++res.cases;
      const double diff = std::max(std::fabs(em[r] - ld[r]), std::fabs(em[r] - sld[r]));
      res.worst = std::max(res.worst, diff);
      if (diff > tolerance) {
        std::ostringstream os;
        os << "problem " << i << " candidate " << r << ": EM " << em[r] << ", LD " << ld[r] << ", SLD " << sld[r];
        res.fail(os.str());
      }
    }
  }
  return res;
}

PropertyResult bounded_shift(TinyModel kind, std::uint64_t seed, std::size_t instances, double tolerance) {
  PropertyResult res;
  for_tiny_instances(kind, seed, instances, [&](const auto& model, const auto& delta, const auto& x,
                                                const std::string& label) {
    using Db = std::decay_t<decltype(x)>;
    auto scores = [&](const Db& db) {
      const auto problem = model.problem(db);
      const auto d = delta.at(db);
      std::vector<double> s(problem.size());
      for (std::size_t r = 0; r < s.size(); ++r) s[r] = dampen(problem, d, r, problem.utility[r]);
      return s;
    };
    const auto dx = scores(x);
    model.neighbors(x, [&](const Db& y) {
      const auto dy = scores(y);
      for (std::size_t r = 0; r < dx.size(); ++r) {
        ++res.cases;
        const double gap = std::fabs(dx[r] - dy[r]);
        res.worst = std::max(res.worst, gap);
        if (gap > 1.0 + tolerance) {
          std::ostringstream os;
          os << label << ", neighbour " << model.key(y) << ", r=" << r << ": |D(x)-D(y)| = " << gap;
          res.fail(os.str());
        }
      }
    });
  });
  return res;
}

PropertyResult indistinguishability(TinyModel kind, std::uint64_t seed, std::size_t instances, double epsilon) {
  PropertyResult res;
  for_tiny_instances(kind, seed, instances, [&](const auto& model, const auto& delta, const auto& x,
                                                const std::string& label) {
    using Db = std::decay_t<decltype(x)>;
    auto dists = [&](const Db& db) {
      const auto problem = model.problem(db);
      return std::pair{exponential_distribution(problem, epsilon).probabilities(),
                       local_dampening_distribution(problem, delta.at(db), epsilon).probabilities()};
    };
    const auto px = dists(x);
    model.neighbors(x, [&](const Db& y) {
      const auto py = dists(y);
      auto compare = [&](const std::vector<double>& a, const std::vector<double>& b, const char* mech) {
        for (std::size_t r = 0; r < a.size(); ++r) {
          ++res.cases;
          const double ratio = std::fabs(std::log(a[r] / b[r])) / epsilon;
          res.worst = std::max(res.worst, ratio);
          if (!(ratio <= 1.0 + 1e-9)) {
            std::ostringstream os;
            os << mech << ' ' << label << ", neighbour " << model.key(y) << ", r=" << r << ": P(x)=" << a[r]
               << ", P(y)=" << b[r];
            res.fail(os.str());
          }
        }
      };
      compare(px.first, py.first, "EM");
      compare(px.second, py.second, "LD");
    });
  });
  return res;
}

PropertyResult percentile_ls0_matches_oracle(std::uint64_t seed, std::size_t vectors, std::size_t max_n,
                                             std::size_t grid) {
  PropertyResult res;
  for (std::size_t it = 0; it < vectors; ++it) {
    Rng rng(mix_seed({seed, 0x150u, it}));
    const std::size_t n = 1 + uniform_below(rng, max_n);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform01(rng) < 0.5 ? uniform(rng, 0.0, 10.0) : static_cast<double>(uniform_below(rng, 11));
    const auto x = NumericVector::from_values(v, 10.0);
    const PercentileQuery q{static_cast<int>(1 + uniform_below(rng, 100))};
    const auto ls = brute_element_ls(percentile_dataset_model(x, q, grid), x.values(), 0);
    for (std::size_t rank = 1; rank <= n; ++rank) {
      ++res.cases;
      const double closed = ls0_percentile(x, q, rank);
      const double oracle = ls[rank - 1];
      res.worst = std::max(res.worst, std::fabs(closed - oracle));
      if (std::fabs(closed - oracle) > 1e-9) {
        std::ostringstream os;
        os << "p=" << q.p << " x=" << join(v) << " rank " << rank << ": closed form " << closed << ", oracle "
           << oracle;
        res.fail(os.str());
      }
    }
  }
  return res;
}

PropertyResult percentile_ls_t_matches_oracle(std::uint64_t seed, std::size_t vectors, std::size_t max_n,
                                              std::size_t max_t, std::size_t grid) {
  PropertyResult res;
  for (std::size_t it = 0; it < vectors; ++it) {
    Rng rng(mix_seed({seed, 0x151u, it}));
    const std::size_t n = 1 + uniform_below(rng, max_n);
    std::vector<double> v(n);
    for (auto& x : v) x = uniform01(rng) < 0.5 ? uniform(rng, 0.0, 10.0) : static_cast<double>(uniform_below(rng, 11));
    const auto x = NumericVector::from_values(v, 10.0);
    const PercentileQuery q{static_cast<int>(1 + uniform_below(rng, 100))};
    const auto model = percentile_dataset_model(x, q, grid);
    for (std::size_t t = 0; t <= max_t; ++t) {
      const auto ls = brute_element_ls(model, x.values(), t);
      for (std::size_t rank = 1; rank <= n; ++rank) {
        ++res.cases;
        const double exact = ls_t_percentile(x, q, t, rank);
        const double oracle = ls[rank - 1];
        res.worst = std::max(res.worst, std::fabs(exact - oracle));
        if (std::fabs(exact - oracle) > 1e-9) {
          std::ostringstream os;
          os << "p=" << q.p << " x=" << join(v) << " t=" << t << " rank " << rank << ": " << exact << " vs oracle "
             << oracle;
          res.fail(os.str());
        }
      }
    }
  }
  return res;
}

PropertyResult ig_ls_matches_oracle(std::uint64_t seed, std::size_t tables, std::size_t max_tau, std::size_t max_t) {
  PropertyResult res;
  for (std::size_t it = 0; it < tables; ++it) {
    Rng rng(mix_seed({seed, 0x16u, it}));
    const std::size_t values = 1 + uniform_below(rng, 3);
    const std::size_t classes = 2 + uniform_below(rng, 2);
    const std::size_t tau = uniform_below(rng, max_tau + 1);
    Contingency counts(values * classes, 0);
    for (std::size_t r = 0; r < tau; ++r) ++counts[uniform_below(rng, counts.size())];
    const auto model = ig_dataset_model(values, classes, kTableRowsCap);
    std::vector<double> cd(counts.begin(), counts.end());
    for (std::size_t t = 0; t <= max_t; ++t) {
      ++res.cases;
      const double oracle = brute_element_ls(model, counts, t)[0];
      const double exact = t == 0 ? ls0_ig(counts, classes) : ls_t_ig(counts, classes, t);
      res.worst = std::max(res.worst, std::fabs(exact - oracle));
      if (std::fabs(exact - oracle) > 1e-9) {
        std::ostringstream os;
        os << "counts=" << join(cd) << " classes=" << classes << " t=" << t << ": " << exact << " vs oracle " << oracle;
        res.fail(os.str());
      }
      if (t == 0 && ls0_ig(counts, classes) > global_sensitivity_ig(tau) + 1e-12) {
        res.fail("counts=" + join(cd) + ": LS0 exceeds the global sensitivity");
      }
    }
  }
  return res;
}

PropertyResult ebc_matches_oracle(std::uint64_t seed, std::size_t graphs, std::size_t max_nodes) {
  PropertyResult res;
  for (std::size_t it = 0; it < graphs; ++it) {
    Rng rng(mix_seed({seed, 0xebcu, it}));
    const EdgeGraph g = random_graph(2 + uniform_below(rng, max_nodes - 1), uniform(rng, 0.1, 0.9), rng);
    const auto all = ebc_all(g);
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      ++res.cases;
      const double oracle = ebc_oracle(g, v);
      res.worst = std::max(res.worst, std::fabs(all[v] - oracle));
      if (std::fabs(all[v] - oracle) > 1e-9) {
        std::ostringstream os;
        os << "graph " << g.adjacency_key() << " node " << v << ": " << all[v] << " vs oracle " << oracle;
        res.fail(os.str());
      }
    }
  }
  return res;
}

PropertyResult ebc_admissible(std::uint64_t seed, std::size_t graphs, std::size_t max_nodes, std::size_t max_t) {
  PropertyResult res;
  const auto delta = ebc_sensitivity_model();
  for (std::size_t it = 0; it < graphs; ++it) {
    Rng rng(mix_seed({seed, 0xad3u, it}));
    const EdgeGraph g = random_graph(2 + uniform_below(rng, max_nodes - 1), uniform(rng, 0.2, 0.8), rng);
    const auto report = check_admissibility(delta, ebc_dataset_model(g), g, max_t);
    res.cases += report.comparisons;
    if (!report.pass) res.fail("graph " + g.adjacency_key() + ": " + describe(*report.witness));
  }
  return res;
}

PropertyResult kernels_agree(std::uint64_t seed, std::size_t cases) {
  PropertyResult res;
  for (std::size_t it = 0; it < cases; ++it) {
    Rng rng(mix_seed({seed, 0x5du, it}));
    const std::size_t n = uniform_below(rng, 70);
    const double spread = std::exp(uniform(rng, 0.0, 7.0));
    std::vector<double> logits(n);
    for (auto& l : logits) l = uniform(rng, -spread, spread);
    std::vector<double> ref(n), got(n);
    kernels::scalar::softmax(logits, ref);
    kernels::softmax(logits, got);
    for (std::size_t i = 0; i < n; ++i) {
      ++res.cases;
      const double diff = std::fabs(ref[i] - got[i]);
      res.worst = std::max(res.worst, diff);
      if (diff > 1e-12) res.fail("softmax case " + std::to_string(it) + " index " + std::to_string(i));
    }
    const std::size_t words = uniform_below(rng, 40);
    std::vector<std::uint64_t> a(words), b(words);
    for (std::size_t w = 0; w < words; ++w) {
      a[w] = rng();
      b[w] = rng();
    }
    ++res.cases;
    if (kernels::scalar::and_popcount(a.data(), b.data(), words) != kernels::and_popcount(a.data(), b.data(), words)) {
      res.fail("and_popcount case " + std::to_string(it));
    }
  }
  return res;
}

Contingency ig_worst_case(std::size_t rows) {
  Contingency counts(4, 0);
  counts[0] = rows;  // value 0, class 0; class 1 is declared but empty
  return counts;
}

SensitivityFunction beta_sensitivity(const SelectionProblem& problem, double beta) {
  SensitivityFunction f;
  f.eval = [u = problem.utility, beta](std::size_t t, std::size_t r) { return u[r] * static_cast<double>(t) / beta; };
  f.declared_admissible = true;
  f.monotonicity = Monotonicity::non_decreasing;
  return bound_sensitivity(f, problem.global_sensitivity, problem.database_size);
}

DominanceStudy dominance_accuracy_study(GapOrientation orientation, std::uint64_t seed, std::size_t synthetic) {
  DominanceStudy study;
  PropertyResult& res = study.result;
  auto check_pair = [&](const SensitivityFunction& a, const SensitivityFunction& b, const SelectionProblem& problem,
                        double eps, const std::string& label) {
    try {
      const auto rep = accuracy_order_check(a, b, problem, eps, orientation);
      ++res.cases;
      res.worst = std::max(res.worst, rep.error_a - rep.error_b);
      if (!rep.pass) {
        std::ostringstream os;
        os << label << ": dominating error " << rep.error_a << " > dominated error " << rep.error_b;
        res.fail(os.str());
      }
    } catch (const ContractViolation&) {
      // Not a dominating pair under this orientation.
    }
  };

  const auto beta_problem = SelectionProblem::from_utilities({10.0, 20.0, 30.0}, 100.0, 50);
  const std::vector<double> betas{1, 2, 5, 10, 20, 50, 100, 1000};
  for (double beta : betas) {
    const auto dist = shifted_local_dampening_distribution(beta_problem, beta_sensitivity(beta_problem, beta), 1.0);
    study.beta_errors.push_back({beta, expected_error(dist, beta_problem)});
  }
  for (double b1 : betas) {
    for (double b2 : betas) {
      if (b1 == b2) continue;
      std::ostringstream os;
      os << "beta " << b1 << " vs beta " << b2;
      check_pair(beta_sensitivity(beta_problem, b1), beta_sensitivity(beta_problem, b2), beta_problem, 1.0, os.str());
    }
  }

  for (std::size_t it = 0; it < synthetic; ++it) {
    Rng rng(mix_seed({seed, 0xd0u, it}));
    const std::size_t m = 2 + uniform_below(rng, 7);
    std::vector<double> u(m);
    for (auto& x : u) x = uniform(rng, 0.0, 40.0);
    const double du = uniform(rng, 5.0, 50.0);
    const std::size_t n = 2 + uniform_below(rng, 20);
    const auto problem = SelectionProblem::from_utilities(u, du, n);
    // Slopes sorted with utility make the function nondecreasing in u.
    std::vector<double> slope(m);
    for (auto& s : slope) s = uniform(rng, 0.01, du);
    std::sort(slope.begin(), slope.end());
    std::vector<double> slope_of(m);
    const auto order = utility_order(problem);
    for (std::size_t j = 0; j < m; ++j) slope_of[order[m - 1 - j]] = slope[j];
    SensitivityFunction a;
    a.eval = [slope_of](std::size_t t, std::size_t r) { return slope_of[r] * static_cast<double>(t + 1); };
    a.declared_admissible = true;
    a.monotonicity = Monotonicity::non_decreasing;
    a = bound_sensitivity(a, du, n);
    auto b = SensitivityFunction::constant(du, true, true);
    b.monotonicity = Monotonicity::flat;
    for (double eps : {0.5, 1.0, 2.0}) {
      check_pair(a, b, problem, eps, "synthetic case " + std::to_string(it) + " eps " + std::to_string(eps));
    }
  }
  return study;
}

NumericVector concentrated_vector(std::size_t n, double lambda) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 0.5 * lambda + static_cast<double>(i) * lambda * 1e-3;
  return NumericVector::from_values(v, lambda);
}

EdgeGraph sparse_graph(std::size_t nodes, std::size_t degree, std::uint64_t seed) {
  Rng rng(mix_seed({seed, 0x59u}));
  EdgeGraph g;
  for (std::size_t v = 0; v < nodes; ++v) g.add_node("n" + std::to_string(v));
  const double p = static_cast<double>(degree) / static_cast<double>(nodes - 1);
  for (std::size_t u = 0; u < nodes; ++u) {
    for (std::size_t v = u + 1; v < nodes; ++v) {
      if (uniform01(rng) < p) g.add_edge(u, v);
    }
  }
  g.set_max_degree_bound(nodes - 1);
  return g;
}

std::vector<TrendRow> trend_study(const std::vector<double>& epsilons, std::size_t pf_runs, std::uint64_t seed) {
  std::vector<TrendRow> rows;
  const NumericVector x = concentrated_vector(41, 1000.0);
  const PercentileQuery q{50};
  const auto pproblem = percentile_problem(x, q);
  const auto pdelta = percentile_sensitivity(x, q);
  const auto pflat = bound_sensitivity(flatten_sensitivity(pdelta, pproblem), pproblem.global_sensitivity,
                                       pproblem.database_size);
  const EdgeGraph g = sparse_graph(60, 4, seed);
  const auto gproblem = ebc_problem(g);

  for (double eps : epsilons) {
    TrendRow p{"concentrated-percentile", eps};
    p.em = expected_error(exponential_distribution(pproblem, eps), pproblem);
    p.ld = expected_error(local_dampening_distribution(pproblem, pflat, eps), pproblem);
    p.sld = expected_error(shifted_local_dampening_distribution(pproblem, pdelta, eps), pproblem);
    Rng prng(mix_seed({seed, 0x9f1u, hash_label("percentile"), static_cast<std::uint64_t>(eps * 1e6)}));
    const auto pest = permute_and_flip_error(pproblem, eps, pf_runs, prng);
    p.pf_mean = pest.mean;
    p.pf_stderr = pest.standard_error;
    rows.push_back(p);

    TrendRow e{"sparse-graph-ebc", eps};
    e.em = expected_error(ebc_pick_distribution(g, eps, Mechanism::em), gproblem);
    e.ld = expected_error(ebc_pick_distribution(g, eps, Mechanism::ld), gproblem);
    e.sld = expected_error(ebc_pick_distribution(g, eps, Mechanism::sld), gproblem);
    Rng grng(mix_seed({seed, 0x9f1u, hash_label("graph"), static_cast<std::uint64_t>(eps * 1e6)}));
    const auto gest = permute_and_flip_error(gproblem, eps, pf_runs, grng);
    e.pf_mean = gest.mean;
    e.pf_stderr = gest.standard_error;
    rows.push_back(e);
  }
  return rows;
}

LabeledTable separable_toy_table(std::size_t rows, std::uint64_t seed) {
  LabeledTable table;
  for (std::size_t a = 0; a < 6; ++a) table.attributes.push_back({"a" + std::to_string(a), AttributeSpec::Kind::categorical, {"0", "1"}});
  table.attributes.push_back({"class", AttributeSpec::Kind::categorical, {"no", "yes"}});
  table.class_index = 6;
  Rng rng(mix_seed({seed, 0x7au}));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> row(7);
    for (std::size_t a = 0; a < 6; ++a) row[a] = static_cast<double>(uniform_below(rng, 2));
    const bool label = row[0] == 1.0 || (row[1] == 1.0 && row[2] == 1.0);
    row[6] = label ? 1.0 : 0.0;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<TreeRun> tree_reproduction(const LabeledTable& table, double epsilon, const std::vector<std::size_t>& depths,
                                       std::uint64_t seed) {
  std::vector<TreeRun> runs;
  for (std::size_t depth : depths) {
    for (TreeVariant variant : {TreeVariant::global, TreeVariant::local, TreeVariant::shifted}) {
      TreeParams params;
      params.depth = depth;
      params.epsilon = epsilon;
      params.variant = variant;
      Rng rng(mix_seed({seed, depth, hash_label(to_string(variant))}));
      BudgetAccountant accountant;
      const DecisionTree tree = build_diffp_id3(table, params, rng, accountant);
      const TreeComparison cmp = compare_with_id3(tree, table, depth);
      runs.push_back({depth, variant, cmp.equivalent, cmp.difference, accountant.total()});
    }
  }
  return runs;
}

EdgeGraph example_graph_usual() {
  return EdgeGraph::from_edges({{"a", "b"},
                                {"a", "v_0"},
                                {"a", "v_1"},
                                {"a", "v_2"},
                                {"a", "v_3"},
                                {"b", "v_2"},
                                {"b", "v_3"},
                                {"b", "v_4"},
                                {"b", "v_5"},
                                {"v_0", "v_1"},
                                {"v_4", "v_5"}},
                               {"a", "b", "v_0", "v_1", "v_2", "v_3", "v_4", "v_5"});
}

EdgeGraph example_graph_worst() {
  std::vector<std::pair<std::string, std::string>> edges{{"a", "b"}};
  for (int i = 0; i < 6; ++i) {
    const std::string v = "v_" + std::to_string(i);
    edges.emplace_back("a", v);
    edges.emplace_back("b", v);
  }
  return EdgeGraph::from_edges(edges, {"a", "b", "v_0", "v_1", "v_2", "v_3", "v_4", "v_5"});
}

}  // namespace dampen
