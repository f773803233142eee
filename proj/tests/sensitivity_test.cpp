#include <doctest.h>

#include <string>
#include <vector>

#include "dampen/error.hpp"
#include "dampen/graph.hpp"
#include "dampen/properties.hpp"
#include "dampen/sensitivity.hpp"

using namespace dampen;

namespace {

// Integers 0..limit with unit steps; utilities are (x, 2x, 5).
DatasetModel<int> line_model(int limit) {
  DatasetModel<int> m;
  m.utilities = [](const int& x) { return std::vector<double>{double(x), 2.0 * x, 5.0}; };
  m.neighbors = [limit](const int& x, const std::function<void(const int&)>& visit) {
    if (x > 0) visit(x - 1);
    if (x < limit) visit(x + 1);
  };
  m.key = [](const int& x) { return std::to_string(x); };
  m.global_sensitivity = 2.0;
  m.database_size = 10;
  return m;
}

SensitivityFunction column(std::vector<double> values, Monotonicity mono = Monotonicity::none) {
  SensitivityFunction f;
  f.eval = [v = std::move(values)](std::size_t t, std::size_t r) { return v[r] * double(t + 1); };
  f.declared_admissible = true;
  f.monotonicity = mono;
  return f;
}

}  // namespace

TEST_SUITE("brute force") {
  TEST_CASE("ball grows by one step per distance") {
    const auto m = line_model(10);
    CHECK(ball(m, 5, 0).size() == 1);
    CHECK(ball(m, 5, 2).size() == 5);
    CHECK(ball(m, 0, 3).size() == 4);
  }

  TEST_CASE("element local sensitivity tracks each utility's slope") {
    const auto m = line_model(10);
    const auto ls = brute_element_ls(m, 4, 1);
    CHECK(ls == std::vector<double>{1.0, 2.0, 0.0});
    CHECK(brute_element_ls(m, 4, 0, 1) == 2.0);
    CHECK_THROWS_AS(brute_element_ls(m, 4, 0, 3), InvalidInput);
  }

  TEST_CASE("search budget is enforced") {
    const auto m = line_model(1000);
    CHECK_THROWS_AS(ball(m, 500, 50, SearchBudget{10}), ResourceExhausted);
    CHECK_THROWS_AS(brute_element_ls(m, 500, 10, SearchBudget{15}), ResourceExhausted);
  }

  TEST_CASE("memoised model agrees with direct search") {
    const auto m = line_model(10);
    const auto model = brute_ls_model(m);
    for (std::size_t t = 0; t < 4; ++t) {
      const auto direct = brute_element_ls(m, 0, t);
      for (std::size_t r = 0; r < 3; ++r) CHECK(model.eval(0, t, r) == direct[r]);
    }
  }
}

TEST_SUITE("transforms") {
  TEST_CASE("bounding caps at the global sensitivity and saturates at n") {
    const auto f = bound_sensitivity(column({1.0, 3.0}), 5.0, 4);
    CHECK(f(0, 0) == 1.0);
    CHECK(f(1, 1) == 5.0);
    CHECK(f(3, 0) == 4.0);
    CHECK(f(4, 0) == 5.0);
    CHECK(f(100, 0) == 5.0);
    CHECK(f.declared_bounded);
  }

  TEST_CASE("flattening takes the column maximum") {
    const auto p = SelectionProblem::from_utilities({1, 2, 3}, 10, 5);
    const auto flat = flatten_sensitivity(column({1.0, 4.0, 2.0}), p);
    CHECK(flat(0, 0) == 4.0);
    CHECK(flat(2, 2) == 12.0);
    CHECK(flat.monotonicity == Monotonicity::flat);
  }
}

TEST_SUITE("admissibility") {
  TEST_CASE("global sensitivity passes, zero fails at distance zero") {
    const EdgeGraph g = example_graph_usual();
    const auto model = ebc_dataset_model(g);
    SensitivityModel<EdgeGraph> du;
    du.eval = [gs = model.global_sensitivity](const EdgeGraph&, std::size_t, std::size_t) { return gs; };
    du.declared_admissible = true;
    CHECK(check_admissibility(du, model, g, 1, {}, false).pass);

    SensitivityModel<EdgeGraph> zero;
    zero.eval = [](const EdgeGraph&, std::size_t, std::size_t) { return 0.0; };
    const auto rep = check_admissibility(zero, model, g, 1);
    REQUIRE_FALSE(rep.pass);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->t == 0);
    CHECK(rep.witness->condition == "delta(x,0,r) >= LS(x,0,r)");
    CHECK(rep.witness->required > 0.0);
  }

  TEST_CASE("a function that does not grow with distance breaks the step condition") {
    const auto m = line_model(10);
    SensitivityModel<int> ls0;
    ls0.eval = [](const int& x, std::size_t, std::size_t r) { return r == 2 ? 0.0 : (r == 0 ? 1.0 : 2.0) + x * 0.0; };
    CHECK(check_admissibility(ls0, m, 3, 2).pass);

    SensitivityModel<int> shrinking;
    shrinking.eval = [](const int& x, std::size_t t, std::size_t) { return t == 0 ? 2.0 + x : 2.0; };
    const auto rep = check_admissibility(shrinking, m, 3, 2);
    REQUIRE_FALSE(rep.pass);
    CHECK(rep.witness->condition.find("t+1") != std::string::npos);
  }

  TEST_CASE("exact element local sensitivity is admissible on tiny graphs") {
    CHECK(ebc_admissible(3, 5, 5, 1).pass);
  }
}

TEST_SUITE("monotonicity") {
  TEST_CASE("spearman on ranks") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{10, 20, 30, 40};
    const std::vector<double> c{4, 3, 2, 1};
    CHECK(spearman_correlation(a, b) == doctest::Approx(1.0));
    CHECK(spearman_correlation(a, c) == doctest::Approx(-1.0));
  }

  TEST_CASE("classification follows the utility order") {
    const auto p = SelectionProblem::from_utilities({1, 5, 3}, 10, 5);
    const std::vector<std::size_t> ts{0, 1, 2};
    CHECK(check_monotonicity(column({1, 5, 3}), p, ts).classification == Monotonicity::non_decreasing);
    CHECK(check_monotonicity(column({5, 1, 3}), p, ts).classification == Monotonicity::non_increasing);
    CHECK(check_monotonicity(column({2, 2, 2}), p, ts).classification == Monotonicity::flat);
    CHECK(check_monotonicity(column({2, 1, 3}), p, ts).classification == Monotonicity::none);
    CHECK(check_monotonicity(column({1, 5, 3}), p, ts).spearman == doctest::Approx(1.0));
  }
}

TEST_SUITE("dominance") {
  TEST_CASE("a function dominates itself") {
    const auto p = SelectionProblem::from_utilities({10, 20, 30}, 100, 50);
    const auto f = beta_sensitivity(p, 10);
    const auto ts = default_dominance_ts(p);
    CHECK(check_dominance(f, f, p, ts).dominates);
  }

  TEST_CASE("utility order is descending") {
    const auto p = SelectionProblem::from_utilities({3, 9, 1}, 1, 1);
    CHECK(utility_order(p) == std::vector<std::size_t>{1, 0, 2});
  }

  TEST_CASE("element local sensitivity dominates the constant global sensitivity") {
    const EdgeGraph g = example_graph_usual();
    const auto problem = ebc_problem(g, {}, 7.5);
    const auto model = ebc_dataset_model(g);
    const auto ls = bound_sensitivity(brute_ls_model(model), 7.5, problem.database_size).at(g);
    auto du = SensitivityFunction::constant(7.5, true, true);
    const std::vector<std::size_t> ts{0, 1, 2};
    CHECK(check_dominance(ls, du, problem, ts).dominates);
    CHECK_FALSE(check_dominance(du, ls, problem, ts).dominates);
  }

  TEST_CASE("non-dominating pairs are refused by the accuracy check") {
    const auto p = SelectionProblem::from_utilities({10, 20, 30}, 100, 50);
    auto du = SensitivityFunction::constant(100, true, true);
    du.monotonicity = Monotonicity::flat;
    CHECK_THROWS_AS(accuracy_order_check(du, beta_sensitivity(p, 10), p, 1.0), ContractViolation);
  }

  TEST_CASE("dominating pairs under the shift-aware orientation are ordered") {
    const auto study = dominance_accuracy_study(GapOrientation::follow_shift, 1, 30);
    CHECK(study.result.pass);
    CHECK(study.result.cases > 0);
  }

  // Requiring nonincreasing gaps for every pair admits beta = 50 over
  // beta = 20, yet beta = 50 has the larger error.
  TEST_CASE("literal gap orientation admits a misordered beta pair") {
    const auto study = dominance_accuracy_study(GapOrientation::literal, 1, 0);
    CHECK_FALSE(study.result.pass);
    CHECK(study.result.witness.find("beta 50 vs beta 20") != std::string::npos);
  }

  TEST_CASE("beta-family error is not monotone in beta") {
    const auto study = dominance_accuracy_study(GapOrientation::follow_shift, 1, 0);
    const std::vector<double> frozen{5.439, 3.325, 1.066, 0.146, 0.463, 3.209, 5.878, 9.260};
    REQUIRE(study.beta_errors.size() == frozen.size());
    for (std::size_t i = 0; i < frozen.size(); ++i) {
      CHECK(study.beta_errors[i].expected_error == doctest::Approx(frozen[i]).epsilon(1e-3));
    }
  }
}
