#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/properties.hpp"
#include "dampen/tree.hpp"

using namespace dampen;

namespace {

const char* kSchema = R"({"class": "label",
  "attributes": {"colour": {"categorical": ["red", "blue"]},
                 "size": {"continuous": {"min": 0, "max": 1, "bins": 2}},
                 "label": {"categorical": ["no", "yes"]}}})";

TableSchema schema() {
  std::istringstream in(kSchema);
  return parse_schema(in);
}

}  // namespace

TEST_SUITE("information gain") {
  TEST_CASE("utility is nonpositive and vanishes on pure splits") {
    CHECK(ig_utility(Contingency{1, 1, 2, 0}, 2) == doctest::Approx(-2.0));
    CHECK(ig_utility(Contingency{3, 0, 0, 5}, 2) == 0.0);
    CHECK(ig_utility(Contingency{0, 0, 0, 0}, 2) == 0.0);
    CHECK_THROWS_AS(ig_utility(Contingency{1, 2, 3}, 2), InvalidInput);
  }

  TEST_CASE("global sensitivity") {
    CHECK(global_sensitivity_ig(0) == doctest::Approx(1.4427).epsilon(1e-4));
    CHECK(global_sensitivity_ig(3) == doctest::Approx(3.4427).epsilon(1e-4));
  }

  TEST_CASE("helper functions") {
    CHECK(ig_f(0) == 0.0);
    CHECK(ig_f(1) == doctest::Approx(2.0));
    CHECK(ig_g(1) == 0.0);
    CHECK(ig_g(2) == doctest::Approx(-2.0));
  }

  TEST_CASE("local sensitivity at distance zero") {
    CHECK(ls0_ig(Contingency{0, 1}, 2) == doctest::Approx(2.0));
    CHECK(ls0_ig(ig_worst_case(50), 2) <= global_sensitivity_ig(50));
  }

  TEST_CASE("candidate expansion under the table-size guard") {
    CHECK(candidates_ig(3, 1, 3, 0) == IgCandidateCache::Pairs{{3, 1}});
    const auto removal = candidates_ig(3, 1, 3, 1);
    CHECK(removal.count({2, 0}) == 1);
    CHECK(removal.count({4, 1}) == 0);
    const auto addition = candidates_ig(1, 0, 4, 1);
    CHECK(addition.count({2, 0}) == 1);
    CHECK(addition.count({0, -1}) == 0);
  }

  TEST_CASE("cached and uncached candidates agree") {
    IgCandidateCache cache;
    for (long a = 0; a <= 4; ++a) {
      for (long b = 0; b <= a; ++b) {
        for (std::size_t t = 0; t <= 3; ++t) {
          CHECK(candidates_ig(a, b, 6, t, IgGuard::table_size, &cache) == candidates_ig(a, b, 6, t));
        }
      }
    }
    const std::size_t before = cache.hits();
    candidates_ig(2, 1, 6, 3, IgGuard::table_size, &cache);
    CHECK(cache.hits() > before);
  }

  TEST_CASE("exact local sensitivity matches the oracle") { CHECK(ig_ls_matches_oracle(4, 40, 5, 2).pass); }

  // The guarded candidate search misses reachable tables that the
  // exhaustive oracle finds.
  TEST_CASE("guarded candidate search disagrees with the oracle somewhere") {
    bool mismatch = false;
    for (std::size_t rows = 1; rows <= 5 && !mismatch; ++rows) {
      for (std::size_t a = 0; a <= rows && !mismatch; ++a) {
        const Contingency counts{a, rows - a};
        const auto model = ig_dataset_model(1, 2, 64);
        for (std::size_t t = 1; t <= 3; ++t) {
          const double oracle = brute_element_ls(model, counts, t, 0);
          if (std::fabs(ls_t_ig_candidates(counts, 2, t, IgGuard::table_size) - oracle) > 1e-9) mismatch = true;
          CHECK(ls_t_ig(counts, 2, t) == doctest::Approx(oracle));
        }
      }
    }
    CHECK(mismatch);
  }

  TEST_CASE("worst-case table does not attain the global sensitivity") {
    const double ls = ls0_ig(ig_worst_case(200), 2);
    CHECK(ls == doctest::Approx(9.09015).epsilon(1e-5));
    CHECK(global_sensitivity_ig(200) - ls > 1e-3);
  }

  TEST_CASE("marginals of a joint count vector") {
    // arities {2, 2}, two classes: index = ((a0 * 2) + a1) * 2 + class
    Contingency joint(8, 0);
    joint[0] = 1;  // (0,0,no)
    joint[7] = 2;  // (1,1,yes)
    const auto m = marginal_contingencies(joint, {2, 2}, 2);
    REQUIRE(m.size() == 2);
    CHECK(m[0] == Contingency{1, 0, 0, 2});
    CHECK(m[1] == Contingency{1, 0, 0, 2});
  }

  TEST_CASE("noisy counts have Laplace variance") {
    Rng rng(5);
    const double eps = 0.5;
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double v = noisy_count(10, eps, rng) - 10.0;
      sum += v;
      sq += v * v;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(2.0 / (eps * eps)).epsilon(0.03));
    CHECK_THROWS_AS(noisy_count(1, 0.0, rng), InvalidInput);
  }
}

TEST_SUITE("tables") {
  TEST_CASE("schema and csv loading") {
    std::istringstream csv("colour,size,label\nred,0.2,no\n\nblue,0.9,yes\n");
    IngestionReport rep;
    const auto t = load_table_csv(csv, schema(), &rep);
    CHECK(t.size() == 2);
    CHECK(rep.rows_kept == 2);
    CHECK(rep.rows_dropped == 1);
    CHECK(t.attributes[t.class_index].name == "label");
    CHECK(t.code(1, 0) == 1);
    CHECK(t.feature_indices() == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("domain errors name the offending value") {
    std::istringstream csv("colour,size,label\ngreen,0.2,no\n");
    try {
      load_table_csv(csv, schema());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("'green'") != std::string::npos);
      CHECK(e.line == 2);
    }
    std::istringstream range("colour,size,label\nred,1.5,no\n");
    CHECK_THROWS_AS(load_table_csv(range, schema()), ParseError);
    std::istringstream unknown("colour,weight,label\n");
    CHECK_THROWS_AS(load_table_csv(unknown, schema()), ParseError);
    std::istringstream bad_schema(R"({"class": "x", "attributes": {}})");
    CHECK_THROWS_AS(parse_schema(bad_schema), ParseError);
  }

  TEST_CASE("discretisation uses right-closed bins over the declared range") {
    std::istringstream csv("colour,size,label\nred,0,no\nred,0.5,no\nred,1,yes\n");
    const auto t = discretize(load_table_csv(csv, schema()));
    CHECK(t.code(0, 1) == 0);
    CHECK(t.code(1, 1) == 0);
    CHECK(t.code(2, 1) == 1);
    CHECK(t.arity(1) == 2);

    std::istringstream grid("colour,size,label\nred,0.25,no\nred,0.26,no\nred,0.75,no\nred,0.8,yes\n");
    const auto g = discretize(load_table_csv(grid, schema()), 1, 4);
    CHECK(g.code(0, 1) == 0);
    CHECK(g.code(1, 1) == 1);
    CHECK(g.code(2, 1) == 2);
    CHECK(g.code(3, 1) == 3);
  }

  TEST_CASE("a degenerate range maps to a single bin") {
    LabeledTable t;
    t.attributes = {{"v", AttributeSpec::Kind::continuous, {}, 2.0, 2.0, 3}, {"c", AttributeSpec::Kind::categorical, {"a", "b"}}};
    t.class_index = 1;
    t.rows = {{2.0, 0}, {2.0, 1}};
    const auto d = discretize(t);
    CHECK(d.code(0, 0) == 0);
    CHECK(d.code(1, 0) == 0);
  }
}

TEST_SUITE("id3") {
  TEST_CASE("depth zero is a single leaf") {
    const auto table = separable_toy_table(50, 1);
    Rng rng(1);
    BudgetAccountant acc;
    const auto tree = build_diffp_id3(table, {0, 1.0, TreeVariant::global, "tree"}, rng, acc);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].leaf);
  }

  TEST_CASE("budget totals epsilon for every variant") {
    const auto table = separable_toy_table(120, 2);
    for (TreeVariant v : {TreeVariant::global, TreeVariant::local, TreeVariant::shifted}) {
      Rng rng(2);
      BudgetAccountant acc;
      const auto tree = build_diffp_id3(table, {2, 1.0, v, "tree"}, rng, acc);
      CHECK(tree.depth() <= 2);
      CHECK(acc.total() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("exact ID3 fits the separable table") {
    const auto table = separable_toy_table(200, 4);
    const auto tree = build_id3(table, 5);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < table.size(); ++r) correct += tree.classify(table, r) == table.code(r, table.class_index);
    CHECK(correct == table.size());
  }

  TEST_CASE("cross validation") {
    const auto table = separable_toy_table(200, 4);
    const TreeParams params{5, 1e6, TreeVariant::local, "tree"};
    const auto a = cross_validate(table, params, 5, 11);
    const auto b = cross_validate(table, params, 5, 11);
    CHECK(a.mean_accuracy == b.mean_accuracy);
    CHECK(a.fold_accuracy.size() == 5);
    CHECK(a.mean_accuracy == doctest::Approx(1.0));
    CHECK_THROWS_AS(cross_validate(table, params, 1, 11), InvalidInput);
  }

  TEST_CASE("a constant class labels every training row") {
    auto table = separable_toy_table(40, 5);
    for (auto& row : table.rows) row[table.class_index] = 1;
    Rng rng(8);
    BudgetAccountant acc;
    const auto tree = build_diffp_id3(table, {3, 1e6, TreeVariant::shifted, "tree"}, rng, acc);
    for (std::size_t r = 0; r < table.size(); ++r) CHECK(tree.classify(table, r) == 1);
  }

  TEST_CASE("variant names") {
    CHECK(parse_tree_variant("shifted") == TreeVariant::shifted);
    CHECK(to_string(TreeVariant::local) == "local");
    CHECK_THROWS_AS(parse_tree_variant("best"), InvalidInput);
  }
}
