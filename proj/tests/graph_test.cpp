#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/graph.hpp"
#include "dampen/properties.hpp"

using namespace dampen;

TEST_SUITE("graph") {
  TEST_CASE("edge bookkeeping") {
    EdgeGraph g({"a", "b", "c"});
    CHECK(g.add_edge(0, 1));
    CHECK_FALSE(g.add_edge(1, 0));
    CHECK_FALSE(g.add_edge(2, 2));
    CHECK(g.edge_count() == 1);
    g.flip_edge(1, 2);
    CHECK(g.has_edge(2, 1));
    CHECK(g.remove_edge(0, 1));
    CHECK(g.edge_count() == 1);
    CHECK(g.adjacency_key() == "001");
    CHECK_THROWS(g.index_of("zz"));
  }

  TEST_CASE("egocentric betweenness on small shapes") {
    const auto triangle = EdgeGraph::from_edges({{"a", "b"}, {"b", "c"}, {"a", "c"}});
    CHECK(ebc(triangle, 0) == 0.0);
    const auto path = EdgeGraph::from_edges({{"a", "c"}, {"c", "b"}});
    CHECK(ebc(path, path.index_of("c")) == 1.0);
    const auto star = EdgeGraph::from_edges({{"c", "a"}, {"c", "b"}, {"c", "d"}});
    CHECK(ebc(star, star.index_of("c")) == 3.0);
    // Two neighbours joined through another neighbour split the pair's credit.
    const auto square = EdgeGraph::from_edges({{"c", "a"}, {"c", "b"}, {"a", "d"}, {"d", "b"}});
    CHECK(ebc(square, square.index_of("c")) == 1.0);
  }

  TEST_CASE("worked example graphs") {
    EdgeGraph worst = example_graph_worst();
    const auto a = worst.index_of("a");
    CHECK(ebc(worst, a) == doctest::Approx(7.5));
    worst.remove_edge(a, worst.index_of("b"));
    CHECK(ebc(worst, a) == doctest::Approx(15.0));
    CHECK(ebc(example_graph_usual(), 0) == doctest::Approx(6.5));
  }

  TEST_CASE("closed form agrees with geodesic counting") { CHECK(ebc_matches_oracle(5, 30, 9).pass); }

  TEST_CASE("sensitivity formulas") {
    CHECK(global_sensitivity_ebc(2) == doctest::Approx(2.0));
    CHECK(global_sensitivity_ebc(6) == doctest::Approx(7.5));
    CHECK(delta_ebc(0, 0) == 0.0);
    CHECK(delta_ebc(5, 0) == doctest::Approx(5.0));
    CHECK(delta_ebc(5, 2) == doctest::Approx(10.5));
    const EdgeGraph g = example_graph_usual();
    CHECK(edge_database_size(g) == 28);
  }

  TEST_CASE("delta EBC bounds the exact element local sensitivity") {
    const EdgeGraph g = example_graph_usual();
    const auto model = ebc_dataset_model(g);
    const auto delta = ebc_sensitivity_model();
    for (std::size_t t = 0; t <= 1; ++t) {
      const auto ls = brute_element_ls(model, g, t);
      for (std::size_t v = 0; v < g.node_count(); ++v) CHECK(delta.eval(g, t, v) >= ls[v] - 1e-9);
    }
  }

  TEST_CASE("loader keeps comments out and counts anomalies") {
    std::istringstream in("# header\na b\nb a\n\nc c\nb c\n");
    const auto rep = load_edge_list(in);
    CHECK(rep.graph.node_count() == 3);
    CHECK(rep.edges_kept == 2);
    CHECK(rep.duplicate_edges == 1);
    CHECK(rep.self_loops == 1);
    std::istringstream bad("a b c\n");
    CHECK_THROWS_AS(load_edge_list(bad), ParseError);
  }
}

TEST_SUITE("top-k") {
  TEST_CASE("selecting every node yields a permutation") {
    const EdgeGraph g = example_graph_usual();
    Rng rng(3);
    BudgetAccountant acc;
    const auto res = priv_topk(g, 1.0, g.node_count(), Mechanism::ld, rng, acc);
    auto chosen = res.chosen;
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i = 0; i < chosen.size(); ++i) CHECK(chosen[i] == i);
    CHECK(acc.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.per_iteration_epsilon == doctest::Approx(1.0 / 8));
  }

  TEST_CASE("large budgets recover the leaders") {
    const EdgeGraph g = example_graph_usual();
    for (Mechanism m : {Mechanism::em, Mechanism::ld, Mechanism::sld}) {
      Rng rng(9);
      BudgetAccountant acc;
      auto chosen = priv_topk(g, 1e4, 2, m, rng, acc).chosen;
      std::sort(chosen.begin(), chosen.end());
      CHECK(chosen == std::vector<std::size_t>{g.index_of("a"), g.index_of("b")});
    }
  }

  TEST_CASE("accuracy is the overlap fraction") {
    CHECK(topk_accuracy({1, 2}, {2, 1}) == 1.0);
    CHECK(topk_accuracy({3, 4}, {1, 2}) == 0.0);
    CHECK(topk_accuracy({1, 4}, {1, 2}) == 0.5);
  }

  TEST_CASE("exact pick distributions on the example graph") {
    const EdgeGraph g = example_graph_usual();
    const auto em = ebc_pick_distribution(g, 2.0, Mechanism::em, 7.5).probabilities();
    CHECK(em[g.index_of("a")] == doctest::Approx(0.22).epsilon(0.03));
    CHECK(em[g.index_of("v_4")] == doctest::Approx(0.09).epsilon(0.06));
    const auto ld = ebc_pick_distribution(g, 2.0, Mechanism::ld, 7.5).probabilities();
    CHECK(ld[g.index_of("a")] > em[g.index_of("a")]);
    CHECK_THROWS_AS(ebc_pick_distribution(g, 2.0, Mechanism::pf), InvalidInput);
  }

  TEST_CASE("true ranking breaks ties by index") {
    const EdgeGraph g = example_graph_usual();
    const auto top = true_topk(g, 2);
    CHECK(top == std::vector<std::size_t>{g.index_of("a"), g.index_of("b")});
  }
}
