#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dampen/error.hpp"
#include "dampen/tree.hpp"

namespace dampen {
namespace {

constexpr double kStopRatio = 0.70710678118654752440;  // sqrt(2) / 2
constexpr double kTieTolerance = 1e-9;

std::size_t max_arity(const LabeledTable& table, const std::vector<std::size_t>& attrs) {
  std::size_t t = 0;
  for (std::size_t a : attrs) t = std::max(t, table.arity(a));
  return t;
}

bool stops(const LabeledTable& table, const std::vector<std::size_t>& attrs, std::size_t depth, double count) {
  if (attrs.empty() || depth == 0) return true;
  const double denom = static_cast<double>(max_arity(table, attrs) * table.class_count());
  return count / denom < kStopRatio;
}

std::vector<std::vector<std::size_t>> partition(const LabeledTable& table, const std::vector<std::size_t>& rows,
                                                std::size_t attribute) {
  std::vector<std::vector<std::size_t>> parts(table.arity(attribute));
  for (std::size_t r : rows) parts[table.code(r, attribute)].push_back(r);
  return parts;
}

std::vector<std::size_t> class_counts(const LabeledTable& table, const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> counts(table.class_count(), 0);
  for (std::size_t r : rows) ++counts[table.code(r, table.class_index)];
  return counts;
}

std::vector<std::size_t> without(std::vector<std::size_t> attrs, std::size_t a) {
  attrs.erase(std::remove(attrs.begin(), attrs.end(), a), attrs.end());
  return attrs;
}

void check_table(const LabeledTable& table) {
  table.validate();
  for (std::size_t a : table.feature_indices()) {
    if (table.attributes[a].kind != AttributeSpec::Kind::categorical) {
      throw InvalidInput("tree: attribute '" + table.attributes[a].name + "' must be discretized first");
    }
  }
}

struct Builder {
  const LabeledTable& table;
  const TreeParams& params;
  BudgetAccountant& accountant;
  double eps = 0.0;
  std::uint64_t base_seed = 0;
  DecisionTree tree;
  std::vector<double> noisy_sizes;

  std::size_t build(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attrs, std::size_t depth,
                    const std::string& scope, const std::string& path) {
    Rng rng(mix_seed({base_seed, hash_label(path)}));
    const std::size_t id = tree.nodes.size();
    tree.nodes.emplace_back();
    noisy_sizes.push_back(0.0);

    const double n_t = noisy_count(rows.size(), eps, rng);
    accountant.account(scope, eps, "count " + path);
    noisy_sizes[id] = n_t;

    if (stops(table, attrs, depth, n_t)) {
      const std::string leaf_scope = scope + "/classes";
      accountant.open_scope(leaf_scope, Composition::parallel, scope);
      const auto counts = class_counts(table, rows);
      std::size_t best = 0;
      double best_count = -INFINITY;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        const double nc = noisy_count(counts[c], eps, rng);
        accountant.account(leaf_scope, eps, "class " + table.attributes[table.class_index].values[c]);
        if (nc > best_count) {
          best_count = nc;
          best = c;
        }
      }
      tree.nodes[id].leaf = true;
      tree.nodes[id].label = best;
      return id;
    }

    const std::size_t chosen = select(rows, attrs, rng);
    accountant.account(scope, eps, "split " + path);
    const std::string split_scope = scope + "/split";
    accountant.open_scope(split_scope, Composition::parallel, scope);

    const auto parts = partition(table, rows, chosen);
    const auto rest = without(attrs, chosen);
    std::vector<std::size_t> children;
    for (std::size_t v = 0; v < parts.size(); ++v) {
      const std::string child_scope = scope + "/" + std::to_string(v);
      accountant.open_scope(child_scope, Composition::sequential, split_scope);
      children.push_back(build(parts[v], rest, depth - 1, child_scope, path + "." + std::to_string(v)));
    }
    tree.nodes[id].leaf = false;
    tree.nodes[id].attribute = chosen;
    tree.nodes[id].children = std::move(children);
    tree.nodes[id].label = fallback_label(id);
    return id;
  }

  // Majority of the leaf labels below, each weighted by its noisy size.
  std::size_t fallback_label(std::size_t id) const {
    std::vector<double> weight(table.class_count(), 0.0);
    std::function<void(std::size_t)> walk = [&](std::size_t n) {
      const auto& node = tree.nodes[n];
      if (node.leaf) {
        weight[node.label] += std::max(noisy_sizes[n], 0.0);
        return;
      }
      for (std::size_t c : node.children) walk(c);
    };
    walk(id);
    return static_cast<std::size_t>(std::max_element(weight.begin(), weight.end()) - weight.begin());
  }

  std::size_t select(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attrs, Rng& rng) const {
    SelectionProblem problem;
    problem.global_sensitivity = global_sensitivity_ig(table.size());
    problem.database_size = std::max<std::size_t>(table.size(), 1);
    std::vector<Contingency> tables;
    for (std::size_t a : attrs) {
      tables.push_back(contingency(table, a, &rows));
      problem.range.push_back(table.attributes[a].name);
      problem.utility.push_back(ig_utility(tables.back(), table.class_count()));
    }
    std::size_t pick = 0;
    switch (params.variant) {
      case TreeVariant::global:
        pick = select_exponential(problem, eps, rng).index;
        break;
      case TreeVariant::local:
        pick = select_local_dampening(problem, ig_sensitivity(tables, table.class_count(), problem.database_size),
                                      eps, rng)
                   .index;
        break;
      case TreeVariant::shifted:
        pick = select_shifted_local_dampening(
                   problem, ig_sensitivity(tables, table.class_count(), problem.database_size), eps, rng)
                   .index;
        break;
    }
    return attrs[pick];
  }
};

}  // namespace

TreeVariant parse_tree_variant(const std::string& name) {
  if (name == "global") return TreeVariant::global;
  if (name == "local") return TreeVariant::local;
  if (name == "shifted") return TreeVariant::shifted;
  throw InvalidInput("unknown tree variant '" + name + "' (expected global, local or shifted)");
}

std::string_view to_string(TreeVariant v) {
  switch (v) {
    case TreeVariant::global: return "global";
    case TreeVariant::local: return "local";
    case TreeVariant::shifted: return "shifted";
  }
  return "?";
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t n) -> std::size_t {
    if (nodes[n].leaf) return 0;
    std::size_t d = 0;
    for (std::size_t c : nodes[n].children) d = std::max(d, rec(c));
    return d + 1;
  };
  return nodes.empty() ? 0 : rec(0);
}

std::size_t DecisionTree::classify(const LabeledTable& table, std::size_t row) const {
  if (nodes.empty()) throw InvalidInput("classify: empty tree");
  std::size_t n = 0;
  while (!nodes[n].leaf) {
    const std::size_t v = table.code(row, nodes[n].attribute);
    if (v >= nodes[n].children.size()) return nodes[n].label;
    n = nodes[n].children[v];
  }
  return nodes[n].label;
}

DecisionTree build_diffp_id3(const LabeledTable& table, const TreeParams& params, Rng& rng,
                             BudgetAccountant& accountant) {
  check_table(table);
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) throw InvalidInput("tree: epsilon must be positive");
  if (params.scope.empty()) throw InvalidInput("tree: scope must be nonempty");
  accountant.open_scope(params.scope, Composition::sequential);
  Builder b{table, params, accountant, params.epsilon / (2.0 * static_cast<double>(params.depth + 1)), rng(), {}, {}};
  std::vector<std::size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  b.build(rows, table.feature_indices(), params.depth, params.scope, "root");
  return std::move(b.tree);
}

DecisionTree build_id3(const LabeledTable& table, std::size_t depth) {
  check_table(table);
  DecisionTree tree;
  std::function<std::size_t(const std::vector<std::size_t>&, const std::vector<std::size_t>&, std::size_t)> rec =
      [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attrs, std::size_t d) {
        const std::size_t id = tree.nodes.size();
        tree.nodes.emplace_back();
        const auto counts = class_counts(table, rows);
        const std::size_t majority =
            static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        tree.nodes[id].label = majority;
        if (stops(table, attrs, d, static_cast<double>(rows.size()))) return id;
        std::size_t best = attrs.front();
        double best_u = -INFINITY;
        for (std::size_t a : attrs) {
          const double u = ig_utility(table, a, &rows);
          if (u > best_u + kTieTolerance) {
            best_u = u;
            best = a;
          }
        }
        const auto parts = partition(table, rows, best);
        const auto rest = without(attrs, best);
        std::vector<std::size_t> children;
        for (const auto& part : parts) children.push_back(rec(part, rest, d - 1));
        tree.nodes[id].leaf = false;
        tree.nodes[id].attribute = best;
        tree.nodes[id].children = std::move(children);
        return id;
      };
  std::vector<std::size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  rec(rows, table.feature_indices(), depth);
  return tree;
}

TreeComparison compare_with_id3(const DecisionTree& candidate, const LabeledTable& table, std::size_t depth) {
  check_table(table);
  TreeComparison out;
  std::function<void(std::size_t, const std::vector<std::size_t>&, const std::vector<std::size_t>&, std::size_t,
                     const std::string&)>
      rec = [&](std::size_t n, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& attrs,
                std::size_t d, const std::string& path) {
        if (!out.equivalent) return;
        const auto& node = candidate.nodes.at(n);
        const bool ref_leaf = stops(table, attrs, d, static_cast<double>(rows.size()));
        if (ref_leaf != node.leaf) {
          out.equivalent = false;
          out.difference = path + ": reference " + (ref_leaf ? "stops" : "splits") + ", candidate " +
                           (node.leaf ? "stops" : "splits");
          return;
        }
        if (node.leaf) {
          const auto counts = class_counts(table, rows);
          const std::size_t top = *std::max_element(counts.begin(), counts.end());
          if (counts[node.label] != top) {
            out.equivalent = false;
            out.difference = path + ": leaf label is not a majority class";
          }
          return;
        }
        double best_u = -INFINITY;
        for (std::size_t a : attrs) best_u = std::max(best_u, ig_utility(table, a, &rows));
        if (std::find(attrs.begin(), attrs.end(), node.attribute) == attrs.end() ||
            ig_utility(table, node.attribute, &rows) < best_u - kTieTolerance) {
          out.equivalent = false;
          out.difference = path + ": split on '" + table.attributes[node.attribute].name +
                           "' does not maximise information gain";
          return;
        }
        const auto parts = partition(table, rows, node.attribute);
        const auto rest = without(attrs, node.attribute);
        for (std::size_t v = 0; v < parts.size(); ++v) {
          rec(node.children.at(v), parts[v], rest, d - 1, path + "." + std::to_string(v));
        }
      };
  std::vector<std::size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  rec(0, rows, table.feature_indices(), depth, "root");
  return out;
}

CrossValidation cross_validate(const LabeledTable& table, const TreeParams& params, std::size_t folds,
                               std::uint64_t seed) {
  if (folds < 2) throw InvalidInput("cross_validate: at least two folds required");
  if (table.size() < folds) throw InvalidInput("cross_validate: fewer rows than folds");
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle(mix_seed({seed, 0x5eedu}));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(shuffle, i)]);

  CrossValidation cv;
  for (std::size_t f = 0; f < folds; ++f) {
    LabeledTable train = table;
    train.rows.clear();
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i % folds == f) test.push_back(order[i]);
      else train.rows.push_back(table.rows[order[i]]);
    }
    Rng rng(mix_seed({seed, f + 1}));
    BudgetAccountant accountant;
    const DecisionTree tree = build_diffp_id3(train, params, rng, accountant);
    std::size_t correct = 0;
    for (std::size_t r : test) correct += tree.classify(table, r) == table.code(r, table.class_index);
    cv.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  cv.mean_accuracy = std::accumulate(cv.fold_accuracy.begin(), cv.fold_accuracy.end(), 0.0) /
                     static_cast<double>(folds);
  return cv;
}

}  // namespace dampen
