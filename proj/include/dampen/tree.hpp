#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dampen/core.hpp"
#include "dampen/sensitivity.hpp"

namespace dampen {

struct AttributeSpec {
  enum class Kind { categorical, continuous };
  std::string name;
  Kind kind = Kind::categorical;
  std::vector<std::string> values;  // categorical domain
  double min = 0.0, max = 0.0;      // continuous range
  std::size_t bins = 0;
};

// Rows hold one cell per attribute: the value index for categorical
// attributes, the raw number for continuous ones.
struct LabeledTable {
  std::vector<AttributeSpec> attributes;
  std::size_t class_index = 0;
  std::vector<std::vector<double>> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t arity(std::size_t attribute) const { return attributes.at(attribute).values.size(); }
  std::size_t code(std::size_t row, std::size_t attribute) const {
    return static_cast<std::size_t>(rows[row][attribute]);
  }
  std::size_t class_count() const { return arity(class_index); }
  std::vector<std::size_t> feature_indices() const;
  void validate() const;
};

// Schema sidecar: {"class": "label", "attributes": {"name": {"categorical": [...]} |
// {"continuous": {"min": x, "max": y, "bins": b}}, ...}}. Attribute order follows the CSV header.
struct TableSchema {
  std::string class_name;
  std::map<std::string, AttributeSpec> attributes;
};
TableSchema parse_schema(std::istream& in);

struct IngestionReport {
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;  // blank lines
};
LabeledTable load_table_csv(std::istream& in, const TableSchema& schema, IngestionReport* report = nullptr);

// Every continuous attribute with bins >= 2 becomes categorical.
LabeledTable discretize(const LabeledTable& table);
LabeledTable discretize(const LabeledTable& table, std::size_t attribute, std::size_t bins);

// counts[j * |C| + c] over the selected rows (all rows when `rows` is null).
using Contingency = std::vector<std::size_t>;
Contingency contingency(const LabeledTable& table, std::size_t attribute,
                        const std::vector<std::size_t>* rows = nullptr);

// Sum over (j, c) of n_jc log2(n_jc / n_j): minus the row count times the
// conditional class entropy. Nonpositive; 0 for a pure split.
double ig_utility(const Contingency& counts, std::size_t classes);
double ig_utility(const LabeledTable& table, std::size_t attribute, const std::vector<std::size_t>* rows = nullptr);

double global_sensitivity_ig(std::size_t table_size);

// f(x) = (x+1) log2(x+1) - x log2 x, 0 for x <= 0.
double ig_f(double x);
// g(x) = -f(x-1), 0 for x <= 1.
double ig_g(double x);
double ig_h(double a, double b);

double ls0_ig(const Contingency& counts, std::size_t classes);

enum class IgGuard {
  table_size,  // additions only while a < tau, tau the original table size
  none,
};

class IgCandidateCache {
 public:
  using Pairs = std::set<std::pair<long, long>>;
  // Candidate sets for distances 0..t, extending any cached prefix.
  const std::vector<Pairs>& levels(long a, long b, long tau, std::size_t t, IgGuard guard);
  std::size_t hits() const { return hits_; }

 private:
  std::map<std::tuple<long, long, long, int>, std::vector<Pairs>> store_;
  std::size_t hits_ = 0;
};

IgCandidateCache::Pairs candidates_ig(long a, long b, long tau, std::size_t t, IgGuard guard = IgGuard::table_size,
                                      IgCandidateCache* cache = nullptr);

// max over (j, c) and t' <= t of h over the candidate pairs.
double ls_t_ig_candidates(const Contingency& counts, std::size_t classes, std::size_t t, IgGuard guard,
                          IgCandidateCache* cache = nullptr);
// Exact element local sensitivity at distance t.
double ls_t_ig(const Contingency& counts, std::size_t classes, std::size_t t);

// Bounded exact LS_t per attribute, memoised incrementally in t.
SensitivityFunction ig_sensitivity(const std::vector<Contingency>& per_attribute, std::size_t classes,
                                   std::size_t database_size);

// Add/remove one row in a single attribute's contingency table.
DatasetModel<Contingency> ig_dataset_model(std::size_t values, std::size_t classes, std::size_t database_size);

// A whole table as counts over every (attribute values..., class) combination,
// row-major with the class last. Candidates are the attributes; a neighbour
// adds or removes one row.
DatasetModel<Contingency> ig_table_dataset_model(const std::vector<std::size_t>& arities, std::size_t classes,
                                                 std::size_t database_size);
// Per-attribute contingency tables of such a joint count vector.
std::vector<Contingency> marginal_contingencies(const Contingency& joint, const std::vector<std::size_t>& arities,
                                                std::size_t classes);

double noisy_count(std::size_t count, double epsilon, Rng& rng);

struct TreeNode {
  bool leaf = true;
  std::size_t attribute = 0;
  std::size_t label = 0;
  std::vector<std::size_t> children;  // node indices, one per attribute value
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t depth() const;
  std::size_t classify(const LabeledTable& table, std::size_t row) const;
};

enum class TreeVariant { global, local, shifted };
TreeVariant parse_tree_variant(const std::string& name);
std::string_view to_string(TreeVariant v);

struct TreeParams {
  std::size_t depth = 5;
  double epsilon = 1.0;
  TreeVariant variant = TreeVariant::global;
  std::string scope = "tree";
};

DecisionTree build_diffp_id3(const LabeledTable& table, const TreeParams& params, Rng& rng,
                             BudgetAccountant& accountant);

// Same recursion with exact counts and an argmax split.
DecisionTree build_id3(const LabeledTable& table, std::size_t depth);

// Structural equality up to ties: a split may differ where the reference
// attribute and the chosen one have equal utility, and a leaf label may
// differ where class counts tie.
struct TreeComparison {
  bool equivalent = true;
  std::string difference;
};
TreeComparison compare_with_id3(const DecisionTree& candidate, const LabeledTable& table, std::size_t depth);

struct CrossValidation {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};
CrossValidation cross_validate(const LabeledTable& table, const TreeParams& params, std::size_t folds,
                               std::uint64_t seed);

}  // namespace dampen
