#include <algorithm>
#include <sstream>

#include "dampen/error.hpp"
#include "dampen/graph.hpp"

namespace dampen {

EdgeGraph::EdgeGraph(std::vector<std::string> nodes) {
  for (auto& id : nodes) add_node(id);
}

EdgeGraph EdgeGraph::from_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                                std::vector<std::string> extra_nodes) {
  EdgeGraph g;
  for (const auto& [u, v] : edges) {
    const std::size_t a = g.add_node(u);
    const std::size_t b = g.add_node(v);
    g.add_edge(a, b);
  }
  for (const auto& id : extra_nodes) g.add_node(id);
  return g;
}

std::size_t EdgeGraph::add_node(const std::string& id) {
  auto it = index_.find(id);
  if (it != index_.end()) return it->second;
  ids_.push_back(id);
  adj_.emplace_back();
  index_.emplace(id, ids_.size() - 1);
  return ids_.size() - 1;
}

bool EdgeGraph::has_edge(std::size_t u, std::size_t v) const {
  return u < adj_.size() && std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

bool EdgeGraph::add_edge(std::size_t u, std::size_t v) {
  if (u >= adj_.size() || v >= adj_.size()) throw InvalidInput("EdgeGraph: node out of range");
  if (u == v || has_edge(u, v)) return false;
  adj_[u].insert(std::lower_bound(adj_[u].begin(), adj_[u].end(), v), v);
  adj_[v].insert(std::lower_bound(adj_[v].begin(), adj_[v].end(), u), u);
  ++edges_;
  return true;
}

bool EdgeGraph::remove_edge(std::size_t u, std::size_t v) {
  if (!has_edge(u, v)) return false;
  adj_[u].erase(std::lower_bound(adj_[u].begin(), adj_[u].end(), v));
  adj_[v].erase(std::lower_bound(adj_[v].begin(), adj_[v].end(), u));
  --edges_;
  return true;
}

void EdgeGraph::flip_edge(std::size_t u, std::size_t v) {
  if (u == v) throw InvalidInput("EdgeGraph: self-loop");
  if (!remove_edge(u, v)) add_edge(u, v);
}

std::size_t EdgeGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InvalidInput("EdgeGraph: unknown node '" + id + "'");
  return it->second;
}

std::size_t EdgeGraph::observed_max_degree() const {
  std::size_t best = 0;
  for (const auto& a : adj_) best = std::max(best, a.size());
  return best;
}

std::size_t EdgeGraph::max_degree() const { return degree_bound_ ? *degree_bound_ : observed_max_degree(); }

void EdgeGraph::set_max_degree_bound(std::optional<std::size_t> bound) {
  if (bound && *bound < observed_max_degree()) {
    throw InvalidInput("EdgeGraph: degree bound below the observed maximum degree");
  }
  degree_bound_ = bound;
}

std::string EdgeGraph::adjacency_key() const {
  std::string key;
  const std::size_t n = ids_.size();
  key.reserve(n * (n - 1) / 2);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) key.push_back(has_edge(u, v) ? '1' : '0');
  }
  return key;
}

EdgeListReport load_edge_list(std::istream& in) {
  EdgeListReport rep;
  std::string line;
  while (std::getline(in, line)) {
    ++rep.lines;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string u, v, extra;
    if (!(ss >> u >> v)) throw ParseError("expected two node ids, got '" + line + "'", rep.lines);
    if (ss >> extra) throw ParseError("unexpected token '" + extra + "'", rep.lines);
    if (u == v) {
      rep.graph.add_node(u);
      ++rep.self_loops;
      continue;
    }
    const std::size_t a = rep.graph.add_node(u);
    const std::size_t b = rep.graph.add_node(v);
    if (rep.graph.add_edge(a, b)) ++rep.edges_kept;
    else ++rep.duplicate_edges;
  }
  if (in.bad()) throw IoError("read failure");
  return rep;
}

}  // namespace dampen
