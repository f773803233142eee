#include <algorithm>
#include <cstdint>
#include <deque>

#include "dampen/error.hpp"
#include "dampen/graph.hpp"
#include "dampen/kernels.hpp"
#include "dampen/parallel.hpp"

namespace dampen {

double ebc(const EdgeGraph& g, std::size_t c) {
  if (c >= g.node_count()) throw InvalidInput("ebc: unknown node");
  const auto& nc = g.neighbors(c);
  const std::size_t d = nc.size();
  if (d < 2) return 0.0;

  // Local indices: 0..d-1 for the neighbours, d for c itself.
  const std::size_t words = (d + 1 + 63) / 64;
  std::vector<std::uint64_t> bits((d + 1) * words, 0);
  auto set = [&](std::size_t row, std::size_t col) { bits[row * words + col / 64] |= std::uint64_t{1} << (col % 64); };
  auto test = [&](std::size_t row, std::size_t col) {
    return (bits[row * words + col / 64] >> (col % 64)) & 1u;
  };
  for (std::size_t i = 0; i < d; ++i) {
    set(i, d);
    set(d, i);
    // Merge the sorted neighbour list of nc[i] with nc.
    const auto& ni = g.neighbors(nc[i]);
    std::size_t a = 0, b = 0;
    while (a < ni.size() && b < d) {
      if (ni[a] < nc[b]) ++a;
      else if (nc[b] < ni[a]) ++b;
      else {
        set(i, b);
        ++a;
        ++b;
      }
    }
  }

  double total = 0.0;
  for (std::size_t u = 0; u < d; ++u) {
    for (std::size_t v = u + 1; v < d; ++v) {
      if (test(u, v)) continue;
      const auto q = kernels::and_popcount(&bits[u * words], &bits[v * words], words);
      total += 1.0 / static_cast<double>(q);
    }
  }
  return total;
}

std::vector<double> ebc_all(const EdgeGraph& g) {
  std::vector<double> out(g.node_count());
  parallel_for(out.size(), [&](std::size_t c) { out[c] = ebc(g, c); });
  return out;
}

double ebc_oracle(const EdgeGraph& g, std::size_t c, std::size_t max_degree) {
  if (c >= g.node_count()) throw InvalidInput("ebc_oracle: unknown node");
  const auto& nc = g.neighbors(c);
  if (nc.size() > max_degree) throw ResourceExhausted("ebc_oracle: degree above the configured cap");
  std::vector<std::size_t> members(nc.begin(), nc.end());
  members.push_back(c);
  const std::size_t m = members.size();
  const std::size_t me = m - 1;

  std::vector<std::vector<std::size_t>> dist(m, std::vector<std::size_t>(m, SIZE_MAX));
  std::vector<std::vector<double>> paths(m, std::vector<double>(m, 0.0));
  for (std::size_t s = 0; s < m; ++s) {
    std::deque<std::size_t> queue{s};
    dist[s][s] = 0;
    paths[s][s] = 1.0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y = 0; y < m; ++y) {
        if (!g.has_edge(members[x], members[y])) continue;
        if (dist[s][y] == SIZE_MAX) {
          dist[s][y] = dist[s][x] + 1;
          queue.push_back(y);
        }
        if (dist[s][y] == dist[s][x] + 1) paths[s][y] += paths[s][x];
      }
    }
  }

  double total = 0.0;
  for (std::size_t u = 0; u < me; ++u) {
    for (std::size_t v = u + 1; v < me; ++v) {
      if (dist[u][v] == SIZE_MAX) continue;
      if (dist[u][me] + dist[me][v] != dist[u][v]) continue;
      total += paths[u][me] * paths[me][v] / paths[u][v];
    }
  }
  return total;
}

double global_sensitivity_ebc(std::size_t max_degree) { return delta_ebc(max_degree, 0); }

double delta_ebc(std::size_t degree, std::size_t t) {
  const double d = static_cast<double>(degree + t);
  return std::max(d * (d - 1.0) / 4.0, d);
}

double delta_ebc(const EdgeGraph& g, std::size_t t, std::size_t v) { return delta_ebc(g.degree(v), t); }

std::size_t edge_database_size(const EdgeGraph& g) {
  const std::size_t n = g.node_count();
  return std::max<std::size_t>(1, n * (n - 1) / 2);
}

SelectionProblem ebc_problem(const EdgeGraph& g, const std::vector<std::size_t>& range,
                             std::optional<double> global_sensitivity) {
  std::vector<std::size_t> nodes = range;
  if (nodes.empty()) {
    for (std::size_t v = 0; v < g.node_count(); ++v) nodes.push_back(v);
  }
  SelectionProblem p;
  p.global_sensitivity = global_sensitivity ? *global_sensitivity : global_sensitivity_ebc(g.max_degree());
  p.database_size = edge_database_size(g);
  std::vector<double> scores(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { scores[i] = ebc(g, nodes[i]); });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    p.range.push_back(g.id(nodes[i]));
    p.utility.push_back(scores[i]);
  }
  return p;
}

SensitivityFunction ebc_sensitivity(const EdgeGraph& g, const std::vector<std::size_t>& range) {
  std::vector<std::size_t> degrees;
  for (std::size_t v : range) degrees.push_back(g.degree(v));
  SensitivityFunction f;
  f.eval = [degrees](std::size_t t, std::size_t r) { return delta_ebc(degrees[r], t); };
  f.declared_admissible = true;
  f.declared_bounded = false;
  f.monotonicity = Monotonicity::none;
  return f;
}

DatasetModel<EdgeGraph> ebc_dataset_model(const EdgeGraph& g) {
  DatasetModel<EdgeGraph> model;
  const std::size_t n = g.node_count();
  model.global_sensitivity = global_sensitivity_ebc(n == 0 ? 0 : n - 1);
  model.database_size = edge_database_size(g);
  model.key = [](const EdgeGraph& x) { return x.adjacency_key(); };
  model.utilities = [](const EdgeGraph& x) {
    std::vector<double> u(x.node_count());
    for (std::size_t v = 0; v < u.size(); ++v) u[v] = ebc(x, v);
    return u;
  };
  model.neighbors = [](const EdgeGraph& x, const std::function<void(const EdgeGraph&)>& emit) {
    EdgeGraph y = x;
    for (std::size_t u = 0; u < x.node_count(); ++u) {
      for (std::size_t v = u + 1; v < x.node_count(); ++v) {
        y.flip_edge(u, v);
        emit(y);
        y.flip_edge(u, v);
      }
    }
  };
  return model;
}

SensitivityModel<EdgeGraph> ebc_sensitivity_model() {
  SensitivityModel<EdgeGraph> m;
  m.eval = [](const EdgeGraph& x, std::size_t t, std::size_t v) { return delta_ebc(x, t, v); };
  m.declared_admissible = true;
  m.declared_bounded = false;
  m.monotonicity = Monotonicity::none;
  return m;
}

}  // namespace dampen
