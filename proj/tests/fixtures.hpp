#pragma once

#include "loopsoup/graph.hpp"
#include "loopsoup/network.hpp"
#include "loopsoup/rng.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixtures {

using loopsoup::EdgeSpec;
using loopsoup::WeightedGraph;

inline std::string data_file(const std::string &name) {
  return std::string(LOOPSOUP_DATA_DIR) + "/" + name;
}

/// a - b, C = 1, kappa = 1 at both ends.
inline WeightedGraph two_point() {
  return WeightedGraph::from_edges({"a", "b"}, {{"a", "b", 1.0}}, {{"a", 1.0}, {"b", 1.0}});
}

/// Complete graph on a, b, c with unit conductances and unit killing.
inline WeightedGraph triangle() {
  return WeightedGraph::from_edges({"a", "b", "c"},
                                   {{"a", "b", 1.0}, {"b", "c", 1.0}, {"a", "c", 1.0}},
                                   {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
}

/// a - b - c with killing only at a.
inline WeightedGraph path3() {
  return WeightedGraph::from_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}},
                                   {{"a", 1.0}});
}

inline WeightedGraph single_vertex(double kappa = 1.0) {
  return WeightedGraph::from_edges({"a"}, {}, {{"a", kappa}});
}

/// 4-cycle a-b-c-d with the chord a-c: two independent cycles.
inline WeightedGraph square_with_chord() {
  return WeightedGraph::from_edges(
      {"a", "b", "c", "d"},
      {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "d", 1.0}, {"d", "a", 1.0}, {"a", "c", 1.0}},
      {{"a", 1.0}});
}

/// Random connected graph: a random spanning tree plus extra edges, with
/// conductances uniform in [cmin, cmax] and killing at vertex 0.
inline WeightedGraph random_connected(std::mt19937_64 &rng, std::size_t n, std::size_t extra,
                                      double cmin = 0.1, double cmax = 10.0) {
  std::uniform_real_distribution<double> cond(cmin, cmax);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i)
    names.push_back("v" + std::to_string(i));
  std::vector<EdgeSpec> edges;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    edges.push_back({names[i], names[j], cond(rng)});
    present[i][j] = present[j][i] = 1;
  }
  std::size_t added = 0, attempts = 0;
  while (added < extra && attempts++ < 1000) {
    const auto i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    if (i == j || present[i][j])
      continue;
    edges.push_back({names[i], names[j], cond(rng)});
    present[i][j] = present[j][i] = 1;
    ++added;
  }
  return WeightedGraph::from_edges(names, edges, {{names[0], cond(rng)}});
}

/// Random Eulerian network made of `loops` random closed walks on the
/// complete digraph of n vertices.
inline loopsoup::Network random_eulerian(std::mt19937_64 &rng, std::size_t n,
                                         std::size_t max_total) {
  loopsoup::Network k(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (static_cast<std::size_t>(k.total()) < 2) {
    k = loopsoup::Network(n);
    std::size_t budget = max_total;
    while (budget >= 2) {
      const std::size_t len =
          std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(budget, 4))(rng);
      std::vector<std::size_t> walk{pick(rng)};
      for (std::size_t s = 1; s < len; ++s) {
        std::size_t nxt;
        do
          nxt = pick(rng);
        while (nxt == walk.back());
        walk.push_back(nxt);
      }
      if (walk.back() == walk.front())
        continue;
      for (std::size_t s = 0; s < len; ++s)
        k(walk[s], walk[(s + 1) % len]) += 1;
      budget -= len;
      if (std::bernoulli_distribution(0.4)(rng))
        break;
    }
  }
  return k;
}

} // namespace fixtures
