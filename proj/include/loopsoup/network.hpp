#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace loopsoup {

class WeightedGraph;

/// Square matrix of nonnegative jump counts on directed edges, zero diagonal.
class Network {
public:
  using count_type = std::int64_t;

  Network() = default;
  explicit Network(std::size_t n) : n_(n), counts_(n * n, 0) {}
  /// Throws Error(BadInput) on ragged rows, negative counts or a nonzero
  /// diagonal.
  explicit Network(const std::vector<std::vector<count_type>> &rows);

  std::size_t size() const noexcept { return n_; }
  count_type operator()(std::size_t x, std::size_t y) const { return counts_[x * n_ + y]; }
  count_type &operator()(std::size_t x, std::size_t y) { return counts_[x * n_ + y]; }

  count_type out_degree(std::size_t x) const;
  count_type in_degree(std::size_t x) const;
  /// |k|: total number of directed jumps.
  count_type total() const;
  bool is_zero() const;
  bool is_eulerian() const;
  /// Vertices with nonzero out- or in-degree.
  std::vector<std::size_t> support() const;
  /// Weak connectivity of the support digraph; true for the zero network.
  bool support_connected() const;

  Network &operator+=(const Network &other);
  friend Network operator+(Network a, const Network &b) { return a += b; }
  friend bool operator==(const Network &, const Network &) = default;
  friend auto operator<=>(const Network &, const Network &) = default;

  const std::vector<count_type> &raw() const noexcept { return counts_; }

  nlohmann::json to_json() const;
  /// Parses {"counts": [[...]]}.
  static Network from_json(const nlohmann::json &doc);

private:
  std::size_t n_ = 0;
  std::vector<count_type> counts_;
};

/// Throws Error(BadInput) unless `k` has the graph's size and vanishes off
/// the graph's edges.
void check_network_on_graph(const Network &k, const WeightedGraph &g);

struct NetworkHash {
  std::size_t operator()(const Network &k) const noexcept;
};

} // namespace loopsoup
