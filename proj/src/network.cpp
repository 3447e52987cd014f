#include "loopsoup/network.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/graph.hpp"

#include <numeric>

namespace loopsoup {

Network::Network(const std::vector<std::vector<count_type>> &rows)
    : n_(rows.size()), counts_(rows.size() * rows.size(), 0) {
  for (std::size_t x = 0; x < n_; ++x) {
    if (rows[x].size() != n_)
      throw Error(Errc::BadInput, "network row " + std::to_string(x) + " has wrong length");
    for (std::size_t y = 0; y < n_; ++y) {
      if (rows[x][y] < 0)
        throw Error(Errc::BadInput, "network counts must be nonnegative");
      if (x == y && rows[x][y] != 0)
        throw Error(Errc::BadInput, "network diagonal must vanish");
      (*this)(x, y) = rows[x][y];
    }
  }
}

Network::count_type Network::out_degree(std::size_t x) const {
  count_type s = 0;
  for (std::size_t y = 0; y < n_; ++y)
    s += (*this)(x, y);
  return s;
}

Network::count_type Network::in_degree(std::size_t x) const {
  count_type s = 0;
  for (std::size_t y = 0; y < n_; ++y)
    s += (*this)(y, x);
  return s;
}

Network::count_type Network::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), count_type{0});
}

bool Network::is_zero() const {
  for (auto v : counts_)
    if (v != 0)
      return false;
  return true;
}

bool Network::is_eulerian() const {
  for (std::size_t x = 0; x < n_; ++x)
    if (out_degree(x) != in_degree(x))
      return false;
  return true;
}

std::vector<std::size_t> Network::support() const {
  std::vector<std::size_t> s;
  for (std::size_t x = 0; x < n_; ++x)
    if (out_degree(x) > 0 || in_degree(x) > 0)
      s.push_back(x);
  return s;
}

bool Network::support_connected() const {
  const auto s = support();
  if (s.empty())
    return true;
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> stack{s.front()};
  seen[s.front()] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (std::size_t y = 0; y < n_; ++y)
      if (!seen[y] && ((*this)(x, y) > 0 || (*this)(y, x) > 0)) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  return count == s.size();
}

Network &Network::operator+=(const Network &other) {
  if (other.n_ != n_)
    throw Error(Errc::BadInput, "network sizes differ");
  for (std::size_t i = 0; i < counts_.size(); ++i)
    counts_[i] += other.counts_[i];
  return *this;
}

nlohmann::json Network::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t x = 0; x < n_; ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t y = 0; y < n_; ++y)
      row.push_back((*this)(x, y));
    rows.push_back(std::move(row));
  }
  return {{"counts", std::move(rows)}};
}

Network Network::from_json(const nlohmann::json &doc) {
  if (!doc.is_object() || !doc.contains("counts") || !doc["counts"].is_array())
    throw Error(Errc::BadInput, "network literal needs a \"counts\" array");
  std::vector<std::vector<count_type>> rows;
  for (const auto &row : doc["counts"]) {
    if (!row.is_array())
      throw Error(Errc::BadInput, "network counts must be an array of arrays");
    std::vector<count_type> r;
    for (const auto &v : row) {
      if (!v.is_number_integer())
        throw Error(Errc::BadInput, "network counts must be integers");
      r.push_back(v.get<count_type>());
    }
    rows.push_back(std::move(r));
  }
  return Network(rows);
}

void check_network_on_graph(const Network &k, const WeightedGraph &g) {
  if (k.size() != g.size())
    throw Error(Errc::BadInput, "network size does not match graph");
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = 0; y < k.size(); ++y)
      if (k(x, y) != 0 && !g.has_edge(x, y))
        throw Error(Errc::BadInput, "network uses non-edge (" + g.name(x) + ", " +
                                        g.name(y) + ")");
}

std::size_t NetworkHash::operator()(const Network &k) const noexcept {
  std::size_t h = k.size();
  for (auto v : k.raw())
    h ^= std::hash<Network::count_type>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

} // namespace loopsoup
