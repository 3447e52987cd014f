#include "fixtures.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace loopsoup;

namespace {

/// Arborescences toward `root` by trying every choice of out-edge at each
/// non-root support vertex.
std::uint64_t brute_arborescences(const Network &k, std::size_t root) {
  const auto support = k.support();
  std::vector<std::size_t> rest;
  for (auto x : support)
    if (x != root)
      rest.push_back(x);
  std::vector<std::size_t> choice(rest.size(), 0);
  std::uint64_t total = 0;
  const auto n = k.size();
  auto rec = [&](auto &&self, std::size_t i) -> void {
    if (i == rest.size()) {
      std::vector<std::size_t> next(n, n);
      std::uint64_t weight = 1;
      for (std::size_t j = 0; j < rest.size(); ++j) {
        next[rest[j]] = choice[j];
        weight *= static_cast<std::uint64_t>(k(rest[j], choice[j]));
      }
      for (auto x : rest) {
        std::size_t y = x;
        for (std::size_t steps = 0; steps <= n && y != root; ++steps)
          y = next[y];
        if (y != root)
          return;
      }
      total += weight;
      return;
    }
    for (std::size_t y = 0; y < n; ++y)
      if (k(rest[i], y) > 0) {
        choice[i] = y;
        self(self, i + 1);
      }
  };
  rec(rec, 0);
  return total;
}

} // namespace

TEST_CASE("det_complex examples") {
  CHECK(std::abs(det_complex(CMatrix::Identity(3, 3)) - 1.0) < 1e-15);
  CMatrix m(2, 2);
  m << 1.0, -0.5, -0.5, 1.0;
  CHECK(std::abs(det_complex(m) - 0.75) < 1e-15);
  CHECK(std::abs(det_complex(CMatrix(0, 0)) - 1.0) == 0.0);
  const std::complex<double> z{0.3, -0.4};
  CMatrix t(2, 2);
  t << 1.0, -0.5 * z, -0.5 * std::conj(z), 1.0;
  CHECK(std::abs(det_complex(t) - (1.0 - std::norm(z) / 4.0)) < 1e-15);
  CMatrix singular = CMatrix::Ones(2, 2);
  CHECK(std::abs(det_complex(singular)) < 1e-15);
}

TEST_CASE("permanent examples") {
  Matrix g(2, 2);
  g << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
  CHECK(permanent(g) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(permanent(Matrix::Identity(5, 5)) == doctest::Approx(1.0));
  CHECK(permanent(Matrix::Ones(3, 3)) == doctest::Approx(6.0));
  CHECK(permanent(Matrix::Ones(6, 6)) == doctest::Approx(720.0));
  CHECK(permanent(Matrix(0, 0)) == 1.0);
  CHECK_THROWS_AS(permanent(Matrix::Ones(21, 21)), Error);
}

TEST_CASE("alpha-permanent examples") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Matrix r(3, 3);
  for (auto &v : r.reshaped())
    v = normal(rng);
  const CMatrix rc = r.cast<std::complex<double>>();
  CHECK(std::abs(alpha_permanent({rc, 1.0}) - permanent(r)) < 1e-12);
  // (-1)^n det at alpha = -1
  CHECK(std::abs(alpha_permanent({rc, -1.0}) - (-1.0) * r.determinant()) < 1e-12);

  CMatrix one(1, 1);
  one << 2.5;
  CHECK(std::abs(alpha_permanent({one, 0.7}) - 0.7 * 2.5) < 1e-15);

  CMatrix two(2, 2);
  two << 1.0, 2.0, 3.0, 4.0;
  const double a = 0.3;
  CHECK(std::abs(alpha_permanent({two, a}) - (a * a * 4.0 + a * 6.0)) < 1e-14);
  CHECK_THROWS_AS(alpha_permanent({CMatrix::Ones(11, 11), 1.0}), Error);
}

TEST_CASE("spanning tree weight sums") {
  CHECK(spanning_tree_weight_sum(fixtures::triangle()) == doctest::Approx(3.0));
  CHECK(spanning_tree_weight_sum(WeightedGraph::from_edges({"a", "b"}, {{"a", "b", 2.5}}, {{"a", 1}})) ==
        doctest::Approx(2.5));
  CHECK(spanning_tree_weight_sum(fixtures::path3()) == doctest::Approx(1.0));
  CHECK(spanning_tree_weight_sum(fixtures::single_vertex()) == 1.0);
  auto tri = WeightedGraph::from_edges({"a", "b", "c"},
                                       {{"a", "b", 1.0}, {"b", "c", 2.0}, {"a", "c", 3.0}}, {});
  CHECK(spanning_tree_weight_sum(tri) == doctest::Approx(11.0));
  try {
    spanning_tree_weight_sum(WeightedGraph::from_edges({"a", "b", "c"}, {{"a", "b", 1.0}}, {}));
    FAIL("no throw");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::Disconnected);
  }
}

TEST_CASE("spanning tree sum is monotone in each conductance") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = fixtures::random_connected(rng, 5, 3);
    const double base = spanning_tree_weight_sum(g);
    for (const auto &[u, v] : g.edges()) {
      Matrix c = g.conductances();
      c(u, v) *= 1.5;
      c(v, u) *= 1.5;
      const WeightedGraph bumped(g.vertices(), c, g.killing());
      CHECK(spanning_tree_weight_sum(bumped) > base);
    }
  }
}

TEST_CASE("arborescence examples") {
  Network two(2);
  two(0, 1) = two(1, 0) = 2;
  CHECK(arborescence_count(two, 0) == 2);
  two(0, 1) = two(1, 0) = 1;
  CHECK(arborescence_count(two, 0) == 1);
  Network tri(3);
  tri(0, 1) = tri(1, 2) = tri(2, 0) = 1;
  CHECK(arborescence_count(tri, 0) == 1);
  CHECK_THROWS_AS(arborescence_count(Network(3), 0), Error);
  Network partial(3);
  partial(0, 1) = partial(1, 0) = 1;
  CHECK(arborescence_count(partial, 2) == 0);
}

TEST_CASE("arborescences: matrix-tree against brute force, root independence") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const Network k = fixtures::random_eulerian(rng, n, 6);
    if (!k.support_connected())
      continue;
    const auto support = k.support();
    const auto first = arborescence_count(k, support.front());
    for (auto r : support) {
      CHECK(arborescence_count(k, r) == brute_arborescences(k, r));
      CHECK(arborescence_count(k, r) == first);
    }
  }
}

TEST_CASE("integer determinant") {
  CHECK(det_integer({{2, -1}, {-1, 2}}) == 3);
  CHECK(det_integer({}) == 1);
  CHECK(det_integer({{0, 1}, {1, 0}}) == -1);
  CHECK(det_integer({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}) == -3);
}
