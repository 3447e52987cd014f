#include "loopsoup/exact.hpp"

#include "loopsoup/error.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>

namespace loopsoup {

std::complex<double> det_complex(const CMatrix &m) {
  if (m.rows() != m.cols())
    throw Error(Errc::BadInput, "determinant of a non-square matrix");
  if (m.rows() == 0)
    return {1.0, 0.0};
  return Eigen::PartialPivLU<CMatrix>(m).determinant();
}

double permanent(const Matrix &m) {
  if (m.rows() != m.cols())
    throw Error(Errc::BadInput, "permanent of a non-square matrix");
  const auto n = static_cast<std::size_t>(m.rows());
  if (n > kPermanentMaxSize)
    throw Error(Errc::TooLarge, "permanent limited to " +
                                    std::to_string(kPermanentMaxSize) + " rows");
  if (n == 0)
    return 1.0;

  // per(A) = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} a_ij
  std::vector<double> row_sum(n, 0.0);
  double total = 0.0;
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint64_t next = k ^ (k >> 1);
    const std::uint64_t flipped = next ^ gray;
    const auto j = static_cast<Eigen::Index>(std::countr_zero(flipped));
    const double sign = (next & flipped) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i)
      row_sum[i] += sign * m(static_cast<Eigen::Index>(i), j);
    gray = next;

    double prod = 1.0;
    for (double s : row_sum)
      prod *= s;
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

std::complex<double> alpha_permanent(const AlphaPermanentInput &in) {
  const CMatrix &m = in.matrix;
  if (m.rows() != m.cols())
    throw Error(Errc::BadInput, "alpha-permanent of a non-square matrix");
  const auto n = static_cast<std::size_t>(m.rows());
  if (n > kAlphaPermanentMaxSize)
    throw Error(Errc::TooLarge, "alpha-permanent limited to " +
                                    std::to_string(kAlphaPermanentMaxSize) + " rows");
  if (n == 0)
    return {1.0, 0.0};

  std::vector<double> alpha_pow(n + 1, 1.0);
  for (std::size_t c = 1; c <= n; ++c)
    alpha_pow[c] = alpha_pow[c - 1] * in.alpha;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<char> seen(n);
  std::complex<double> total{0.0, 0.0};
  do {
    std::complex<double> prod{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      prod *= m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    if (prod == std::complex<double>{0.0, 0.0})
      continue;
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i])
        continue;
      ++cycles;
      for (std::size_t j = i; !seen[j]; j = perm[j])
        seen[j] = 1;
    }
    total += alpha_pow[cycles] * prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double spanning_tree_weight_sum(const WeightedGraph &g) {
  if (!g.connected())
    throw Error(Errc::Disconnected, "spanning trees need a connected graph");
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n == 1)
    return 1.0;
  const Matrix &c = g.conductances();
  Matrix lap = Matrix(c.rowwise().sum().asDiagonal()) - c;
  // matrix-tree: any principal (n-1)-minor, here dropping the last vertex
  const Matrix minor = lap.topLeftCorner(n - 1, n - 1);
  Eigen::LLT<Matrix> llt(minor);
  const double root = Matrix(llt.matrixL()).diagonal().prod();
  return root * root;
}

std::int64_t det_integer(std::vector<std::vector<std::int64_t>> m) {
  const auto n = m.size();
  if (n == 0)
    return 1;
  using wide = __int128;
  std::vector<std::vector<wide>> a(n, std::vector<wide>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n)
      throw Error(Errc::BadInput, "integer determinant of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = m[i][j];
  }
  constexpr wide limit = static_cast<wide>(std::numeric_limits<std::int64_t>::max());
  int sign = 1;
  wide prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a[swap][k] == 0)
        ++swap;
      if (swap == n)
        return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        const wide num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        a[i][j] = num / prev; // exact by Sylvester's identity
        if (a[i][j] > limit || a[i][j] < -limit)
          throw Error(Errc::TooLarge, "integer determinant overflows 64 bits");
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return static_cast<std::int64_t>(sign * a[n - 1][n - 1]);
}

std::uint64_t arborescence_count(const Network &net, std::size_t root) {
  if (root >= net.size())
    throw Error(Errc::BadInput, "root index out of range");
  const auto support = net.support();
  if (support.empty())
    throw Error(Errc::EmptyNetwork, "arborescences of the zero network");
  if (std::find(support.begin(), support.end(), root) == support.end())
    return 0;

  // Reduced out-degree Laplacian on support minus root: L = D_out - A.
  std::vector<std::size_t> rest;
  for (auto x : support)
    if (x != root)
      rest.push_back(x);
  const auto m = rest.size();
  std::vector<std::vector<std::int64_t>> lap(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    lap[i][i] = net.out_degree(rest[i]);
    for (std::size_t j = 0; j < m; ++j)
      if (i != j)
        lap[i][j] -= net(rest[i], rest[j]);
  }
  const auto det = det_integer(std::move(lap));
  if (det < 0)
    throw Error(Errc::NonIntegral, "negative arborescence determinant");
  return static_cast<std::uint64_t>(det);
}

} // namespace loopsoup
