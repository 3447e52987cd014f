#include "loopsoup/homology.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"
#include "loopsoup/networks.hpp"
#include "loopsoup/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

namespace loopsoup {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t root(std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = root(a);
    b = root(b);
    if (a == b)
      return false;
    parent[b] = a;
    return true;
  }
};

void require_connected(const WeightedGraph &g) {
  if (!g.connected())
    throw Error(Errc::Disconnected, "graph is not connected");
}

struct FftwFree {
  void operator()(fftw_complex *p) const noexcept { fftw_free(p); }
};

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

struct Routes {
  double via_intersection = 1.0;
  double via_trees = 1.0;
  std::size_t cycles = 0;
};

Routes volume_routes(const WeightedGraph &g) {
  require_connected(g);
  const CycleBasis basis = cycle_basis(g);
  Routes r;
  r.cycles = basis.size();
  r.via_trees = 1.0 / std::sqrt(spanning_tree_weight_sum(g));
  if (basis.size() == 0) {
    r.via_intersection = 1.0;
    return r;
  }
  double prod_c = 1.0;
  for (const auto &[u, v] : g.edges())
    prod_c *= g.conductance(u, v);
  r.via_intersection = 1.0 / std::sqrt(intersection_matrix(basis, g).determinant() * prod_c);
  return r;
}

HomologyClass negated(HomologyClass j) {
  for (auto &c : j.coords)
    c = -c;
  return j;
}

} // namespace

CycleBasis cycle_basis(const WeightedGraph &g) {
  require_connected(g);
  const auto n = g.size();
  CycleBasis basis;
  basis.vertex_count = n;

  auto order = g.edges();
  std::stable_sort(order.begin(), order.end(), [&](const auto &a, const auto &b) {
    const double ca = g.conductance(a.first, a.second), cb = g.conductance(b.first, b.second);
    if (ca != cb)
      return ca > cb;
    return a < b;
  });
  DisjointSets sets(n);
  std::vector<std::vector<std::size_t>> tree_adj(n);
  for (const auto &e : order) {
    if (sets.unite(e.first, e.second)) {
      basis.tree.push_back(e);
      tree_adj[e.first].push_back(e.second);
      tree_adj[e.second].push_back(e.first);
    } else {
      basis.chords.push_back(e);
    }
  }
  std::sort(basis.tree.begin(), basis.tree.end());
  std::sort(basis.chords.begin(), basis.chords.end());

  std::vector<std::size_t> parent(n, 0), depth(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (auto y : tree_adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        parent[y] = x;
        depth[y] = depth[x] + 1;
        stack.push_back(y);
      }
  }

  const auto m = static_cast<Eigen::Index>(n);
  for (const auto &[u, v] : basis.chords) {
    Matrix c = Matrix::Zero(m, m);
    auto step = [&](std::size_t a, std::size_t b) {
      c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += 1.0;
      c(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) -= 1.0;
    };
    step(u, v);
    // tree path v -> u: climb from both ends to the common ancestor
    std::vector<std::size_t> down; // from u upwards, traversed in reverse
    std::size_t a = v, b = u;
    while (depth[a] > depth[b]) {
      step(a, parent[a]);
      a = parent[a];
    }
    while (depth[b] > depth[a]) {
      down.push_back(b);
      b = parent[b];
    }
    while (a != b) {
      step(a, parent[a]);
      a = parent[a];
      down.push_back(b);
      b = parent[b];
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it)
      step(parent[*it], *it);
    basis.cycles.push_back(std::move(c));
  }
  return basis;
}

HomologyClass network_homology_class(const Network &k, const CycleBasis &basis) {
  if (k.size() != basis.vertex_count)
    throw Error(Errc::BadInput, "network size does not match the cycle basis");
  if (!k.is_eulerian())
    throw Error(Errc::NotEulerian, "network is not balanced (in-degree != out-degree)");
  HomologyClass j;
  for (const auto &[u, v] : basis.chords)
    j.coords.push_back(k(u, v) - k(v, u));

  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = x + 1; y < k.size(); ++y) {
      double residual = static_cast<double>(k(x, y) - k(y, x));
      for (std::size_t i = 0; i < basis.size(); ++i)
        residual -= static_cast<double>(j.coords[i]) *
                    basis.cycles[i](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      if (residual != 0.0)
        throw Error(Errc::NonIntegral, "edge flow does not expand in the cycle basis");
    }
  return j;
}

Matrix intersection_matrix(const CycleBasis &basis, const WeightedGraph &g) {
  const auto n = basis.size();
  if (n == 0)
    throw Error(Errc::EmptyBasis, "graph has no cycles");
  Matrix lambda = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto &[u, v] : g.edges()) {
    const auto a = static_cast<Eigen::Index>(u), b = static_cast<Eigen::Index>(v);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            basis.cycles[i](a, b) * basis.cycles[j](a, b) / g.conductance(u, v);
  }
  return lambda;
}

std::vector<OneForm> harmonic_basis(const WeightedGraph &g, const CycleBasis &basis) {
  require_connected(g);
  const auto n = basis.size();
  if (n == 0)
    return {};
  const auto &edges = g.edges();
  const auto vcount = static_cast<Eigen::Index>(g.size());
  const auto ecount = static_cast<Eigen::Index>(edges.size());
  const auto ncount = static_cast<Eigen::Index>(n);

  // unknowns: omega(u, v) per edge u < v
  Matrix a = Matrix::Zero(vcount + ncount, ecount);
  for (Eigen::Index e = 0; e < ecount; ++e) {
    const auto [u, v] = edges[static_cast<std::size_t>(e)];
    const double c = g.conductance(u, v);
    a(static_cast<Eigen::Index>(u), e) += c;
    a(static_cast<Eigen::Index>(v), e) -= c;
    for (Eigen::Index i = 0; i < ncount; ++i)
      a(vcount + i, e) = basis.cycles[static_cast<std::size_t>(i)](
          static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  }
  Matrix rhs = Matrix::Zero(vcount + ncount, ncount);
  rhs.bottomRows(ncount) = Matrix::Identity(ncount, ncount);
  const Matrix solution = a.colPivHouseholderQr().solve(rhs);
  if ((a * solution - rhs).cwiseAbs().maxCoeff() > 1e-10)
    throw Error(Errc::MismatchBeyondTolerance, "harmonic constraint system has no solution");

  std::vector<OneForm> forms;
  for (Eigen::Index i = 0; i < ncount; ++i) {
    OneForm w = OneForm::Zero(vcount, vcount);
    for (Eigen::Index e = 0; e < ecount; ++e) {
      const auto [u, v] = edges[static_cast<std::size_t>(e)];
      w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = solution(e, i);
      w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = -solution(e, i);
    }
    forms.push_back(std::move(w));
  }
  return forms;
}

std::vector<OneForm> harmonic_basis_from_intersection(const WeightedGraph &g,
                                                      const CycleBasis &basis) {
  if (basis.size() == 0)
    return {};
  const Matrix inv = intersection_matrix(basis, g).inverse();
  const auto vcount = static_cast<Eigen::Index>(g.size());
  std::vector<OneForm> forms;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    OneForm w = OneForm::Zero(vcount, vcount);
    for (std::size_t k = 0; k < basis.size(); ++k)
      w += inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * basis.cycles[k];
    for (const auto &[u, v] : g.edges()) {
      const auto a = static_cast<Eigen::Index>(u), b = static_cast<Eigen::Index>(v);
      w(a, b) /= g.conductance(u, v);
      w(b, a) /= g.conductance(u, v);
    }
    forms.push_back(std::move(w));
  }
  return forms;
}

JacobianVolume jacobian_volume(const WeightedGraph &g) {
  const Routes r = volume_routes(g);
  JacobianVolume out;
  out.via_intersection = r.via_intersection;
  out.via_trees = r.via_trees;
  if (r.cycles == 0) {
    out.degenerate = true;
    out.value = 1.0;
    return out;
  }
  if (std::abs(r.via_intersection - r.via_trees) > 1e-10 * std::abs(r.via_trees))
    throw Error(Errc::MismatchBeyondTolerance,
                "Jacobian volume routes disagree: " + std::to_string(r.via_intersection) +
                    " vs " + std::to_string(r.via_trees));
  out.value = r.via_trees;
  return out;
}

OneForm dual_form(const WeightedGraph &g, const CycleBasis &basis, const std::vector<double> &t,
                  DualKind kind) {
  if (t.size() != basis.size())
    throw Error(Errc::BadInput, "torus point has the wrong dimension");
  const auto vcount = static_cast<Eigen::Index>(g.size());
  OneForm w = OneForm::Zero(vcount, vcount);
  if (kind == DualKind::Indicator) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto u = static_cast<Eigen::Index>(basis.chords[i].first);
      const auto v = static_cast<Eigen::Index>(basis.chords[i].second);
      w(u, v) += t[i];
      w(v, u) -= t[i];
    }
    return w;
  }
  const auto forms = harmonic_basis(g, basis);
  for (std::size_t i = 0; i < t.size(); ++i)
    w += t[i] * forms[i];
  return w;
}

std::complex<double> pairing_phase(const Network &k, const OneForm &omega) {
  double s = 0.0;
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = 0; y < k.size(); ++y)
      s += static_cast<double>(k(x, y)) *
           omega(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  return std::polar(1.0, kTwoPi * s);
}

std::complex<double> class_phase(const HomologyClass &j, const std::vector<double> &t) {
  if (t.size() != j.coords.size())
    throw Error(Errc::BadInput, "torus point has the wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    s += t[i] * static_cast<double>(j.coords[i]);
  return std::polar(1.0, kTwoPi * s);
}

double HomologyLaw::at(const HomologyClass &j) const {
  const auto it = probability.find(j);
  return it == probability.end() ? 0.0 : it->second;
}

HomologyLaw homology_distribution(const ChainKernel &kernel, const CycleBasis &basis,
                                  double alpha, std::size_t grid, DualKind kind,
                                  double min_captured) {
  if (!(alpha > 0.0))
    throw Error(Errc::BadInput, "alpha must be positive");
  const auto &g = kernel.graph();
  const std::size_t n = basis.size();
  HomologyLaw law;
  law.dimension = n;
  law.grid = grid;
  if (n == 0) {
    law.probability[HomologyClass{}] = 1.0;
    return law;
  }
  if (!is_power_of_two(grid) || grid < 8)
    throw Error(Errc::BadInput, "grid size must be a power of two >= 8");
  std::size_t points = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (points > (std::size_t{1} << 24) / grid)
      throw Error(Errc::TooLarge, "Fourier grid exceeds 2^24 points");
    points *= grid;
  }

  const std::vector<OneForm> forms =
      kind == DualKind::Harmonic ? harmonic_basis(g, basis) : std::vector<OneForm>{};
  std::unique_ptr<fftw_complex[], FftwFree> data(
      static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * points)));
  std::vector<int> dims(n, static_cast<int>(grid));
  fftw_plan plan = fftw_plan_dft(static_cast<int>(n), dims.data(), data.get(), data.get(),
                                 FFTW_FORWARD, FFTW_ESTIMATE);

  // row-major grid: the first coordinate varies slowest
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> t(n);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    for (std::size_t i = n; i-- > 0;) {
      idx[i] = rest % grid;
      rest /= grid;
      t[i] = static_cast<double>(idx[i]) / static_cast<double>(grid);
    }
    OneForm w;
    if (kind == DualKind::Harmonic) {
      w = OneForm::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
      for (std::size_t i = 0; i < n; ++i)
        w += t[i] * forms[i];
    } else {
      w = dual_form(g, basis, t, DualKind::Indicator);
    }
    const auto phi = generating_function(kernel, ModifierMatrix::from_one_form(g, w), alpha);
    data[p][0] = phi.real();
    data[p][1] = phi.imag();
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const auto half = static_cast<std::int64_t>(grid / 2);
  const double scale = 1.0 / static_cast<double>(points);
  law.captured_mass = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    HomologyClass j;
    j.coords.resize(n);
    std::size_t rest = p;
    bool inside = true;
    for (std::size_t i = n; i-- > 0;) {
      auto r = static_cast<std::int64_t>(rest % grid);
      rest /= grid;
      if (r >= half)
        r -= static_cast<std::int64_t>(grid);
      inside = inside && std::abs(r) < half;
      j.coords[i] = r;
    }
    if (!inside)
      continue;
    double re = data[p][0] * scale;
    const double im = data[p][1] * scale;
    law.max_imaginary = std::max(law.max_imaginary, std::abs(im));
    if (re < 0.0) {
      law.clipped_negative -= re;
      re = 0.0;
    }
    law.captured_mass += re;
    law.probability.emplace(std::move(j), re);
  }
  if (law.captured_mass < min_captured)
    throw Error(Errc::GridTooCoarse, "grid " + std::to_string(grid) + " captures mass " +
                                         std::to_string(law.captured_mass) + " < " +
                                         std::to_string(min_captured));
  return law;
}

HomologyLaw homology_distribution_adaptive(const ChainKernel &kernel, const CycleBasis &basis,
                                           double alpha, std::size_t initial_grid,
                                           double min_captured, double cauchy_tol) {
  if (basis.size() > kMaxAdaptiveDimension)
    throw Error(Errc::TooLarge, "adaptive grid supports at most " +
                                    std::to_string(kMaxAdaptiveDimension) + " cycles");
  if (basis.size() == 0)
    return homology_distribution(kernel, basis, alpha, initial_grid);
  std::optional<HomologyLaw> previous;
  for (std::size_t m = initial_grid; m <= kMaxAdaptiveGrid; m *= 2) {
    HomologyLaw law = homology_distribution(kernel, basis, alpha, m, DualKind::Indicator, 0.0);
    if (previous && law.captured_mass >= min_captured) {
      double change = 0.0;
      for (const auto &[j, p] : law.probability)
        change = std::max(change, std::abs(p - previous->at(j)));
      for (const auto &[j, p] : previous->probability)
        change = std::max(change, std::abs(p - law.at(j)));
      if (change <= cauchy_tol)
        return law;
    }
    previous = std::move(law);
  }
  throw Error(Errc::GridTooCoarse, "grid doubling did not converge by M = " +
                                       std::to_string(kMaxAdaptiveGrid));
}

Report verify_homology_law(const ChainKernel &kernel, double alpha, std::size_t grid,
                           const CheckOptions &opts, double tv_threshold, double symmetry_tol) {
  const CycleBasis basis = cycle_basis(kernel.graph());
  const HomologyLaw law = homology_distribution(kernel, basis, alpha, grid, DualKind::Indicator, 0.0);

  double asymmetry = 0.0;
  for (const auto &[j, p] : law.probability)
    asymmetry = std::max(asymmetry, std::abs(p - law.at(negated(j))));

  const auto kind = alpha == 1.0 ? opts.sampler : SamplerKind::Direct;
  const auto nets = sample_networks(kernel, kind, alpha, opts.replicas,
                                    derive_seed(opts.seed, "homology"), opts.workers,
                                    opts.tail_cut);
  std::vector<HomologyClass> classes;
  classes.reserve(nets.size());
  for (const auto &k : nets)
    classes.push_back(network_homology_class(k, basis));
  const auto empirical = empirical_pmf(classes);
  const double tv = total_variation(empirical, law.probability);

  const HomologyClass zero{std::vector<std::int64_t>(basis.size(), 0)};
  const double p0 = law.at(zero);
  const auto it = empirical.find(zero);
  const double f0 = it == empirical.end() ? 0.0 : it->second;

  Report report("homology-dist");
  report.meta()["alpha"] = alpha;
  report.meta()["grid"] = grid;
  report.meta()["cycles"] = basis.size();
  report.meta()["captured_mass"] = law.captured_mass;
  report.meta()["max_imaginary"] = law.max_imaginary;
  report.meta()["clipped_negative"] = law.clipped_negative;
  report.meta()["replicas"] = opts.replicas;
  report.add_distance("discarded-mass", 1.0 - law.captured_mass, 1e-3);
  report.add_distance("symmetry", asymmetry, symmetry_tol);
  report.add_distance("tv", tv, tv_threshold);
  report.add_z("P(0)", f0, p0,
               std::sqrt(p0 * (1.0 - p0) / static_cast<double>(opts.replicas)), opts.z_threshold);
  auto &residue = report.add_distance("residue", std::max(law.max_imaginary, law.clipped_negative), 1e-10);
  residue.gated = false;
  return report;
}

Report verify_jacobian(const WeightedGraph &g, double rel_tol) {
  const Routes r = volume_routes(g);
  Report report("jacobian");
  report.meta()["cycles"] = r.cycles;
  report.meta()["via_intersection"] = r.via_intersection;
  report.meta()["via_trees"] = r.via_trees;
  if (r.cycles == 0) {
    report.meta()["degenerate"] = true;
    report.meta()["value"] = 1.0;
    return report;
  }
  report.meta()["degenerate"] = false;
  report.add_exact("relative-difference", std::abs(r.via_intersection - r.via_trees) / r.via_trees,
                   0.0, rel_tol);
  return report;
}

} // namespace loopsoup
