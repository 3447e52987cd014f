#include "loopsoup/networks.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"
#include "loopsoup/stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <unordered_map>

namespace loopsoup {

namespace {

using count_t = Network::count_type;

void check_size(const ChainKernel &kernel, const Network &k) {
  if (k.size() != kernel.size())
    throw Error(Errc::BadInput, "network size " + std::to_string(k.size()) +
                                    " does not match the graph (" +
                                    std::to_string(kernel.size()) + " vertices)");
}

void require_eulerian(const Network &k) {
  if (!k.is_eulerian())
    throw Error(Errc::NotEulerian, "network is not balanced (in-degree != out-degree)");
}

/// log prod P^k, or -inf when k uses an edge with P = 0.
double log_transition_product(const ChainKernel &kernel, const Network &k) {
  double acc = 0.0;
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = 0; y < k.size(); ++y) {
      const auto kxy = k(x, y);
      if (kxy == 0)
        continue;
      const double p = kernel.p(x, y);
      if (p <= 0.0)
        return -std::numeric_limits<double>::infinity();
      acc += static_cast<double>(kxy) * std::log(p);
    }
  return acc;
}

double log_factorial(count_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  if (r > std::numeric_limits<std::uint64_t>::max())
    throw Error(Errc::TooLarge, "tour count overflows 64 bits");
  return static_cast<std::uint64_t>(r);
}

/// Directed edges of the graph in a fixed order.
std::vector<std::pair<std::size_t, std::size_t>> directed_edges(const WeightedGraph &g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto &[u, v] : g.edges()) {
    out.emplace_back(u, v);
    out.emplace_back(v, u);
  }
  return out;
}

/// Depth-first enumeration of Eulerian networks with total exactly m. The
/// last edge touching a vertex has its value forced by balance there.
class LevelEnumerator {
public:
  explicit LevelEnumerator(const WeightedGraph &g)
      : n_(g.size()), edges_(directed_edges(g)), last_at_(g.size(), -1) {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      last_at_[edges_[i].first] = static_cast<std::ptrdiff_t>(i);
      last_at_[edges_[i].second] = static_cast<std::ptrdiff_t>(i);
    }
  }

  std::vector<Network> level(count_t m) {
    out_.clear();
    current_ = Network(n_);
    balance_.assign(n_, 0);
    if (edges_.empty()) {
      if (m == 0)
        out_.push_back(current_);
      return out_;
    }
    descend(0, m);
    return out_;
  }

private:
  void descend(std::size_t i, count_t remaining) {
    if (i == edges_.size()) {
      if (remaining == 0)
        out_.push_back(current_);
      return;
    }
    const auto [u, v] = edges_[i];
    std::optional<count_t> forced;
    auto force = [&](count_t value) {
      if (forced && *forced != value)
        return false;
      forced = value;
      return true;
    };
    // balance_[x] = in - out so far
    if (last_at_[u] == static_cast<std::ptrdiff_t>(i) && !force(balance_[u]))
      return;
    if (last_at_[v] == static_cast<std::ptrdiff_t>(i) && !force(-balance_[v]))
      return;
    if (i + 1 == edges_.size() && !force(remaining))
      return;

    auto assign = [&](count_t value) {
      current_(u, v) = value;
      balance_[u] -= value;
      balance_[v] += value;
      descend(i + 1, remaining - value);
      balance_[u] += value;
      balance_[v] -= value;
      current_(u, v) = 0;
    };
    if (forced) {
      if (*forced >= 0 && *forced <= remaining)
        assign(*forced);
      return;
    }
    for (count_t value = 0; value <= remaining; ++value)
      assign(value);
  }

  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::ptrdiff_t> last_at_;
  Network current_;
  std::vector<count_t> balance_;
  std::vector<Network> out_;
};

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 0.01))
    throw Error(Errc::BadInput, "mass budget delta must lie in (0, 0.01]");
}

} // namespace

ModifierMatrix::ModifierMatrix(CMatrix entries) : z_(std::move(entries)) {
  if (z_.rows() != z_.cols())
    throw Error(Errc::BadInput, "modifier matrix must be square");
  constexpr double tol = 1e-12;
  for (Eigen::Index x = 0; x < z_.rows(); ++x) {
    z_(x, x) = 1.0;
    for (Eigen::Index y = 0; y < z_.cols(); ++y) {
      if (x == y)
        continue;
      const double m = std::abs(z_(x, y));
      if (!(m > 0.0) || m > 1.0 + tol)
        throw Error(Errc::BadInput, "modifier entries must satisfy 0 < |Z| <= 1");
      if (std::abs(z_(y, x) - std::conj(z_(x, y))) > tol)
        throw Error(Errc::BadInput, "modifier matrix must be Hermitian");
    }
  }
}

ModifierMatrix ModifierMatrix::identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return ModifierMatrix(CMatrix::Ones(m, m));
}

ModifierMatrix ModifierMatrix::from_one_form(const WeightedGraph &g, const OneForm &omega) {
  check_one_form(g, omega);
  const auto n = static_cast<Eigen::Index>(g.size());
  CMatrix z(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      z(x, y) = std::polar(1.0, 2.0 * std::numbers::pi * omega(x, y));
  return ModifierMatrix(std::move(z));
}

std::complex<double> generating_function(const ChainKernel &kernel, const ModifierMatrix &z,
                                         double alpha) {
  if (z.size() != kernel.size())
    throw Error(Errc::BadInput, "modifier size does not match the graph");
  if (!(alpha > 0.0))
    throw Error(Errc::BadInput, "alpha must be positive");
  const auto n = static_cast<Eigen::Index>(kernel.size());
  const CMatrix twisted = CMatrix::Identity(n, n) -
                          CMatrix(kernel.transition().cast<std::complex<double>>().cwiseProduct(
                              z.entries()));
  const std::complex<double> det = det_complex(twisted);
  if (std::abs(det) < 1e-14)
    throw Error(Errc::SingularTwist, "det(I - P^Z) vanishes");
  return std::pow(det / kernel.det_i_minus_p(), -alpha);
}

double exact_network_prob_alpha1(const ChainKernel &kernel, const Network &k) {
  check_size(kernel, k);
  require_eulerian(k);
  double log_p = std::log(kernel.det_i_minus_p()) + log_transition_product(kernel, k);
  for (std::size_t x = 0; x < k.size(); ++x) {
    log_p += log_factorial(k.out_degree(x));
    for (std::size_t y = 0; y < k.size(); ++y)
      log_p -= log_factorial(k(x, y));
  }
  return std::exp(log_p);
}

double exact_network_prob_alpha(const ChainKernel &kernel, const Network &k, double alpha) {
  check_size(kernel, k);
  require_eulerian(k);
  if (!(alpha > 0.0))
    throw Error(Errc::BadInput, "alpha must be positive");
  if (k.total() > kAlphaRouteMaxTotal)
    throw Error(Errc::TooLarge, "alpha-permanent route is limited to |k| <= " +
                                    std::to_string(kAlphaRouteMaxTotal));
  const double base = std::pow(kernel.det_i_minus_p(), alpha);
  if (k.is_zero())
    return base;
  const double weight = std::exp(log_transition_product(kernel, k));
  if (weight == 0.0)
    return 0.0;

  // repeated index set: vertex x appears k_x times
  std::vector<std::size_t> owner;
  for (std::size_t x = 0; x < k.size(); ++x)
    for (count_t r = 0; r < k.out_degree(x); ++r)
      owner.push_back(x);
  const std::size_t m = owner.size();

  Network left = k; // edge usage still to be matched
  std::vector<std::size_t> image(m);
  std::vector<char> used(m, 0);
  double coefficient = 0.0;

  auto cycles = [&] {
    std::vector<char> seen(m, 0);
    int c = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (seen[i])
        continue;
      ++c;
      for (std::size_t j = i; !seen[j]; j = image[j])
        seen[j] = 1;
    }
    return c;
  };
  auto descend = [&](auto &&self, std::size_t i) -> void {
    if (i == m) {
      coefficient += std::pow(alpha, cycles());
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || left(owner[i], owner[j]) == 0)
        continue;
      used[j] = 1;
      --left(owner[i], owner[j]);
      image[i] = j;
      self(self, i + 1);
      ++left(owner[i], owner[j]);
      used[j] = 0;
    }
  };
  descend(descend, 0);

  double log_sym = 0.0;
  for (std::size_t x = 0; x < k.size(); ++x)
    log_sym += log_factorial(k.out_degree(x));
  return base * weight * coefficient * std::exp(-log_sym);
}

std::vector<NetworkLawEntry> enumerate_eulerian(const ChainKernel &kernel, double delta,
                                                EnumerationLimits limits) {
  check_delta(delta);
  LevelEnumerator levels(kernel.graph());
  std::vector<NetworkLawEntry> out;
  double accumulated = 0.0;
  for (count_t m = 0;; ++m) {
    if (m > limits.max_total)
      throw Error(Errc::BudgetExceeded,
                  "mass budget " + std::to_string(delta) + " not reached by |k| = " +
                      std::to_string(limits.max_total) + " (accumulated " +
                      std::to_string(accumulated) + ")");
    for (auto &k : levels.level(m)) {
      NetworkLawEntry e;
      e.probability = exact_network_prob_alpha1(kernel, k);
      e.mu_mass = k.is_zero() ? 0.0 : mu_network_measure(kernel, k);
      e.network = std::move(k);
      accumulated += e.probability;
      out.push_back(std::move(e));
    }
    if (accumulated >= 1.0 - delta)
      return out;
  }
}

std::uint64_t best_tour_count(const Network &k) {
  require_eulerian(k);
  if (k.is_zero())
    throw Error(Errc::EmptyNetwork, "the zero network has no tours");
  if (!k.support_connected())
    throw Error(Errc::DisconnectedSupport, "network support is not connected");
  const auto support = k.support();
  const auto tau = arborescence_count(k, support.front());
  if (support.size() > 1 && arborescence_count(k, support.back()) != tau)
    throw Error(Errc::MismatchBeyondTolerance,
                "arborescence count depends on the root for a balanced network");
  std::uint64_t count = checked_mul(static_cast<std::uint64_t>(k.total()), tau);
  for (auto x : support)
    for (count_t f = 2; f < k.out_degree(x); ++f)
      count = checked_mul(count, static_cast<std::uint64_t>(f));
  return count;
}

double mu_network_measure(const ChainKernel &kernel, const Network &k) {
  check_size(kernel, k);
  require_eulerian(k);
  if (k.is_zero())
    throw Error(Errc::ZeroNetwork, "mu is not defined at the zero network");
  if (!k.support_connected())
    return 0.0; // no single loop induces a disconnected network
  const double log_w = log_transition_product(kernel, k);
  if (!std::isfinite(log_w))
    return 0.0;
  const auto support = k.support();
  double log_mu = std::log(static_cast<double>(arborescence_count(k, support.front()))) + log_w;
  for (auto x : support)
    log_mu += std::lgamma(static_cast<double>(k.out_degree(x)));
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = 0; y < k.size(); ++y)
      log_mu -= log_factorial(k(x, y));
  return std::exp(log_mu);
}

Report verify_poisson_convolution(const ChainKernel &kernel, double delta, double tolerance,
                                  EnumerationLimits limits) {
  const auto law = enumerate_eulerian(kernel, delta, limits);
  using Level = std::unordered_map<Network, double, NetworkHash>;
  count_t top = 0;
  for (const auto &e : law)
    top = std::max(top, e.network.total());
  const auto levels = static_cast<std::size_t>(top) + 1;

  std::vector<std::vector<std::pair<const Network *, double>>> mu(levels);
  for (const auto &e : law)
    if (!e.network.is_zero())
      mu[static_cast<std::size_t>(e.network.total())].emplace_back(&e.network, e.mu_mass);

  // graded exponential: m F_m = sum_l l mu_l * F_{m-l}
  std::vector<Level> f(levels);
  f[0][Network(kernel.size())] = 1.0;
  for (std::size_t m = 1; m < levels; ++m) {
    for (std::size_t l = 1; l <= m; ++l)
      for (const auto &[a, wa] : mu[l])
        for (const auto &[b, wb] : f[m - l])
          f[m][*a + b] += static_cast<double>(l) * wa * wb;
    for (auto &[k, v] : f[m])
      v /= static_cast<double>(m);
  }

  const double det = kernel.det_i_minus_p();
  double max_error = 0.0, captured = 0.0;
  std::size_t missing = 0;
  for (const auto &e : law) {
    const auto &lvl = f[static_cast<std::size_t>(e.network.total())];
    const auto it = lvl.find(e.network);
    const double rebuilt = it == lvl.end() ? 0.0 : det * it->second;
    if (it == lvl.end())
      ++missing;
    max_error = std::max(max_error, std::abs(rebuilt - e.probability));
    captured += e.probability;
  }
  double zero_entry = 0.0;
  for (const auto &e : law)
    if (e.network.is_zero())
      zero_entry = e.probability;

  Report report("poisson-convolution");
  report.meta()["delta"] = delta;
  report.meta()["support_size"] = law.size();
  report.meta()["max_total"] = top;
  report.meta()["discarded_mass"] = 1.0 - captured;
  report.meta()["unmatched_entries"] = missing;
  report.add_exact("max-abs-error", max_error, 0.0, tolerance);
  report.add_exact("zero-network", zero_entry, det, 1e-15);
  return report;
}

Report verify_mu_total(const ChainKernel &kernel, double delta, double tolerance,
                       EnumerationLimits limits) {
  const auto law = enumerate_eulerian(kernel, delta, limits);
  double total = 0.0;
  for (const auto &e : law)
    total += e.mu_mass;
  const double exact = -std::log(kernel.det_i_minus_p());
  Report report("mu-total");
  report.meta()["delta"] = delta;
  report.meta()["support_size"] = law.size();
  // P(k) >= det(I - P) mu(k), so the discarded mu-mass is at most delta / det(I - P)
  report.meta()["tail_bound"] = delta / kernel.det_i_minus_p();
  report.add_exact("sum-mu", total, exact, tolerance);
  auto &order = report.add_exact("sum-mu<=total", total <= exact + 1e-15 ? 1.0 : 0.0, 1.0, 0.0);
  order.note = "truncated sum never exceeds -log det(I - P)";
  return report;
}

std::int64_t max_flow(const Network &k, const std::vector<std::size_t> &sources,
                      const std::vector<std::size_t> &sinks) {
  const auto n = k.size();
  if (sources.empty() || sinks.empty())
    throw Error(Errc::BadPartition, "source and sink sets must be nonempty");
  std::set<std::size_t> a(sources.begin(), sources.end()), b(sinks.begin(), sinks.end());
  for (auto x : a)
    if (x >= n || b.contains(x))
      throw Error(Errc::BadPartition, "source and sink sets must be disjoint vertex sets");
  for (auto x : b)
    if (x >= n)
      throw Error(Errc::BadPartition, "sink out of range");

  // residual capacities on n vertices plus a super-source s and super-sink t
  const std::size_t s = n, t = n + 1, size = n + 2;
  const auto inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> cap(size * size, 0);
  auto at = [&](std::size_t u, std::size_t v) -> std::int64_t & { return cap[u * size + v]; };
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      at(x, y) = k(x, y);
  for (auto x : a)
    at(s, x) = inf;
  for (auto x : b)
    at(x, t) = inf;

  std::int64_t flow = 0;
  std::vector<std::ptrdiff_t> prev(size);
  for (;;) {
    std::fill(prev.begin(), prev.end(), -1);
    prev[s] = static_cast<std::ptrdiff_t>(s);
    std::deque<std::size_t> queue{s};
    while (!queue.empty() && prev[t] < 0) {
      const auto u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < size; ++v)
        if (prev[v] < 0 && at(u, v) > 0) {
          prev[v] = static_cast<std::ptrdiff_t>(u);
          queue.push_back(v);
        }
    }
    if (prev[t] < 0)
      return flow;
    std::int64_t push = inf;
    for (auto v = t; v != s; v = static_cast<std::size_t>(prev[v]))
      push = std::min(push, at(static_cast<std::size_t>(prev[v]), v));
    for (auto v = t; v != s; v = static_cast<std::size_t>(prev[v])) {
      const auto u = static_cast<std::size_t>(prev[v]);
      at(u, v) -= push;
      at(v, u) += push;
    }
    flow += push;
  }
}

std::vector<Network> sample_networks(const ChainKernel &kernel, SamplerKind kind, double alpha,
                                     std::size_t replicas, std::uint64_t seed,
                                     unsigned workers, double tail_cut) {
  auto obs = sample_observables(kernel, kind, alpha, replicas, seed, workers, tail_cut);
  std::vector<Network> out;
  out.reserve(obs.size());
  for (auto &o : obs)
    out.push_back(std::move(o.jumps));
  return out;
}

Report verify_generating_function(const ChainKernel &kernel, const ModifierMatrix &z,
                                  double alpha, const CheckOptions &opts) {
  const auto exact = generating_function(kernel, z, alpha);
  const auto kind = alpha == 1.0 ? opts.sampler : SamplerKind::Direct;
  const auto nets = sample_networks(kernel, kind, alpha, opts.replicas,
                                    derive_seed(opts.seed, "genfun"), opts.workers,
                                    opts.tail_cut);
  RunningStats re, im;
  for (const auto &k : nets) {
    std::complex<double> v{1.0, 0.0};
    for (std::size_t x = 0; x < k.size(); ++x)
      for (std::size_t y = 0; y < k.size(); ++y)
        if (k(x, y) != 0)
          v *= std::pow(z(x, y), static_cast<int>(k(x, y)));
    re.add(v.real());
    im.add(v.imag());
  }
  Report report("genfun");
  report.meta()["alpha"] = alpha;
  report.meta()["replicas"] = opts.replicas;
  report.meta()["exact"] = {exact.real(), exact.imag()};
  report.add_z("re", re.mean(), exact.real(), re.stderr_mean(), opts.z_threshold);
  report.add_z("im", im.mean(), exact.imag(), im.stderr_mean(), opts.z_threshold);
  return report;
}

ModifierMatrix random_modifier(const WeightedGraph &g, Engine &rng) {
  const auto n = static_cast<Eigen::Index>(g.size());
  CMatrix z = CMatrix::Ones(n, n);
  std::uniform_real_distribution<double> modulus(0.2, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  for (const auto &[u, v] : g.edges()) {
    const auto w = std::polar(modulus(rng), phase(rng));
    z(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = w;
    z(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = std::conj(w);
  }
  return ModifierMatrix(std::move(z));
}

double network_tv(const std::vector<Network> &samples, const std::vector<NetworkLawEntry> &law) {
  std::unordered_map<Network, double, NetworkHash> freq;
  for (const auto &k : samples)
    freq[k] += 1.0 / static_cast<double>(samples.size());
  double sum = 0.0, law_mass = 0.0, matched_freq = 0.0;
  for (const auto &e : law) {
    const auto it = freq.find(e.network);
    const double f = it == freq.end() ? 0.0 : it->second;
    sum += std::abs(f - e.probability);
    law_mass += e.probability;
    matched_freq += f;
  }
  sum += std::abs((1.0 - matched_freq) - std::max(0.0, 1.0 - law_mass));
  return 0.5 * sum;
}

double expected_null_tv(const std::vector<NetworkLawEntry> &law, std::size_t replicas) {
  double s = 0.0;
  for (const auto &e : law)
    s += std::sqrt(e.probability * (1.0 - e.probability));
  return s / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(replicas));
}

Report verify_network_law(const ChainKernel &kernel, const CheckOptions &opts, double delta,
                          double tv_threshold) {
  const auto law = enumerate_eulerian(kernel, delta);
  const auto nets = sample_networks(kernel, opts.sampler, 1.0, opts.replicas,
                                    derive_seed(opts.seed, "network-law"), opts.workers,
                                    opts.tail_cut);
  Report report("network-law");
  report.meta()["alpha"] = 1.0;
  report.meta()["delta"] = delta;
  report.meta()["support_size"] = law.size();
  report.meta()["replicas"] = opts.replicas;
  report.meta()["sampler"] = opts.sampler == SamplerKind::Wilson ? "wilson" : "direct";
  report.meta()["expected_null_tv"] = expected_null_tv(law, opts.replicas);
  report.add_distance("tv", network_tv(nets, law), tv_threshold);
  return report;
}

Report compare_samplers(const ChainKernel &kernel, const CheckOptions &opts,
                        double tv_threshold) {
  const auto wilson = sample_networks(kernel, SamplerKind::Wilson, 1.0, opts.replicas,
                                      derive_seed(opts.seed, "compare/wilson"), opts.workers,
                                      opts.tail_cut);
  const auto direct = sample_networks(kernel, SamplerKind::Direct, 1.0, opts.replicas,
                                      derive_seed(opts.seed, "compare/direct"), opts.workers,
                                      opts.tail_cut);
  const double tv = total_variation(empirical_pmf(wilson), empirical_pmf(direct));
  Report report("sampler-agreement");
  report.meta()["replicas"] = opts.replicas;
  report.meta()["expected_null_tv"] =
      std::sqrt(2.0) * expected_null_tv(enumerate_eulerian(kernel, 1e-3), opts.replicas);
  report.add_distance("tv", tv, tv_threshold);

  RunningStats ow, od;
  for (std::size_t i = 0; i < wilson.size(); ++i) {
    ow.add(static_cast<double>(wilson[i].total()));
    od.add(static_cast<double>(direct[i].total()));
  }
  const double se = std::sqrt(ow.stderr_mean() * ow.stderr_mean() + od.stderr_mean() * od.stderr_mean());
  report.add_z("mean-total-jumps", ow.mean(), od.mean(), se, opts.z_threshold);
  return report;
}

} // namespace loopsoup
