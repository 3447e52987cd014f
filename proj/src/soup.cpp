#include "loopsoup/soup.hpp"

#include "loopsoup/error.hpp"

#include <algorithm>
#include <cmath>

namespace loopsoup {

namespace {

std::size_t draw_index(const std::vector<double> &cdf, Engine &rng) {
  std::uniform_real_distribution<double> u(0.0, cdf.back());
  const double target = u(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end())
    --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

/// Cumulative step distribution out of x: neighbors in order, then the
/// cemetery with weight kappa_x.
struct StepTable {
  std::vector<std::vector<std::size_t>> targets;
  std::vector<std::vector<double>> cdf;

  explicit StepTable(const ChainKernel &k) {
    const auto &g = k.graph();
    targets.resize(g.size());
    cdf.resize(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
      double acc = 0.0;
      for (auto y : g.neighbors(x)) {
        acc += g.conductance(x, y);
        targets[x].push_back(y);
        cdf[x].push_back(acc);
      }
      acc += g.killing()(x);
      targets[x].push_back(g.size()); // cemetery
      cdf[x].push_back(acc);
    }
  }

  std::size_t step(std::size_t x, Engine &rng) const {
    return targets[x][draw_index(cdf[x], rng)];
  }
};

/// Splits the based loop path[a..b] (both ends at the base vertex) by
/// uniform stick-breaking of its base-point local time.
void split_based_loop(const std::vector<std::size_t> &path,
                      const std::vector<double> &times, std::size_t a, std::size_t b,
                      Engine &rng, LoopSoup &soup) {
  const std::size_t base = path[a];
  std::vector<std::size_t> visits;
  for (std::size_t t = a; t <= b; ++t)
    if (path[t] == base)
      visits.push_back(t);
  const std::size_t r = visits.size() - 1; // number of excursions

  // local time at the base when excursion i (1-based) starts
  std::vector<double> start(r + 1, 0.0);
  double total = times[visits[0]];
  for (std::size_t i = 1; i <= r; ++i) {
    start[i] = total;
    total += times[visits[i]];
  }
  if (r == 0) {
    soup.trivial_time(base) += total;
    return;
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double cut = 0.0;
  double remaining = total;
  std::size_t next = 1;
  while (next <= r) {
    const double len = remaining * unif(rng);
    const double end = cut + len;
    std::size_t last = next;
    while (last <= r && start[last] < end)
      ++last;
    if (last == next) {
      soup.trivial_time(base) += len;
    } else {
      BasedLoop loop;
      loop.vertices.push_back(base);
      loop.holding_times.push_back((start[next] - cut) + (end - start[last - 1]));
      for (std::size_t i = next; i < last; ++i) {
        for (std::size_t t = visits[i - 1] + 1; t < visits[i]; ++t) {
          loop.vertices.push_back(path[t]);
          loop.holding_times.push_back(times[t]);
        }
        if (i + 1 < last) {
          loop.vertices.push_back(base);
          loop.holding_times.push_back(start[i + 1] - start[i]);
        }
      }
      canonicalize(loop);
      soup.loops.push_back(std::move(loop));
    }
    cut = end;
    remaining -= len;
    next = last;
  }
  soup.trivial_time(base) += remaining;
}

} // namespace

void canonicalize(BasedLoop &loop) {
  if (loop.vertices.empty())
    return;
  const auto it = std::min_element(loop.vertices.begin(), loop.vertices.end());
  const auto shift = it - loop.vertices.begin();
  std::rotate(loop.vertices.begin(), it, loop.vertices.end());
  std::rotate(loop.holding_times.begin(), loop.holding_times.begin() + shift,
              loop.holding_times.end());
}

nlohmann::json LoopSoup::to_json(const WeightedGraph &g) const {
  nlohmann::json doc;
  doc["alpha"] = alpha;
  doc["loops"] = nlohmann::json::array();
  for (const auto &l : loops) {
    std::vector<std::string> names;
    for (auto v : l.vertices)
      names.push_back(g.name(v));
    doc["loops"].push_back({{"vertices", names}, {"holding_times", l.holding_times}});
  }
  doc["trivial_time"] = nlohmann::json::object();
  for (std::size_t x = 0; x < g.size(); ++x)
    doc["trivial_time"][g.name(x)] = trivial_time(static_cast<Eigen::Index>(x));
  return doc;
}

WilsonSample wilson_sample(const ChainKernel &kernel, Engine &rng) {
  const auto n = kernel.size();
  const StepTable table(kernel);
  std::exponential_distribution<double> hold(1.0);

  WilsonSample out;
  out.tree.parent.assign(n, kCemetery);
  out.soup.alpha = 1.0;
  out.soup.trivial_time = Vector::Zero(static_cast<Eigen::Index>(n));

  std::vector<char> in_tree(n, 0);
  std::vector<std::size_t> path;
  std::vector<double> times;
  std::vector<std::size_t> last_visit(n);

  for (std::size_t s = 0; s < n; ++s) {
    if (in_tree[s])
      continue;
    path.clear();
    times.clear();
    std::size_t x = s;
    std::size_t hit;
    for (;;) {
      path.push_back(x);
      times.push_back(hold(rng));
      const auto y = table.step(x, rng);
      if (y == n || in_tree[y]) {
        hit = y;
        break;
      }
      x = y;
    }
    for (std::size_t t = 0; t < path.size(); ++t)
      last_visit[path[t]] = t;

    // last-exit decomposition: loop-erased path y_0 y_1 ... and the based
    // loop at each y_j between its first and last visit
    std::size_t a = 0;
    while (a < path.size()) {
      const auto y = path[a];
      const auto b = last_visit[y];
      split_based_loop(path, times, a, b, rng, out.soup);
      in_tree[y] = 1;
      const std::size_t next = b + 1 < path.size() ? path[b + 1] : hit;
      out.tree.parent[y] = next == n ? kCemetery : static_cast<std::ptrdiff_t>(next);
      a = b + 1;
    }
  }
  return out;
}

WilsonSample wilson_sample(const ChainKernel &kernel, std::uint64_t seed) {
  Engine rng = make_stream(seed);
  return wilson_sample(kernel, rng);
}

DirectSampler::DirectSampler(const ChainKernel &kernel, double tail_cut)
    : size_(kernel.size()), tail_cut_(tail_cut) {
  if (!(tail_cut > 0.0))
    throw Error(Errc::BadInput, "tail cut must be positive");
  total_mass_ = mu_mass_nontrivial(kernel);
  const Matrix &p = kernel.transition();
  Matrix power = p;
  double partial = 0.0;
  while (total_mass_ - partial > tail_cut_) {
    const auto len = powers_.size() + 1;
    if (len > kMaxLoopLength)
      throw Error(Errc::TailTooHeavy, "loop-length tail above " + std::to_string(tail_cut_) +
                                          " needs loops longer than " +
                                          std::to_string(kMaxLoopLength));
    partial += power.trace() / static_cast<double>(len);
    length_cdf_.push_back(partial);
    powers_.push_back(power);
    power = power * p;
  }
  truncated_mass_ = partial;
}

BasedLoop DirectSampler::sample_loop(std::size_t n, Engine &rng) const {
  const Matrix &pn = powers_[n - 1];
  const Matrix &p = powers_[0];
  const auto size = static_cast<std::size_t>(p.rows());
  std::exponential_distribution<double> hold(1.0);

  std::vector<double> cdf(size);
  double acc = 0.0;
  for (std::size_t x = 0; x < size; ++x)
    cdf[x] = acc += pn(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x));
  const std::size_t root = draw_index(cdf, rng);

  BasedLoop loop;
  loop.vertices.reserve(n);
  loop.vertices.push_back(root);
  std::size_t x = root;
  for (std::size_t j = 1; j < n; ++j) {
    const Matrix &rest = powers_[n - j - 1];
    acc = 0.0;
    for (std::size_t y = 0; y < size; ++y)
      cdf[y] = acc += p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) *
                      rest(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(root));
    x = draw_index(cdf, rng);
    loop.vertices.push_back(x);
  }
  loop.holding_times.resize(n);
  for (auto &t : loop.holding_times)
    t = hold(rng);
  canonicalize(loop);
  return loop;
}

LoopSoup DirectSampler::sample(double alpha, Engine &rng) const {
  if (!(alpha > 0.0))
    throw Error(Errc::BadInput, "alpha must be positive");
  LoopSoup soup;
  soup.alpha = alpha;
  if (!powers_.empty()) {
    std::poisson_distribution<long> count(alpha * truncated_mass_);
    const long k = count(rng);
    soup.loops.reserve(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i)
      soup.loops.push_back(sample_loop(draw_index(length_cdf_, rng) + 1, rng));
  }
  std::gamma_distribution<double> gamma(alpha, 1.0);
  soup.trivial_time = Vector(static_cast<Eigen::Index>(size_));
  for (auto &t : soup.trivial_time)
    t = gamma(rng);
  return soup;
}

LoopSoup direct_sample(const ChainKernel &kernel, double alpha, double tail_cut,
                       std::uint64_t seed) {
  DirectSampler sampler(kernel, tail_cut);
  Engine rng = make_stream(seed);
  return sampler.sample(alpha, rng);
}

OccupationField occupation(const LoopSoup &soup, const ChainKernel &kernel) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Vector time = soup.trivial_time.size() == n ? soup.trivial_time : Vector::Zero(n);
  for (const auto &l : soup.loops)
    for (std::size_t i = 0; i < l.vertices.size(); ++i)
      time(static_cast<Eigen::Index>(l.vertices[i])) += l.holding_times[i];
  return time.cwiseQuotient(kernel.lambda());
}

JumpMatrix jump_matrix(const LoopSoup &soup, std::size_t vertex_count) {
  Network k(vertex_count);
  for (const auto &l : soup.loops) {
    const auto p = l.vertices.size();
    if (p < 2)
      continue;
    for (std::size_t i = 0; i < p; ++i)
      k(l.vertices[i], l.vertices[(i + 1) % p]) += 1;
  }
  return k;
}

double mu_mass_nontrivial(const ChainKernel &kernel) {
  return -std::log(kernel.det_i_minus_p());
}

std::vector<SoupObservables> sample_observables(const ChainKernel &kernel,
                                                SamplerKind kind, double alpha,
                                                std::size_t replicas,
                                                std::uint64_t seed, unsigned workers,
                                                double tail_cut) {
  if (kind == SamplerKind::Wilson) {
    if (alpha != 1.0)
      throw Error(Errc::BadInput, "the Wilson route samples alpha = 1 only");
    return map_replicas<SoupObservables>(replicas, seed, workers,
                                         [&](std::size_t, Engine &rng) {
                                           const auto s = wilson_sample(kernel, rng);
                                           return SoupObservables{
                                               jump_matrix(s.soup, kernel.size()),
                                               occupation(s.soup, kernel)};
                                         });
  }
  const DirectSampler sampler(kernel, tail_cut);
  return map_replicas<SoupObservables>(
      replicas, seed, workers, [&](std::size_t, Engine &rng) {
        const LoopSoup soup = sampler.sample(alpha, rng);
        return SoupObservables{jump_matrix(soup, kernel.size()), occupation(soup, kernel)};
      });
}

} // namespace loopsoup
