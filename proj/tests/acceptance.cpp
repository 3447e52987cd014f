// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"
#include "loopsoup/field.hpp"
#include "loopsoup/homology.hpp"
#include "loopsoup/networks.hpp"
#include "loopsoup/soup.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace loopsoup;

namespace {

constexpr std::size_t kReplicas = 100000;
constexpr double kTv = 0.02;
constexpr double kZ = 3.0;
constexpr double kKsSingle = 0.01;
constexpr double kKsRayKnight = 0.02;
constexpr double kExact = 1e-10;
constexpr double kMuBudget = 1e-6;
constexpr double kConvolution = 1e-6;
constexpr double kJacobianRel = 1e-10;
constexpr double kHomologyMass = 0.999;
constexpr double kHomologySymmetry = 1e-8;
constexpr double kGeometricSeconds = 60.0;
constexpr double kHomologySeconds = 120.0;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what) {
    if (!ok)
      pass = false;
    if (detail.tellp() > 0)
      detail << "; ";
    detail << what << (ok ? "" : " FAILED");
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

WeightedGraph two_point() {
  return WeightedGraph::from_edges({"a", "b"}, {{"a", "b", 1.0}}, {{"a", 1.0}, {"b", 1.0}});
}

WeightedGraph triangle() {
  return WeightedGraph::from_edges({"a", "b", "c"},
                                   {{"a", "b", 1.0}, {"b", "c", 1.0}, {"a", "c", 1.0}},
                                   {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
}

WeightedGraph path3() {
  return WeightedGraph::from_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}},
                                   {{"a", 1.0}});
}

CheckOptions options(std::uint64_t seed) {
  CheckOptions o;
  o.replicas = kReplicas;
  o.seed = seed;
  o.z_threshold = kZ;
  return o;
}

/// Worst gated statistic of a report, as text.
void require_report(Verdict &v, const Report &r, const std::string &label) {
  for (const auto &s : r.statistics()) {
    if (!s.gated)
      continue;
    const std::string value = s.z ? "z=" + fmt(*s.z) : fmt(s.lhs);
    if (!s.pass)
      v.require(false, label + "/" + s.name + " " + value);
  }
  if (r.passed())
    v.require(true, label + " ok");
}

/// TV between the empirical law of N_ab and a pmf on the integers.
double nab_tv(const std::vector<Network> &nets, const std::function<double(int)> &pmf) {
  std::map<long, double> freq;
  for (const auto &k : nets)
    freq[static_cast<long>(k(0, 1))] += 1.0 / static_cast<double>(nets.size());
  double dist = 0.0, covered = 0.0;
  for (const auto &[n, f] : freq) {
    const double p = pmf(static_cast<int>(n));
    dist += std::abs(f - p);
    covered += p;
  }
  return 0.5 * (dist + (1.0 - covered));
}

double neg_binomial(double alpha, int n) {
  return std::exp(std::lgamma(alpha + n) - std::lgamma(alpha) - std::lgamma(n + 1.0) +
                  n * std::log(0.25) + alpha * std::log(0.75));
}

std::uint64_t brute_tours(const Network &k) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t x = 0; x < k.size(); ++x)
    for (std::size_t y = 0; y < k.size(); ++y)
      for (Network::count_type i = 0; i < k(x, y); ++i)
        arcs.emplace_back(x, y);
  std::vector<char> used(arcs.size(), 0);
  std::uint64_t count = 0;
  std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t at,
                                                                        std::size_t start,
                                                                        std::size_t depth) {
    if (depth == arcs.size()) {
      count += at == start;
      return;
    }
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (!used[a] && arcs[a].first == at) {
        used[a] = 1;
        walk(arcs[a].second, start, depth + 1);
        used[a] = 0;
      }
  };
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    used[a] = 1;
    walk(arcs[a].second, arcs[a].first, 1);
    used[a] = 0;
  }
  return count;
}

Network random_eulerian(std::mt19937_64 &rng, std::size_t n, std::size_t max_total) {
  Network k(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (k.total() < 2) {
    k = Network(n);
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

WeightedGraph random_graph(std::mt19937_64 &rng, std::size_t n, std::size_t extra) {
  std::uniform_real_distribution<double> cond(0.1, 10.0);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i)
    names.push_back("v" + std::to_string(i));
  std::vector<EdgeSpec> edges;
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  for (std::size_t i = 1; i < n; ++i) {
    const auto j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    edges.push_back({names[i], names[j], cond(rng)});
    present[i][j] = present[j][i] = 1;
  }
  for (std::size_t added = 0, tries = 0; added < extra && tries < 1000; ++tries) {
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

// criteria

void geometric(Verdict &v, double &) {
  const auto k = build_kernel(two_point());
  for (auto kind : {SamplerKind::Wilson, SamplerKind::Direct}) {
    const auto nets = sample_networks(k, kind, 1.0, kReplicas, 101, 0);
    const double tv = nab_tv(nets, [](int n) { return 0.75 * std::pow(0.25, n); });
    v.require(tv < kTv, std::string(kind == SamplerKind::Wilson ? "wilson" : "direct") +
                            " TV=" + fmt(tv));
  }
}

void negative_binomial(Verdict &v, double &) {
  const auto k = build_kernel(two_point());
  std::uint64_t seed = 201;
  for (double alpha : {0.5, 2.0}) {
    const auto nets = sample_networks(k, SamplerKind::Direct, alpha, kReplicas, seed++, 0);
    const double tv = nab_tv(nets, [alpha](int n) { return neg_binomial(alpha, n); });
    v.require(tv < kTv, "alpha=" + fmt(alpha) + " TV=" + fmt(tv));
  }
}

void alpha_routes(Verdict &v, double &) {
  for (const auto &[name, g] : {std::pair{"two-point", two_point()}, std::pair{"triangle", triangle()}}) {
    const auto k = build_kernel(g);
    double worst = 0.0;
    std::size_t count = 0;
    for (const auto &e : enumerate_eulerian(k, 1e-6, {.max_total = 64})) {
      if (e.network.total() > 6)
        continue;
      worst = std::max(worst, std::abs(exact_network_prob_alpha(k, e.network, 1.0) - e.probability));
      ++count;
    }
    v.require(worst <= kExact && count > 0,
              std::string(name) + " " + std::to_string(count) + " networks max err=" + fmt(worst));
  }
}

void generating(Verdict &v, double &) {
  const auto k = build_kernel(triangle());
  Engine rng = make_stream(401);
  std::uint64_t seed = 410;
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    const auto z = random_modifier(k.graph(), rng);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const auto r = verify_generating_function(k, z, alpha, options(seed++));
      for (const auto &s : r.statistics())
        if (s.gated && s.z)
          worst = std::max(worst, std::abs(*s.z));
      ok = ok && r.passed();
    }
  }
  v.require(ok, "15 cases max |z|=" + fmt(worst));
}

void isomorphism(Verdict &v, double &) {
  const auto tri = build_kernel(triangle());
  const auto r = verify_isomorphism(tri, options(501));
  double worst = 0.0;
  bool ok = true;
  for (const auto &s : r.statistics())
    if (s.gated && s.name.starts_with("half/m") && s.name.find(',') == std::string::npos) {
      worst = std::max(worst, std::abs(s.z.value()));
      ok = ok && std::abs(s.z.value()) < kZ;
    }
  v.require(ok, "triangle moments 1-4 max |z|=" + fmt(worst));
  v.require(r.passed(), "triangle full report");

  auto single_opts = options(502);
  const auto single = verify_isomorphism(
      build_kernel(WeightedGraph::from_edges({"a"}, {}, {{"a", 1.0}})), single_opts, kKsSingle);
  const double ks = single.find("half/ks-exact/soup").lhs;
  v.require(ks < kKsSingle, "single-vertex exact KS=" + fmt(ks));
}

void ray_knight(Verdict &v, double &) {
  auto opts = options(601);
  opts.ks_threshold = kKsRayKnight;
  const auto r = ray_knight_check(build_kernel(path3()), 0, 1.0, opts);
  for (const char *name : {"ks/b", "ks/c"}) {
    const double ks = r.find(name).lhs;
    v.require(ks < kKsRayKnight, std::string(name) + "=" + fmt(ks));
  }
  v.require(r.passed(), "gated moments");
}

void moments(Verdict &v, double &) {
  const auto k = build_kernel(two_point());
  struct Case {
    std::vector<DirectedEdge> edges;
    std::vector<std::size_t> points;
    double expected;
    const char *label;
  };
  std::uint64_t seed = 701;
  for (const auto &c : {Case{{{0, 1}}, {}, 1.0 / 3, "E[N_ab]"}, Case{{}, {0}, 4.0 / 3, "E[N_a+1]"},
                        Case{{{0, 1}, {1, 0}}, {}, 5.0 / 9, "E[N_ab N_ba]"}}) {
    const double closed = wick_moment(k, c.edges, c.points);
    const auto r = verify_moment_formula(k, c.edges, c.points, options(seed++));
    const auto &s = r.find("soups/" + r.meta()["observable"].get<std::string>());
    v.require(std::abs(closed - c.expected) < 1e-12 && std::abs(s.z.value()) < kZ,
              std::string(c.label) + " mc=" + fmt(s.lhs) + " z=" + fmt(*s.z));
  }
}

void det_identity(Verdict &v, double &) {
  const auto k = build_kernel(two_point());
  std::uint64_t seed = 801;
  for (const auto &[scale, expected] : {std::pair{1.0, 5.0 / 3}, std::pair{2.0, 75.0 / 9}}) {
    const Vector chi = scale * k.lambda();
    const double rhs = det_identity_rhs(k, chi);
    const auto r = verify_det_identity(k, chi, options(seed++));
    const auto &s = r.find("normalized-diagonal");
    v.require(std::abs(rhs - expected) < 1e-12 && std::abs(s.z.value()) < kZ,
              "chi=" + fmt(scale) + "lambda mc=" + fmt(s.lhs) + " exact=" + fmt(rhs) +
                  " z=" + fmt(*s.z));
  }
}

void best(Verdict &v, double &) {
  std::mt19937_64 rng(901);
  int compared = 0, equal = 0;
  for (int trial = 0; trial < 500 && compared < 30; ++trial) {
    const Network k = random_eulerian(rng, 2 + trial % 3, 8);
    if (!k.support_connected() || k.total() > 8)
      continue;
    ++compared;
    equal += best_tour_count(k) == brute_tours(k);
  }
  v.require(compared >= 20 && equal == compared,
            std::to_string(equal) + "/" + std::to_string(compared) + " equal");
}

void mu_measure(Verdict &v, double &) {
  for (const auto &[name, g] : {std::pair{"two-point", two_point()}, std::pair{"triangle", triangle()}}) {
    const auto k = build_kernel(g);
    const auto total = verify_mu_total(k, kMuBudget, kMuBudget);
    const double err = std::abs(total.find("sum-mu").lhs - total.find("sum-mu").rhs);
    v.require(total.passed(), std::string(name) + " |sum mu + log det|=" + fmt(err));
    const auto conv = verify_poisson_convolution(k, kMuBudget, kConvolution);
    const double conv_err = conv.find("max-abs-error").lhs;
    v.require(conv.passed() && conv_err < kConvolution,
              std::string(name) + " convolution err=" + fmt(conv_err));
  }
}

void jacobian(Verdict &v, double &) {
  std::mt19937_64 rng(1101);
  int graphs = 0;
  double worst = 0.0;
  bool ok = true;
  while (graphs < 20) {
    const std::size_t n = 3 + static_cast<std::size_t>(graphs % 4);
    const auto g = random_graph(rng, n, 1 + static_cast<std::size_t>(graphs % 4));
    const auto cycles = cycle_basis(g).size();
    if (cycles < 1 || cycles > 4)
      continue;
    const auto r = verify_jacobian(g, kJacobianRel);
    worst = std::max(worst, r.find("relative-difference").lhs);
    ok = ok && r.passed();
    ++graphs;
  }
  v.require(ok, "20 graphs max rel diff=" + fmt(worst));
}

void homology(Verdict &v, double &elapsed) {
  const auto start = std::chrono::steady_clock::now();
  const auto k = build_kernel(triangle());
  const auto r = verify_homology_law(k, 1.0, 64, options(1201), kTv, kHomologySymmetry);
  elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double captured = 1.0 - r.find("discarded-mass").lhs;
  v.require(captured >= kHomologyMass, "captured=" + fmt(captured));
  v.require(r.find("symmetry").lhs <= kHomologySymmetry, "symmetry=" + fmt(r.find("symmetry").lhs));
  v.require(r.find("tv").lhs < kTv, "TV=" + fmt(r.find("tv").lhs));
  require_report(v, r, "report");
  v.require(elapsed < kHomologySeconds, "runtime=" + fmt(elapsed) + "s");
}

void samplers(Verdict &v, double &) {
  const auto r = compare_samplers(build_kernel(triangle()), options(1301), kTv);
  const auto &tv = r.find("tv");
  v.require(tv.lhs < kTv, "TV=" + fmt(tv.lhs));
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    void (*body)(Verdict &, double &);
    double limit_seconds;
  };
  const std::vector<Criterion> criteria{
      {1, "geometric law of N_ab", geometric, kGeometricSeconds},
      {2, "negative binomial law", negative_binomial, 0},
      {3, "alpha-permanent route vs factorial formula", alpha_routes, 0},
      {4, "generating function vs determinant ratio", generating, 0},
      {5, "isomorphism moments and single-vertex KS", isomorphism, 0},
      {6, "Ray-Knight identity on the path", ray_knight, 0},
      {7, "moment formula", moments, 0},
      {8, "determinant identity", det_identity, 0},
      {9, "BEST theorem vs tour enumeration", best, 0},
      {10, "mu total mass and Poisson convolution", mu_measure, 0},
      {11, "Jacobian volume two routes", jacobian, 0},
      {12, "homology distribution", homology, 0},
      {13, "Wilson vs direct sampler", samplers, 0},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    Verdict v;
    double inner = 0.0;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v, inner);
    } catch (const std::exception &e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0)
      v.require(secs < c.limit_seconds, "runtime limit " + fmt(c.limit_seconds) + "s");
    failures += !v.pass;
    std::printf("[%s] criterion %2d %-44s %7.2fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
