#include "loopsoup/field.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"
#include "loopsoup/stats.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace loopsoup {

namespace {

std::string vname(const ChainKernel &k, std::size_t x) { return k.graph().name(x); }

/// Adds one two-sample z statistic comparing the means of a and b.
Statistic &add_two_sample(Report &report, std::string name, const RunningStats &a,
                          const RunningStats &b, double threshold) {
  const double se = std::sqrt(a.stderr_mean() * a.stderr_mean() +
                              b.stderr_mean() * b.stderr_mean());
  return report.add_z(std::move(name), a.mean(), b.mean(), se, threshold);
}

std::vector<double> column(const std::vector<Vector> &rows, std::size_t x) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto &r : rows)
    out.push_back(r(static_cast<Eigen::Index>(x)));
  return out;
}

RunningStats power_stats(const std::vector<double> &xs, int k) {
  RunningStats s;
  for (double x : xs)
    s.add(std::pow(x, k));
  return s;
}

RunningStats product_stats(const std::vector<double> &xs, const std::vector<double> &ys) {
  RunningStats s;
  for (std::size_t i = 0; i < xs.size(); ++i)
    s.add(xs[i] * ys[i]);
  return s;
}

double double_factorial_odd(int k) { // (2k - 1)!!
  double v = 1.0;
  for (int i = 1; i <= 2 * k - 1; i += 2)
    v *= i;
  return v;
}

void require_replicas(const CheckOptions &opts) {
  if (opts.replicas < 2)
    throw Error(Errc::BadInput, "a Monte-Carlo check needs at least two replicas");
}

nlohmann::json conventions() {
  return {{"complex_field", kComplexConvention}, {"det_identity_diagonal", kDiagonalConvention}};
}

void check_distinct(const std::vector<DirectedEdge> &edges,
                    const std::vector<std::size_t> &points, std::size_t n) {
  std::set<DirectedEdge> e(edges.begin(), edges.end());
  if (e.size() != edges.size())
    throw Error(Errc::DuplicateIndex, "oriented edges must be pairwise distinct");
  std::set<std::size_t> p(points.begin(), points.end());
  if (p.size() != points.size())
    throw Error(Errc::DuplicateIndex, "points must be pairwise distinct");
  for (const auto &[x, y] : edges)
    if (x >= n || y >= n || x == y)
      throw Error(Errc::BadInput, "oriented edge out of range");
  for (auto z : points)
    if (z >= n)
      throw Error(Errc::BadInput, "point out of range");
}

} // namespace

CVector FieldSample::complex() const {
  CVector out(real_part.size());
  for (Eigen::Index i = 0; i < real_part.size(); ++i)
    out(i) = {real_part(i), imaginary_part(i)};
  return out;
}

FreeField::FreeField(const Matrix &covariance) {
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::NonTransient, "field covariance is not positive definite");
  l_ = llt.matrixL();
}

Vector FreeField::standard_normal(Engine &rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(l_.rows());
  for (auto &v : z)
    v = normal(rng);
  return z;
}

FieldSample FreeField::sample_real(Engine &rng) const {
  FieldSample s;
  s.kind = FieldSample::Kind::Real;
  s.real_part = l_.triangularView<Eigen::Lower>() * standard_normal(rng);
  s.imaginary_part = Vector::Zero(l_.rows());
  return s;
}

FieldSample FreeField::sample_complex(Engine &rng) const {
  FieldSample s;
  s.kind = FieldSample::Kind::Complex;
  const Vector z1 = standard_normal(rng);
  const Vector z2 = standard_normal(rng);
  s.real_part = l_.triangularView<Eigen::Lower>() * z1 / std::numbers::sqrt2;
  s.imaginary_part = l_.triangularView<Eigen::Lower>() * z2 / std::numbers::sqrt2;
  return s;
}

FieldSample sample_real_field(const ChainKernel &kernel, std::uint64_t seed) {
  Engine rng = make_stream(seed);
  return FreeField(kernel.green()).sample_real(rng);
}

FieldSample sample_complex_field(const ChainKernel &kernel, std::uint64_t seed) {
  Engine rng = make_stream(seed);
  return FreeField(kernel.green()).sample_complex(rng);
}

Report verify_isomorphism(const ChainKernel &kernel, const CheckOptions &opts,
                          double exact_ks_threshold) {
  require_replicas(opts);
  const auto n = kernel.size();
  const FreeField field(kernel.green());
  const Matrix &g = kernel.green();

  auto soups_half = sample_observables(kernel, SamplerKind::Direct, 0.5, opts.replicas,
                                       derive_seed(opts.seed, "iso/soup-half"),
                                       opts.workers, opts.tail_cut);
  auto soups_one = sample_observables(kernel, opts.sampler, 1.0, opts.replicas,
                                      derive_seed(opts.seed, "iso/soup-one"), opts.workers,
                                      opts.tail_cut);
  auto half_sq = map_replicas<Vector>(opts.replicas, derive_seed(opts.seed, "iso/field-real"),
                                      opts.workers, [&](std::size_t, Engine &rng) {
                                        const Vector phi = field.sample_real(rng).real_part;
                                        return Vector(0.5 * phi.array().square());
                                      });
  auto mod_sq = map_replicas<Vector>(opts.replicas, derive_seed(opts.seed, "iso/field-complex"),
                                     opts.workers, [&](std::size_t, Engine &rng) {
                                       const auto s = field.sample_complex(rng);
                                       return Vector(s.real_part.array().square() +
                                                     s.imaginary_part.array().square());
                                     });

  std::vector<Vector> occ_half, occ_one;
  occ_half.reserve(opts.replicas);
  occ_one.reserve(opts.replicas);
  for (auto &o : soups_half)
    occ_half.push_back(std::move(o.occupation));
  for (auto &o : soups_one)
    occ_one.push_back(std::move(o.occupation));

  Report report("isomorphism");
  report.meta()["replicas"] = opts.replicas;
  report.meta()["conventions"] = conventions();
  report.meta()["identities"] = {"L_{1/2} ~ (1/2) phi_R^2", "L_1 ~ |phi|^2"};

  for (std::size_t x = 0; x < n; ++x) {
    const auto lh = column(occ_half, x), fh = column(half_sq, x);
    const auto l1 = column(occ_one, x), f1 = column(mod_sq, x);
    const double gxx = g(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x));
    for (int k = 1; k <= 4; ++k) {
      const auto a = power_stats(lh, k), b = power_stats(fh, k);
      add_two_sample(report, "half/m" + std::to_string(k) + "/" + vname(kernel, x), a, b,
                     opts.z_threshold);
      auto &exact = report.add_z("half/m" + std::to_string(k) + "/" + vname(kernel, x) + "/closed-form",
                                 a.mean(), std::pow(gxx, k) * double_factorial_odd(k) / std::pow(2.0, k),
                                 a.stderr_mean(), opts.z_threshold);
      exact.gated = false;
      exact.note = "against E[(phi^2/2)^k] = G^k (2k-1)!! / 2^k";

      const auto c = power_stats(l1, k), d = power_stats(f1, k);
      add_two_sample(report, "one/m" + std::to_string(k) + "/" + vname(kernel, x), c, d,
                     opts.z_threshold);
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      add_two_sample(report, "half/joint/" + vname(kernel, x) + "," + vname(kernel, y),
                     product_stats(column(occ_half, x), column(occ_half, y)),
                     product_stats(column(half_sq, x), column(half_sq, y)), opts.z_threshold);
      add_two_sample(report, "one/joint/" + vname(kernel, x) + "," + vname(kernel, y),
                     product_stats(column(occ_one, x), column(occ_one, y)),
                     product_stats(column(mod_sq, x), column(mod_sq, y)), opts.z_threshold);
    }

  if (n == 1) {
    // L_{1/2} ~ Gamma(1/2, 1) / lambda and phi^2 / 2 with variance 1/lambda:
    // both have CDF erf(sqrt(lambda t)).
    const double lam = kernel.lambda()(0);
    auto cdf = [lam](double t) { return t <= 0.0 ? 0.0 : std::erf(std::sqrt(lam * t)); };
    const auto lh = column(occ_half, 0), fh = column(half_sq, 0);
    report.add_distance("half/ks-exact/soup", ks_one_sample(lh, cdf), exact_ks_threshold);
    report.add_distance("half/ks-exact/field", ks_one_sample(fh, cdf), exact_ks_threshold);
    report.add_distance("half/ks-two-sample", ks_two_sample(lh, fh), exact_ks_threshold);
  }
  return report;
}

ChainExcursionField stopped_chain_occupation(const ChainKernel &kernel, std::size_t x0,
                                             double rho, Engine &rng) {
  const auto &g = kernel.graph();
  const auto n = g.size();
  if (x0 >= n)
    throw Error(Errc::BadInput, "x0 out of range");
  for (std::size_t x = 0; x < n; ++x)
    if (x != x0 && g.killing()(x) != 0.0)
      throw Error(Errc::BadSupport, "killing must be supported by x0 only");
  if (!(rho > 0.0))
    throw Error(Errc::BadInput, "rho must be positive");

  // At x0 the chain leaves towards y at rate C(x0, y) / lambda(x0) per unit of
  // real time, i.e. rate C(x0, y) per unit of normalized local time.
  std::vector<std::size_t> first;
  std::vector<double> first_cdf;
  double out_rate = 0.0;
  for (auto y : g.neighbors(x0)) {
    out_rate += g.conductance(x0, y);
    first.push_back(y);
    first_cdf.push_back(out_rate);
  }

  Vector time = Vector::Zero(static_cast<Eigen::Index>(n));
  std::exponential_distribution<double> hold(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pick = [&](const std::vector<double> &cdf) {
    const double u = unif(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end())
      --it;
    return static_cast<std::size_t>(it - cdf.begin());
  };

  if (out_rate > 0.0) {
    std::poisson_distribution<long> excursions(rho * out_rate);
    const long count = excursions(rng);
    for (long e = 0; e < count; ++e) {
      std::size_t v = first[pick(first_cdf)];
      while (v != x0) {
        time(static_cast<Eigen::Index>(v)) += hold(rng);
        const auto &nb = g.neighbors(v);
        std::vector<double> cdf;
        cdf.reserve(nb.size());
        double acc = 0.0;
        for (auto w : nb)
          cdf.push_back(acc += g.conductance(v, w));
        v = nb[pick(cdf)];
      }
    }
  }
  ChainExcursionField out;
  out.occupation = time.cwiseQuotient(kernel.lambda());
  out.occupation(static_cast<Eigen::Index>(x0)) = rho;
  return out;
}

Report ray_knight_check(const ChainKernel &kernel, std::size_t x0, double rho,
                        const CheckOptions &opts) {
  require_replicas(opts);
  const auto &g = kernel.graph();
  const auto n = g.size();
  if (x0 >= n)
    throw Error(Errc::BadInput, "x0 out of range");
  for (std::size_t x = 0; x < n; ++x)
    if (x != x0 && g.killing()(x) != 0.0)
      throw Error(Errc::BadSupport, "killing must be supported by x0 only");
  if (!(rho > 0.0))
    throw Error(Errc::BadInput, "rho must be positive");
  if (n < 2)
    throw Error(Errc::BadInput, "Ray-Knight check needs at least two vertices");

  const ChainKernel restricted = build_kernel(g.without_vertex(x0));
  const FreeField field_d(restricted.green());
  const FreeField field_full(kernel.green());
  const DirectSampler soup_d(restricted, opts.tail_cut);
  std::vector<std::size_t> d_vertices;
  for (std::size_t x = 0; x < n; ++x)
    if (x != x0)
      d_vertices.push_back(x);
  const double shift = std::sqrt(2.0 * rho);

  struct Sides {
    Vector lhs, rhs, printed, loops;
  };
  auto samples = map_replicas<Sides>(
      opts.replicas, derive_seed(opts.seed, "ray-knight"), opts.workers,
      [&](std::size_t, Engine &rng) {
        Sides s;
        const Vector gamma = stopped_chain_occupation(kernel, x0, rho, rng).occupation;
        const Vector phi_d = field_d.sample_real(rng).real_part;
        const Vector phi_rhs = field_d.sample_real(rng).real_part;
        const Vector phi_full = field_full.sample_real(rng).real_part;
        const Vector loops_d = occupation(soup_d.sample(0.5, rng), restricted);
        s.lhs = s.rhs = s.printed = s.loops = Vector(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < d_vertices.size(); ++i) {
          const auto x = static_cast<Eigen::Index>(d_vertices[i]);
          const auto di = static_cast<Eigen::Index>(i);
          s.lhs(x) = 0.5 * phi_d(di) * phi_d(di) + gamma(x);
          s.rhs(x) = 0.5 * (phi_rhs(di) + shift) * (phi_rhs(di) + shift);
          s.loops(x) = loops_d(di) + gamma(x);
        }
        for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(n); ++x)
          s.printed(x) = 0.5 * phi_full(x) * phi_full(x) + gamma(x);
        const auto i0 = static_cast<Eigen::Index>(x0);
        s.lhs(i0) = gamma(i0); // phi^D vanishes at x0
        s.rhs(i0) = rho;
        s.loops(i0) = gamma(i0);
        return s;
      });

  std::vector<Vector> lhs, rhs, printed, loops;
  for (auto &s : samples) {
    lhs.push_back(std::move(s.lhs));
    rhs.push_back(std::move(s.rhs));
    printed.push_back(std::move(s.printed));
    loops.push_back(std::move(s.loops));
  }

  Report report("ray-knight");
  report.meta()["x0"] = g.name(x0);
  report.meta()["rho"] = rho;
  report.meta()["replicas"] = opts.replicas;
  report.meta()["identity"] = "(1/2)(phi^D)^2 + gamma_{tau_rho} ~ (1/2)(phi^D + sqrt(2 rho))^2";
  report.meta()["local_time"] = "time at x0 divided by lambda_{x0}";

  for (auto x : d_vertices) {
    const auto a = column(lhs, x), b = column(rhs, x);
    const auto pr = column(printed, x), lp = column(loops, x);
    for (int k = 1; k <= 3; ++k) {
      add_two_sample(report, "m" + std::to_string(k) + "/" + vname(kernel, x),
                     power_stats(a, k), power_stats(b, k), opts.z_threshold);
      auto &mid = add_two_sample(report, "loops/m" + std::to_string(k) + "/" + vname(kernel, x),
                                 power_stats(lp, k), power_stats(b, k), opts.z_threshold);
      mid.gated = false;
      mid.note = "L^D_{1/2} + gamma against the right-hand side";
    }
    report.add_distance("ks/" + vname(kernel, x), ks_two_sample(a, b), opts.ks_threshold);
    auto &mid = report.add_distance("loops/ks/" + vname(kernel, x), ks_two_sample(lp, b),
                                    opts.ks_threshold);
    mid.gated = false;
    mid.note = "L^D_{1/2} + gamma against the right-hand side";
    auto &full = report.add_distance("full-field/ks/" + vname(kernel, x), ks_two_sample(pr, b),
                                     opts.ks_threshold);
    full.gated = false;
    full.note = "left side with the full field phi_R instead of phi^D";
  }
  const auto a0 = summarize(column(lhs, x0));
  auto &at0 = report.add_exact("x0/" + vname(kernel, x0), a0.mean(), rho, 1e-12);
  at0.gated = false;
  at0.note = "phi^D vanishes at x0, so the left side is the stopping level";
  auto &full0 = report.add_z("full-field/x0/" + vname(kernel, x0),
                             summarize(column(printed, x0)).mean(), rho,
                             summarize(column(printed, x0)).stderr_mean(), opts.z_threshold);
  full0.gated = false;
  full0.note = "(1/2) phi_R(x0)^2 + rho against the constant rho";
  return report;
}

Report decomposition_independence_check(const ChainKernel &kernel, std::size_t x0,
                                        const CheckOptions &opts) {
  require_replicas(opts);
  const auto n = kernel.size();
  if (x0 >= n)
    throw Error(Errc::BadInput, "x0 out of range");
  const DirectSampler sampler(kernel, opts.tail_cut);

  struct Parts {
    Vector avoid, hit;
  };
  auto parts = map_replicas<Parts>(
      opts.replicas, derive_seed(opts.seed, "decomposition"), opts.workers,
      [&](std::size_t, Engine &rng) {
        const LoopSoup soup = sampler.sample(0.5, rng);
        Parts p{Vector::Zero(static_cast<Eigen::Index>(n)), Vector::Zero(static_cast<Eigen::Index>(n))};
        for (const auto &l : soup.loops) {
          const bool hits = std::find(l.vertices.begin(), l.vertices.end(), x0) != l.vertices.end();
          Vector &target = hits ? p.hit : p.avoid;
          for (std::size_t i = 0; i < l.vertices.size(); ++i)
            target(static_cast<Eigen::Index>(l.vertices[i])) += l.holding_times[i];
        }
        for (std::size_t x = 0; x < n; ++x) {
          Vector &target = x == x0 ? p.hit : p.avoid;
          target(static_cast<Eigen::Index>(x)) += soup.trivial_time(static_cast<Eigen::Index>(x));
        }
        p.avoid = p.avoid.cwiseQuotient(kernel.lambda());
        p.hit = p.hit.cwiseQuotient(kernel.lambda());
        return p;
      });

  Report report("decomposition-independence");
  report.meta()["x0"] = kernel.graph().name(x0);
  report.meta()["alpha"] = 0.5;
  std::vector<Vector> avoid, hit;
  for (auto &p : parts) {
    avoid.push_back(std::move(p.avoid));
    hit.push_back(std::move(p.hit));
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (x == x0)
      continue;
    const auto a = column(avoid, x);
    const auto ma = summarize(a).mean();
    for (std::size_t y = 0; y < n; ++y) {
      const auto b = column(hit, y);
      const auto mb = summarize(b).mean();
      RunningStats centered;
      for (std::size_t i = 0; i < a.size(); ++i)
        centered.add((a[i] - ma) * (b[i] - mb));
      report.add_z("cov/" + vname(kernel, x) + "|" + vname(kernel, y), centered.mean(), 0.0,
                   centered.stderr_mean(), opts.z_threshold);
    }
  }
  return report;
}

double wick_moment(const ChainKernel &kernel, const std::vector<DirectedEdge> &edges,
                   const std::vector<std::size_t> &points) {
  const auto &g = kernel.graph();
  check_distinct(edges, points, g.size());
  std::vector<std::size_t> holo, anti; // indices of phi and of conj(phi)
  double weight = 1.0;
  for (const auto &[x, y] : edges) {
    holo.push_back(x);
    anti.push_back(y);
    weight *= g.conductance(x, y);
  }
  for (auto z : points) {
    holo.push_back(z);
    anti.push_back(z);
    weight *= kernel.lambda()(static_cast<Eigen::Index>(z));
  }
  const auto m = static_cast<Eigen::Index>(holo.size());
  Matrix cov(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index s = 0; s < m; ++s)
      cov(r, s) = kernel.green()(static_cast<Eigen::Index>(holo[static_cast<std::size_t>(r)]),
                                 static_cast<Eigen::Index>(anti[static_cast<std::size_t>(s)]));
  return weight * permanent(cov);
}

Report verify_moment_formula(const ChainKernel &kernel,
                             const std::vector<DirectedEdge> &edges,
                             const std::vector<std::size_t> &points,
                             const CheckOptions &opts) {
  require_replicas(opts);
  const double exact = wick_moment(kernel, edges, points);
  const auto &g = kernel.graph();
  auto soups = sample_observables(kernel, opts.sampler, 1.0, opts.replicas,
                                  derive_seed(opts.seed, "moments/soup"), opts.workers,
                                  opts.tail_cut);
  RunningStats mc;
  for (const auto &o : soups) {
    double v = 1.0;
    for (const auto &[x, y] : edges)
      v *= static_cast<double>(o.jumps(x, y));
    for (auto z : points)
      v *= static_cast<double>(o.jumps.out_degree(z) + 1);
    mc.add(v);
  }

  const FreeField field(kernel.green());
  auto wick = map_replicas<std::complex<double>>(
      opts.replicas, derive_seed(opts.seed, "moments/field"), opts.workers,
      [&](std::size_t, Engine &rng) {
        const CVector phi = field.sample_complex(rng).complex();
        std::complex<double> v{1.0, 0.0};
        for (const auto &[x, y] : edges)
          v *= g.conductance(x, y) * phi(static_cast<Eigen::Index>(x)) *
               std::conj(phi(static_cast<Eigen::Index>(y)));
        for (auto z : points)
          v *= kernel.lambda()(static_cast<Eigen::Index>(z)) *
               std::norm(phi(static_cast<Eigen::Index>(z)));
        return v;
      });
  RunningStats wick_re, wick_im;
  for (const auto &v : wick) {
    wick_re.add(v.real());
    wick_im.add(v.imag());
  }

  std::string label;
  for (const auto &[x, y] : edges)
    label += "N(" + g.name(x) + "," + g.name(y) + ")";
  for (auto z : points)
    label += "(N_" + g.name(z) + "+1)";
  if (label.empty())
    label = "1";

  Report report("moments");
  report.meta()["replicas"] = opts.replicas;
  report.meta()["conventions"] = conventions();
  report.meta()["observable"] = label;
  report.meta()["closed_form"] = exact;
  report.add_z("soups/" + label, mc.mean(), exact, mc.stderr_mean(), opts.z_threshold);
  report.add_z("wick-self-test/re", wick_re.mean(), exact, wick_re.stderr_mean(),
               opts.z_threshold);
  auto &im = report.add_z("wick-self-test/im", wick_im.mean(), 0.0, wick_im.stderr_mean(),
                          opts.z_threshold);
  im.gated = false;
  return report;
}

double det_identity_rhs(const ChainKernel &kernel, const Vector &chi) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  if (chi.size() != n)
    throw Error(Errc::BadChi, "chi has the wrong size");
  for (Eigen::Index x = 0; x < n; ++x)
    if (!(chi(x) >= kernel.lambda()(x) * (1.0 - 1e-12)))
      throw Error(Errc::BadChi, "chi must dominate lambda at '" +
                                    kernel.graph().name(static_cast<std::size_t>(x)) + "'");
  const Matrix m = Matrix(chi.asDiagonal()) - kernel.graph().conductances();
  return m.determinant() * permanent(kernel.green());
}

Report verify_det_identity(const ChainKernel &kernel, const Vector &chi,
                           const CheckOptions &opts) {
  require_replicas(opts);
  const double rhs = det_identity_rhs(kernel, chi);
  const auto n = static_cast<Eigen::Index>(kernel.size());
  auto soups = sample_observables(kernel, opts.sampler, 1.0, opts.replicas,
                                  derive_seed(opts.seed, "det-identity"), opts.workers,
                                  opts.tail_cut);
  RunningStats normalized, printed;
  Matrix a(n, n), b(n, n);
  for (const auto &o : soups) {
    for (Eigen::Index x = 0; x < n; ++x)
      for (Eigen::Index y = 0; y < n; ++y) {
        const double nxy = static_cast<double>(o.jumps(static_cast<std::size_t>(x),
                                                       static_cast<std::size_t>(y)));
        a(x, y) = b(x, y) = -nxy;
      }
    for (Eigen::Index x = 0; x < n; ++x) {
      const double d = 1.0 + static_cast<double>(o.jumps.out_degree(static_cast<std::size_t>(x)));
      a(x, x) = chi(x) * d / kernel.lambda()(x);
      b(x, x) = chi(x) * d;
    }
    normalized.add(a.determinant());
    printed.add(b.determinant());
  }

  Report report("det-identity");
  report.meta()["replicas"] = opts.replicas;
  report.meta()["conventions"] = conventions();
  report.meta()["chi"] = std::vector<double>(chi.data(), chi.data() + chi.size());
  report.meta()["rhs"] = rhs;
  report.add_z("normalized-diagonal", normalized.mean(), rhs, normalized.stderr_mean(),
               opts.z_threshold);
  auto &un = report.add_z("unnormalized-diagonal", printed.mean(), rhs, printed.stderr_mean(),
                          opts.z_threshold);
  un.gated = false;
  un.note = "diagonal chi_x (1 + N_x) without the 1/lambda_x factor";
  return report;
}

} // namespace loopsoup
