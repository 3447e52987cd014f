#pragma once

#include "loopsoup/graph.hpp"
#include "loopsoup/report.hpp"
#include "loopsoup/rng.hpp"
#include "loopsoup/soup.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace loopsoup {

/// Complex convention used throughout: phi = (phi1 + i phi2) / sqrt(2) with
/// phi1, phi2 independent real fields, so E[phi_x conj(phi_y)] = G(x, y).
inline constexpr const char *kComplexConvention = "E[phi_x conj(phi_y)] = G_xy";
/// The determinant identity uses the lambda-normalized diagonal
/// (1 + N_x) / lambda_x.
inline constexpr const char *kDiagonalConvention = "D_xx = (1 + N_x) / lambda_x";

struct FieldSample {
  enum class Kind { Real, Complex };

  Vector real_part;
  Vector imaginary_part;
  Kind kind = Kind::Real;

  CVector complex() const;
};

/// Centered Gaussian vectors with a fixed covariance, via its Cholesky
/// factor.
class FreeField {
public:
  explicit FreeField(const Matrix &covariance);

  FieldSample sample_real(Engine &rng) const;
  FieldSample sample_complex(Engine &rng) const;
  std::size_t size() const noexcept { return static_cast<std::size_t>(l_.rows()); }

private:
  Vector standard_normal(Engine &rng) const;
  Matrix l_;
};

FieldSample sample_real_field(const ChainKernel &kernel, std::uint64_t seed);
FieldSample sample_complex_field(const ChainKernel &kernel, std::uint64_t seed);

struct CheckOptions {
  std::size_t replicas = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double z_threshold = 3.0;
  double ks_threshold = 0.02;
  double tail_cut = kDefaultTailCut;
  SamplerKind sampler = SamplerKind::Direct;
};

/// Moments 1-4 per vertex and pairwise second moments of the alpha = 1/2
/// occupation field against (1/2) phi_R^2 and of the alpha = 1 field against
/// |phi|^2, as two-sample z-scores. On a single-vertex graph it adds KS
/// distances against the exact Gamma(1/2) law at `exact_ks_threshold`.
Report verify_isomorphism(const ChainKernel &kernel, const CheckOptions &opts,
                          double exact_ks_threshold = 0.01);

/// Occupation field of the chain started at x0 and stopped when its local
/// time at x0 (time / lambda_{x0}) reaches rho. Requires killing only at x0;
/// excursions into D = X - {x0} form a Poisson process in x0-local time.
struct ChainExcursionField {
  Vector occupation;
};

ChainExcursionField stopped_chain_occupation(const ChainKernel &kernel, std::size_t x0,
                                             double rho, Engine &rng);

/// Compares (1/2)(phi^D)^2 + gamma_{tau_rho} with (1/2)(phi^D + sqrt(2 rho))^2
/// per vertex of D (moments 1-3 and two-sample KS). The form with the full
/// field phi_R on the left, and the loop-soup form L^D_{1/2} + gamma, are
/// reported alongside; only the first two are gated.
/// Throws Error(BadSupport) when killing is positive off x0.
Report ray_knight_check(const ChainKernel &kernel, std::size_t x0, double rho,
                        const CheckOptions &opts);

/// Covariance between the occupation of loops avoiding x0 and of loops
/// hitting x0 at every vertex of D, at alpha = 1/2.
Report decomposition_independence_check(const ChainKernel &kernel, std::size_t x0,
                                        const CheckOptions &opts);

using DirectedEdge = std::pair<std::size_t, std::size_t>;

/// E[prod C_e phi_x conj(phi_y) prod lambda_z |phi_z|^2] by the complex Wick
/// (permanent) formula with covariance G. Throws Error(DuplicateIndex).
double wick_moment(const ChainKernel &kernel, const std::vector<DirectedEdge> &edges,
                   const std::vector<std::size_t> &points);

/// Monte-Carlo E[prod N_e prod (N_z + 1)] from alpha = 1 soups against
/// wick_moment, plus a field-side Monte-Carlo self-test of the Wick value.
Report verify_moment_formula(const ChainKernel &kernel,
                             const std::vector<DirectedEdge> &edges,
                             const std::vector<std::size_t> &points,
                             const CheckOptions &opts);

/// det(M_chi - C) Per(G). Throws Error(BadChi) unless chi >= lambda.
double det_identity_rhs(const ChainKernel &kernel, const Vector &chi);

/// Monte-Carlo E[det(M_chi D - N)] with D = diag((1 + N_x) / lambda_x), against
/// det_identity_rhs. The unnormalized diagonal reading is reported ungated.
Report verify_det_identity(const ChainKernel &kernel, const Vector &chi,
                           const CheckOptions &opts);

} // namespace loopsoup
