#pragma once

#include "loopsoup/field.hpp"
#include "loopsoup/graph.hpp"
#include "loopsoup/network.hpp"
#include "loopsoup/report.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace loopsoup {

/// Multiplicative edge modifier Z for the twisted transition matrix P^Z.
/// Off-diagonal entries satisfy 0 < |Z| <= 1 and Z(y, x) = conj(Z(x, y));
/// the diagonal is ignored.
class ModifierMatrix {
public:
  /// Throws Error(BadInput) when either constraint fails.
  explicit ModifierMatrix(CMatrix entries);

  static ModifierMatrix identity(std::size_t n);
  /// Z = exp(2 pi i omega) for an antisymmetric one-form.
  static ModifierMatrix from_one_form(const WeightedGraph &g, const OneForm &omega);

  std::size_t size() const noexcept { return static_cast<std::size_t>(z_.rows()); }
  std::complex<double> operator()(std::size_t x, std::size_t y) const { return z_(x, y); }
  const CMatrix &entries() const noexcept { return z_; }

private:
  CMatrix z_;
};

/// [det(I - P^Z) / det(I - P)]^{-alpha}, principal branch.
/// Throws Error(SingularTwist).
std::complex<double> generating_function(const ChainKernel &kernel, const ModifierMatrix &z,
                                         double alpha);

/// P(N = k) at alpha = 1: det(I - P) prod k_x! / prod k_xy! prod P^k.
/// Throws Error(NotEulerian).
double exact_network_prob_alpha1(const ChainKernel &kernel, const Network &k);

inline constexpr Network::count_type kAlphaRouteMaxTotal = 8;

/// P(N = k) for general alpha from the alpha-permanent of the repeated
/// transition matrix: permutations of the repeated index set whose edge
/// usage equals k, weighted by alpha^{cycles}, divided once by prod k_x!.
/// Throws Error(NotEulerian), Error(TooLarge) above kAlphaRouteMaxTotal.
double exact_network_prob_alpha(const ChainKernel &kernel, const Network &k, double alpha);

struct NetworkLawEntry {
  Network network;
  double probability = 0.0; ///< alpha = 1 law
  double mu_mass = 0.0;     ///< loop-measure mass of loops inducing k (0 for k = 0)
};

struct EnumerationLimits {
  /// The largest |k| level the enumeration may open.
  Network::count_type max_total = 64;
};

/// All Eulerian networks on the graph in increasing |k|, level by level,
/// stopping after the first complete level at which the accumulated
/// alpha = 1 probability reaches 1 - delta. delta must lie in (0, 0.01].
/// Throws Error(BudgetExceeded) when that needs a level past max_total.
std::vector<NetworkLawEntry> enumerate_eulerian(const ChainKernel &kernel, double delta,
                                                EnumerationLimits limits = {});

/// Rooted Eulerian tours of the multidigraph of k: |k| tau prod (k_x - 1)!.
/// Throws Error(NotEulerian), Error(EmptyNetwork), Error(DisconnectedSupport),
/// Error(TooLarge) on overflow.
std::uint64_t best_tour_count(const Network &k);

/// tau prod (k_x - 1)! prod P^{k_xy} / k_xy!.
/// Throws Error(NotEulerian), Error(ZeroNetwork).
double mu_network_measure(const ChainKernel &kernel, const Network &k);

/// Rebuilds the alpha = 1 law as det(I - P) sum_j mu^{*j} / j! over the
/// truncated support and compares it entrywise with the factorial
/// formula; the largest absolute error is gated at `tolerance`.
Report verify_poisson_convolution(const ChainKernel &kernel, double delta, double tolerance,
                                  EnumerationLimits limits = {});

/// Compares the sum of mu over the truncated support with -log det(I - P).
Report verify_mu_total(const ChainKernel &kernel, double delta, double tolerance,
                       EnumerationLimits limits = {});

/// Largest number of edge-disjoint directed paths from A to B in the
/// multidigraph of k. Throws Error(BadPartition) unless A, B are nonempty,
/// disjoint and in range.
std::int64_t max_flow(const Network &k, const std::vector<std::size_t> &sources,
                      const std::vector<std::size_t> &sinks);

/// Monte-Carlo E[prod Z^N] over alpha-soups against generating_function;
/// real and imaginary parts as one-sample z-scores.
Report verify_generating_function(const ChainKernel &kernel, const ModifierMatrix &z,
                                  double alpha, const CheckOptions &opts);

/// Random Hermitian modifier on the graph's edges: modulus uniform in
/// [0.2, 1], phase uniform.
ModifierMatrix random_modifier(const WeightedGraph &g, Engine &rng);

/// Total variation between the empirical law of `samples` and `law`, with
/// everything outside the law's support lumped into one extra atom.
double network_tv(const std::vector<Network> &samples, const std::vector<NetworkLawEntry> &law);

/// Null-hypothesis mean of network_tv at `replicas` samples, to first order:
/// sum_k sqrt(p_k (1 - p_k) / (2 pi replicas)).
double expected_null_tv(const std::vector<NetworkLawEntry> &law, std::size_t replicas);

/// Empirical alpha = 1 network law from `opts.sampler` against the exact
/// law on the delta-truncated support, gated at `tv_threshold`.
Report verify_network_law(const ChainKernel &kernel, const CheckOptions &opts, double delta,
                          double tv_threshold = 0.02);

/// Wilson against direct sampling at alpha = 1: two-sample total variation
/// of the network laws.
Report compare_samplers(const ChainKernel &kernel, const CheckOptions &opts,
                        double tv_threshold = 0.02);

std::vector<Network> sample_networks(const ChainKernel &kernel, SamplerKind kind, double alpha,
                                     std::size_t replicas, std::uint64_t seed,
                                     unsigned workers, double tail_cut = kDefaultTailCut);

} // namespace loopsoup
