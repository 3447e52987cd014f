#pragma once

#include "loopsoup/graph.hpp"
#include "loopsoup/network.hpp"
#include "loopsoup/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

namespace loopsoup {

/// Continuous-time based loop: the cyclic vertex sequence and the holding
/// time of each visit. A single vertex is a trivial (one-point) loop.
struct BasedLoop {
  std::vector<std::size_t> vertices;
  std::vector<double> holding_times;

  bool trivial() const noexcept { return vertices.size() == 1; }
  std::size_t length() const noexcept { return vertices.size(); }
};

/// Rotates the loop to start at the first occurrence of its smallest vertex.
void canonicalize(BasedLoop &loop);

/// Poisson ensemble of loops at intensity alpha * mu. One-point loops are
/// not stored individually; their total time per vertex is `trivial_time`.
struct LoopSoup {
  double alpha = 1.0;
  std::vector<BasedLoop> loops;
  Vector trivial_time;

  nlohmann::json to_json(const WeightedGraph &g) const;
};

using OccupationField = Vector;
using JumpMatrix = Network;

inline constexpr std::ptrdiff_t kCemetery = -1;

/// parent[x] is the next vertex toward the root, or kCemetery.
struct SpanningTree {
  std::vector<std::ptrdiff_t> parent;
};

struct WilsonSample {
  SpanningTree tree;
  LoopSoup soup;
};

/// Wilson's algorithm in vertex order, rooted at the cemetery. The erased
/// based loops are split at their base point by PD(0,1) stick-breaking of
/// the base-point local time; excursion-free pieces become one-point time.
WilsonSample wilson_sample(const ChainKernel &kernel, Engine &rng);
WilsonSample wilson_sample(const ChainKernel &kernel, std::uint64_t seed);

inline constexpr double kDefaultTailCut = 1e-9;
inline constexpr std::size_t kMaxLoopLength = 10000;

/// Direct Poisson sampler of the loop measure. Loop lengths are drawn
/// proportional to Tr(P^n)/n for n <= max_length(), and each based loop by
/// Markov-bridge conditioning on the precomputed powers of P.
class DirectSampler {
public:
  /// Throws Error(TailTooHeavy) when the tail cut needs loops longer than
  /// kMaxLoopLength.
  explicit DirectSampler(const ChainKernel &kernel, double tail_cut = kDefaultTailCut);

  /// Non-trivial loops plus Gamma(alpha, 1) one-point time at each vertex.
  LoopSoup sample(double alpha, Engine &rng) const;

  std::size_t max_length() const noexcept { return powers_.size(); }
  /// -log det(I - P).
  double total_mass() const noexcept { return total_mass_; }
  /// mass of loops of length <= max_length(): the Poisson intensity used.
  double truncated_mass() const noexcept { return truncated_mass_; }
  double discarded_mass() const noexcept { return total_mass_ - truncated_mass_; }
  double tail_cut() const noexcept { return tail_cut_; }

private:
  BasedLoop sample_loop(std::size_t n, Engine &rng) const;

  std::size_t size_;
  double tail_cut_;
  std::vector<Matrix> powers_; // powers_[n - 1] = P^n
  std::vector<double> length_cdf_;
  double total_mass_ = 0.0;
  double truncated_mass_ = 0.0;
};

LoopSoup direct_sample(const ChainKernel &kernel, double alpha, double tail_cut,
                       std::uint64_t seed);

/// Time at x (loops plus one-point time) divided by lambda_x.
OccupationField occupation(const LoopSoup &soup, const ChainKernel &kernel);

/// Directed jump counts over all loops; always Eulerian.
JumpMatrix jump_matrix(const LoopSoup &soup, std::size_t vertex_count);

/// -log det(I - P): mu-mass of non-trivial loops.
double mu_mass_nontrivial(const ChainKernel &kernel);

enum class SamplerKind { Direct, Wilson };

/// Per-replica observables used by the verification routines.
struct SoupObservables {
  Network jumps;
  OccupationField occupation;
};

/// Samples `replicas` soups (Wilson requires alpha = 1) and keeps only the
/// jump matrix and occupation field of each.
std::vector<SoupObservables> sample_observables(const ChainKernel &kernel,
                                                SamplerKind kind, double alpha,
                                                std::size_t replicas,
                                                std::uint64_t seed, unsigned workers,
                                                double tail_cut = kDefaultTailCut);

} // namespace loopsoup
