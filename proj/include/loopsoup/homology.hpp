#pragma once

#include "loopsoup/field.hpp"
#include "loopsoup/graph.hpp"
#include "loopsoup/network.hpp"
#include "loopsoup/report.hpp"

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace loopsoup {

using UndirectedEdge = std::pair<std::size_t, std::size_t>;

/// Spanning tree plus one oriented cycle per non-tree edge (chord). Chord i
/// is traversed u -> v with u < v and closed through the tree; cycles[i] is
/// its signed incidence as an antisymmetric integer matrix.
struct CycleBasis {
  std::size_t vertex_count = 0;
  std::vector<UndirectedEdge> tree;
  std::vector<UndirectedEdge> chords;
  std::vector<Matrix> cycles;

  std::size_t size() const noexcept { return chords.size(); }
};

/// Maximum-conductance spanning tree (Kruskal, ties broken by (u, v)).
/// Throws Error(Disconnected).
CycleBasis cycle_basis(const WeightedGraph &g);

struct HomologyClass {
  std::vector<std::int64_t> coords;

  friend bool operator==(const HomologyClass &, const HomologyClass &) = default;
  friend auto operator<=>(const HomologyClass &, const HomologyClass &) = default;
};

/// Coordinates of the edge flow k_uv - k_vu in the cycle basis; the class
/// pairs with a one-form as sum_{x,y} k_xy omega^{xy}. Throws
/// Error(NotEulerian), Error(NonIntegral) if the flow does not expand.
HomologyClass network_homology_class(const Network &k, const CycleBasis &basis);

/// Harmonic one-forms with holonomies omega_i(c_j) = delta_ij, from the
/// linear system of harmonicity and holonomy constraints.
/// Throws Error(Disconnected).
std::vector<OneForm> harmonic_basis(const WeightedGraph &g, const CycleBasis &basis);

/// Lambda_ij = sum_e c_i(e) c_j(e) / C_e. Throws Error(EmptyBasis) when n = 0.
Matrix intersection_matrix(const CycleBasis &basis, const WeightedGraph &g);

/// The same harmonic forms in closed form: sum_k (Lambda^{-1})_ik c_k / C.
std::vector<OneForm> harmonic_basis_from_intersection(const WeightedGraph &g,
                                                      const CycleBasis &basis);

struct JacobianVolume {
  double value = 1.0;
  double via_intersection = 1.0; ///< (det(Lambda) prod_e C_e)^{-1/2}
  double via_trees = 1.0;        ///< (spanning-tree weight sum)^{-1/2}
  /// n = 0: no cycles; value is 1 by convention and the routes are not compared.
  bool degenerate = false;
};

/// Throws Error(Disconnected); Error(MismatchBeyondTolerance) when the two
/// routes differ by more than 1e-10 relative.
JacobianVolume jacobian_volume(const WeightedGraph &g);

/// The integrand's one-forms: indicator duals of the chords or harmonic forms.
enum class DualKind { Indicator, Harmonic };

/// omega(t) = sum_i t_i omega_i for the chosen duals.
OneForm dual_form(const WeightedGraph &g, const CycleBasis &basis, const std::vector<double> &t,
                  DualKind kind);

/// exp(2 pi i sum_{x,y} k_xy omega^{xy}).
std::complex<double> pairing_phase(const Network &k, const OneForm &omega);
/// exp(2 pi i sum_i t_i j_i).
std::complex<double> class_phase(const HomologyClass &j, const std::vector<double> &t);

struct HomologyLaw {
  std::map<HomologyClass, double> probability;
  std::size_t grid = 0;
  std::size_t dimension = 0;
  /// Sum of the returned masses (window |j_i| < M/2).
  double captured_mass = 1.0;
  /// Largest imaginary part and total negative mass removed by clipping.
  double max_imaginary = 0.0;
  double clipped_negative = 0.0;

  double at(const HomologyClass &j) const;
};

inline constexpr std::size_t kMaxAdaptiveGrid = 512;
inline constexpr std::size_t kMaxAdaptiveDimension = 3;

/// Fourier inversion of Phi(t) = [det(I - P^{exp(2 pi i omega(t))}) / det(I - P)]^{-alpha}
/// on the uniform M^n grid of the unit cube. n = 0 answers the trivial class
/// exactly. M must be a power of two >= 8. Throws Error(GridTooCoarse) when
/// the captured mass is below `min_captured`.
HomologyLaw homology_distribution(const ChainKernel &kernel, const CycleBasis &basis,
                                  double alpha, std::size_t grid,
                                  DualKind kind = DualKind::Indicator,
                                  double min_captured = 0.999);

/// Doubles M from `initial_grid` until the captured mass reaches
/// `min_captured` and successive grids differ by at most `cauchy_tol`
/// everywhere, up to kMaxAdaptiveGrid; n <= kMaxAdaptiveDimension.
HomologyLaw homology_distribution_adaptive(const ChainKernel &kernel, const CycleBasis &basis,
                                           double alpha, std::size_t initial_grid = 8,
                                           double min_captured = 0.999,
                                           double cauchy_tol = 1e-8);

/// Captured mass, symmetry P(j) = P(-j), and agreement with the empirical
/// law of the homology class over alpha-soups (TV and a z-score at j = 0).
Report verify_homology_law(const ChainKernel &kernel, double alpha, std::size_t grid,
                           const CheckOptions &opts, double tv_threshold = 0.02,
                           double symmetry_tol = 1e-8);

/// Jacobian volume by both routes on one graph, as a report.
Report verify_jacobian(const WeightedGraph &g, double rel_tol = 1e-10);

} // namespace loopsoup
