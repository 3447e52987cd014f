#pragma once

// Exact oracles: complex determinants, permanents, alpha-permanents and
// matrix-tree counts. Everything here is a pure function.

#include "loopsoup/graph.hpp"
#include "loopsoup/network.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>

namespace loopsoup {

inline constexpr std::size_t kPermanentMaxSize = 20;
inline constexpr std::size_t kAlphaPermanentMaxSize = 10;

/// Determinant by partial-pivot LU. The 0x0 determinant is 1.
std::complex<double> det_complex(const CMatrix &m);

/// Ryser inclusion-exclusion with Gray-code subset updates, O(2^n n).
/// Throws Error(TooLarge) above kPermanentMaxSize.
double permanent(const Matrix &m);

struct AlphaPermanentInput {
  CMatrix matrix;
  double alpha = 1.0;
};

/// Sum over permutations s of alpha^{cycles(s)} prod_i m(i, s(i)), by explicit
/// enumeration. Throws Error(TooLarge) above kAlphaPermanentMaxSize.
std::complex<double> alpha_permanent(const AlphaPermanentInput &in);

/// Sum over spanning trees of the product of edge conductances (killing is
/// ignored). Throws Error(Disconnected).
double spanning_tree_weight_sum(const WeightedGraph &g);

/// Number of spanning arborescences of the support multidigraph of `net`,
/// all edges oriented toward `root`. Zero when `root` is outside the
/// support. Throws Error(EmptyNetwork) for the zero network.
std::uint64_t arborescence_count(const Network &net, std::size_t root);

/// Exact integer determinant (Bareiss). Throws Error(TooLarge) on overflow.
std::int64_t det_integer(std::vector<std::vector<std::int64_t>> m);

} // namespace loopsoup
