#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace loopsoup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Antisymmetric edge function, stored densely: form(x, y) = -form(y, x).
using OneForm = Eigen::MatrixXd;

struct EdgeSpec {
  std::string u;
  std::string v;
  double c = 1.0;
};

/// Finite graph with symmetric conductances and a killing measure.
///
/// Vertex order is the order given at construction (file order for JSON
/// input) and is the order used by every index-based API.
class WeightedGraph {
public:
  /// Throws Error(BadGraph) when the conductance matrix is not symmetric,
  /// has a nonzero diagonal, negative entries, or the killing measure is
  /// negative somewhere.
  WeightedGraph(std::vector<std::string> vertices, Matrix conductances,
                Vector killing);

  static WeightedGraph from_edges(std::vector<std::string> vertices,
                                  const std::vector<EdgeSpec> &edges,
                                  const std::map<std::string, double> &killing);

  /// Parses {"vertices":[...], "edges":[{"u","v","c"}], "killing":{...}}.
  static WeightedGraph from_json(const nlohmann::json &doc);
  static WeightedGraph parse(std::string_view text);
  static WeightedGraph load(const std::filesystem::path &path);

  nlohmann::json to_json() const;

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string> &vertices() const noexcept { return names_; }
  const std::string &name(std::size_t x) const { return names_.at(x); }
  std::optional<std::size_t> find(std::string_view name) const;
  /// Like find() but throws Error(BadInput) for unknown names.
  std::size_t index(std::string_view name) const;

  const Matrix &conductances() const noexcept { return c_; }
  const Vector &killing() const noexcept { return kappa_; }
  double conductance(std::size_t x, std::size_t y) const { return c_(x, y); }
  bool has_edge(std::size_t x, std::size_t y) const { return c_(x, y) > 0.0; }

  /// Undirected edges as (u, v) with u < v, in lexicographic index order.
  const std::vector<std::pair<std::size_t, std::size_t>> &edges() const noexcept {
    return edges_;
  }
  const std::vector<std::size_t> &neighbors(std::size_t x) const {
    return adj_.at(x);
  }

  bool connected() const;

  /// Graph on X - {x0} carrying the restriction of the energy form:
  /// conductances into x0 become killing.
  WeightedGraph without_vertex(std::size_t x0) const;

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> lookup_;
  Matrix c_;
  Vector kappa_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

/// Duality measure, transition matrix and Green's function of a transient
/// graph. Immutable once built.
///
/// Transitions are row-substochastic: P(x, y) = C(x, y) / lambda(x).
class ChainKernel {
public:
  const WeightedGraph &graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.size(); }

  const Vector &lambda() const noexcept { return lambda_; }
  const Matrix &transition() const noexcept { return p_; }
  double p(std::size_t x, std::size_t y) const { return p_(x, y); }
  const Matrix &green() const noexcept { return g_; }
  /// M_lambda - C.
  const Matrix &energy_matrix() const noexcept { return a_; }

  double det_energy() const noexcept { return det_a_; }
  double det_i_minus_p() const noexcept { return det_ip_; }
  /// Probability that the chain started at x is killed on its next step.
  double kill_probability(std::size_t x) const {
    return graph_.killing()(x) / lambda_(x);
  }

private:
  friend ChainKernel build_kernel(const WeightedGraph &g);
  explicit ChainKernel(WeightedGraph g) : graph_(std::move(g)) {}

  WeightedGraph graph_;
  Vector lambda_;
  Matrix p_;
  Matrix g_;
  Matrix a_;
  double det_a_ = 0.0;
  double det_ip_ = 0.0;
};

/// Throws Error(NonTransient) if M_lambda - C fails a Cholesky factorization
/// with relative pivot threshold 1e-12.
ChainKernel build_kernel(const WeightedGraph &g);

/// Bilinear Dirichlet form E(f, h).
double energy(const WeightedGraph &g, const Vector &f, const Vector &h);

/// E^{(2 pi i omega)}(f, conj f), real and nonnegative.
double twisted_energy(const WeightedGraph &g, const OneForm &omega,
                      const CVector &f);

/// Throws Error(BadForm) unless `omega` is square of the graph size and
/// antisymmetric to 1e-12.
void check_one_form(const WeightedGraph &g, const OneForm &omega);

} // namespace loopsoup
