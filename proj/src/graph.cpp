#include "loopsoup/graph.hpp"

#include "loopsoup/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace loopsoup {

namespace {

constexpr double kPivotThreshold = 1e-12;

std::string field_error(const std::string &field, const std::string &msg) {
  return "field '" + field + "': " + msg;
}

} // namespace

WeightedGraph::WeightedGraph(std::vector<std::string> vertices,
                             Matrix conductances, Vector killing)
    : names_(std::move(vertices)), c_(std::move(conductances)),
      kappa_(std::move(killing)) {
  const auto n = names_.size();
  if (n == 0)
    throw Error(Errc::BadGraph, "graph has no vertices");
  if (static_cast<std::size_t>(c_.rows()) != n ||
      static_cast<std::size_t>(c_.cols()) != n)
    throw Error(Errc::BadGraph, "conductance matrix shape does not match vertex count");
  if (static_cast<std::size_t>(kappa_.size()) != n)
    throw Error(Errc::BadGraph, "killing vector size does not match vertex count");

  for (std::size_t x = 0; x < n; ++x) {
    if (!lookup_.emplace(names_[x], x).second)
      throw Error(Errc::BadGraph, "duplicate vertex '" + names_[x] + "'");
    if (!std::isfinite(kappa_(x)) || kappa_(x) < 0.0)
      throw Error(Errc::BadGraph, "killing at '" + names_[x] + "' must be finite and >= 0");
    if (c_(x, x) != 0.0)
      throw Error(Errc::BadGraph, "self-loop conductance at '" + names_[x] + "'");
  }

  adj_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double cxy = c_(x, y);
      if (!std::isfinite(cxy) || cxy < 0.0)
        throw Error(Errc::BadGraph, "conductance " + names_[x] + "-" + names_[y] +
                                        " must be finite and >= 0");
      if (cxy != c_(y, x))
        throw Error(Errc::BadGraph, "conductance " + names_[x] + "-" + names_[y] +
                                        " is not symmetric");
      if (cxy > 0.0) {
        adj_[x].push_back(y);
        if (x < y)
          edges_.emplace_back(x, y);
      }
    }
  }
}

WeightedGraph WeightedGraph::from_edges(std::vector<std::string> vertices,
                                        const std::vector<EdgeSpec> &edges,
                                        const std::map<std::string, double> &killing) {
  const auto n = vertices.size();
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    idx.emplace(vertices[i], i);
  auto at = [&](const std::string &v) {
    auto it = idx.find(v);
    if (it == idx.end())
      throw Error(Errc::BadGraph, "unknown vertex '" + v + "'");
    return it->second;
  };

  Matrix c = Matrix::Zero(n, n);
  for (const auto &e : edges) {
    const auto u = at(e.u), v = at(e.v);
    if (u == v)
      throw Error(Errc::BadGraph, "self-loop at '" + e.u + "'");
    if (!(e.c > 0.0) || !std::isfinite(e.c))
      throw Error(Errc::BadGraph, "edge " + e.u + "-" + e.v + " needs a positive conductance");
    if (c(u, v) != 0.0)
      throw Error(Errc::BadGraph, "duplicate edge " + e.u + "-" + e.v);
    c(u, v) = c(v, u) = e.c;
  }
  Vector kappa = Vector::Zero(n);
  for (const auto &[v, k] : killing)
    kappa(at(v)) = k;
  return WeightedGraph(std::move(vertices), std::move(c), std::move(kappa));
}

WeightedGraph WeightedGraph::from_json(const nlohmann::json &doc) {
  if (!doc.is_object())
    throw Error(Errc::BadGraph, "graph document must be a JSON object");
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw Error(Errc::BadGraph, field_error("vertices", "missing or not an array"));

  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < doc["vertices"].size(); ++i) {
    const auto &v = doc["vertices"][i];
    if (!v.is_string())
      throw Error(Errc::BadGraph,
                  field_error("vertices[" + std::to_string(i) + "]", "must be a string"));
    vertices.push_back(v.get<std::string>());
  }

  std::vector<EdgeSpec> edges;
  if (doc.contains("edges")) {
    const auto &arr = doc["edges"];
    if (!arr.is_array())
      throw Error(Errc::BadGraph, field_error("edges", "must be an array"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const auto &e = arr[i];
      if (!e.is_object())
        throw Error(Errc::BadGraph, field_error(where, "must be an object"));
      for (const char *key : {"u", "v"})
        if (!e.contains(key) || !e[key].is_string())
          throw Error(Errc::BadGraph,
                      field_error(where + "." + key, "missing or not a string"));
      EdgeSpec spec{e["u"].get<std::string>(), e["v"].get<std::string>(), 1.0};
      if (e.contains("c")) {
        if (!e["c"].is_number())
          throw Error(Errc::BadGraph, field_error(where + ".c", "must be a number"));
        spec.c = e["c"].get<double>();
      }
      if (!(spec.c > 0.0))
        throw Error(Errc::BadGraph, field_error(where + ".c", "must be positive"));
      edges.push_back(std::move(spec));
    }
  }

  std::map<std::string, double> killing;
  if (doc.contains("killing")) {
    const auto &k = doc["killing"];
    if (!k.is_object())
      throw Error(Errc::BadGraph, field_error("killing", "must be an object"));
    for (const auto &[name, val] : k.items()) {
      if (!val.is_number())
        throw Error(Errc::BadGraph, field_error("killing." + name, "must be a number"));
      killing[name] = val.get<double>();
    }
  }

  try {
    return from_edges(std::move(vertices), edges, killing);
  } catch (const Error &e) {
    throw Error(Errc::BadGraph, std::string("invalid graph: ") + e.what());
  }
}

WeightedGraph WeightedGraph::parse(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    // nlohmann reports "at line L, column C" in its message.
    throw Error(Errc::BadGraph, std::string("malformed JSON: ") + e.what());
  }
  return from_json(doc);
}

WeightedGraph WeightedGraph::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::BadInput, "cannot open graph file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error &e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

nlohmann::json WeightedGraph::to_json() const {
  nlohmann::json doc;
  doc["vertices"] = names_;
  doc["edges"] = nlohmann::json::array();
  for (const auto &[u, v] : edges_)
    doc["edges"].push_back({{"u", names_[u]}, {"v", names_[v]}, {"c", c_(u, v)}});
  doc["killing"] = nlohmann::json::object();
  for (std::size_t x = 0; x < size(); ++x)
    if (kappa_(x) != 0.0)
      doc["killing"][names_[x]] = kappa_(x);
  return doc;
}

std::optional<std::size_t> WeightedGraph::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end())
    return std::nullopt;
  return it->second;
}

std::size_t WeightedGraph::index(std::string_view name) const {
  if (auto i = find(name))
    return *i;
  throw Error(Errc::BadInput, "unknown vertex '" + std::string(name) + "'");
}

bool WeightedGraph::connected() const {
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (auto y : adj_[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  return count == size();
}

WeightedGraph WeightedGraph::without_vertex(std::size_t x0) const {
  if (x0 >= size())
    throw Error(Errc::BadInput, "vertex index out of range");
  if (size() == 1)
    throw Error(Errc::BadGraph, "cannot remove the only vertex");
  std::vector<std::string> names;
  std::vector<std::size_t> keep;
  for (std::size_t x = 0; x < size(); ++x)
    if (x != x0) {
      names.push_back(names_[x]);
      keep.push_back(x);
    }
  const auto m = keep.size();
  Matrix c(m, m);
  Vector kappa(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      c(i, j) = c_(keep[i], keep[j]);
    kappa(i) = kappa_(keep[i]) + c_(keep[i], x0);
  }
  return WeightedGraph(std::move(names), std::move(c), std::move(kappa));
}

ChainKernel build_kernel(const WeightedGraph &g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  ChainKernel k(g);
  const Matrix &c = g.conductances();
  k.lambda_ = c.rowwise().sum() + g.killing();
  k.a_ = Matrix(k.lambda_.asDiagonal()) - c;

  Eigen::LLT<Matrix> llt(k.a_);
  const double scale = k.a_.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success)
    throw Error(Errc::NonTransient,
                "energy form is not positive definite (a component carries no killing)");
  const Matrix l = llt.matrixL();
  double det = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot > kPivotThreshold * scale))
      throw Error(Errc::NonTransient,
                  "energy form pivot below threshold at '" + g.name(i) +
                      "' (a component carries no killing)");
    det *= pivot;
  }
  k.det_a_ = det;
  k.det_ip_ = det / k.lambda_.prod();

  k.p_ = k.lambda_.cwiseInverse().asDiagonal() * c;
  Matrix green = llt.solve(Matrix::Identity(n, n));
  k.g_ = 0.5 * (green + green.transpose());
  return k;
}

double energy(const WeightedGraph &g, const Vector &f, const Vector &h) {
  const auto n = g.size();
  if (static_cast<std::size_t>(f.size()) != n || static_cast<std::size_t>(h.size()) != n)
    throw Error(Errc::BadGraph, "vertex function size does not match graph");
  const Matrix &c = g.conductances();
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y)
      total += 0.5 * c(x, y) * (f(x) - f(y)) * (h(x) - h(y));
    total += g.killing()(x) * f(x) * h(x);
  }
  return total;
}

void check_one_form(const WeightedGraph &g, const OneForm &omega) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (omega.rows() != n || omega.cols() != n)
    throw Error(Errc::BadForm, "one-form shape does not match graph");
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = x; y < n; ++y)
      if (std::abs(omega(x, y) + omega(y, x)) > 1e-12)
        throw Error(Errc::BadForm, "one-form is not antisymmetric at (" + g.name(x) +
                                       ", " + g.name(y) + ")");
}

double twisted_energy(const WeightedGraph &g, const OneForm &omega,
                      const CVector &f) {
  check_one_form(g, omega);
  if (static_cast<std::size_t>(f.size()) != g.size())
    throw Error(Errc::BadGraph, "vertex function size does not match graph");
  const Matrix &c = g.conductances();
  const auto n = g.size();
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (c(x, y) == 0.0)
        continue;
      const auto phase = std::polar(1.0, 2.0 * std::numbers::pi * omega(x, y));
      total += 0.5 * c(x, y) * std::norm(f(x) - phase * f(y));
    }
    total += g.killing()(x) * std::norm(f(x));
  }
  return total;
}

} // namespace loopsoup
