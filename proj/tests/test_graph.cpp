#include "fixtures.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/graph.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace loopsoup;

namespace {

Errc code_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::BadInput;
}

} // namespace

TEST_CASE("two-point kernel") {
  const auto k = build_kernel(fixtures::two_point());
  CHECK(k.lambda()(0) == doctest::Approx(2.0));
  CHECK(k.lambda()(1) == doctest::Approx(2.0));
  CHECK(k.p(0, 1) == doctest::Approx(0.5));
  CHECK(k.p(1, 0) == doctest::Approx(0.5));
  CHECK(k.p(0, 0) == 0.0);
  CHECK(k.green()(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(k.green()(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(k.det_i_minus_p() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(k.det_energy() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("single vertex kernel") {
  const auto k = build_kernel(fixtures::single_vertex(2.0));
  CHECK(k.lambda()(0) == 2.0);
  CHECK(k.transition()(0, 0) == 0.0);
  CHECK(k.green()(0, 0) == doctest::Approx(0.5));
  CHECK(k.det_i_minus_p() == doctest::Approx(1.0));
}

TEST_CASE("triangle kernel") {
  const auto k = build_kernel(fixtures::triangle());
  for (int x = 0; x < 3; ++x)
    CHECK(k.lambda()(x) == 3.0);
  CHECK(k.det_energy() == doctest::Approx(16.0).epsilon(1e-13));
  CHECK(k.det_i_minus_p() == doctest::Approx(16.0 / 27.0).epsilon(1e-13));
  // M - C = 4I - J, whose inverse is (I + J) / 4
  CHECK(k.green()(0, 0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(k.green()(0, 1) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("kernel errors") {
  CHECK(code_of([] {
          build_kernel(WeightedGraph::from_edges({"a", "b"}, {{"a", "b", 1.0}}, {}));
        }) == Errc::NonTransient);
  // a killed component next to an unkilled one
  CHECK(code_of([] {
          build_kernel(WeightedGraph::from_edges({"a", "b", "c"}, {{"a", "b", 1.0}}, {{"a", 1.0}}));
        }) == Errc::NonTransient);
  Matrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK(code_of([&] { WeightedGraph({"a", "b"}, asym, Vector::Ones(2)); }) == Errc::BadGraph);
  Matrix diag(2, 2);
  diag << 1, 1, 1, 0;
  CHECK(code_of([&] { WeightedGraph({"a", "b"}, diag, Vector::Ones(2)); }) == Errc::BadGraph);
  Matrix neg(2, 2);
  neg << 0, -1, -1, 0;
  CHECK(code_of([&] { WeightedGraph({"a", "b"}, neg, Vector::Ones(2)); }) == Errc::BadGraph);
  CHECK(code_of([&] {
          WeightedGraph({"a", "b"}, Matrix::Zero(2, 2), Vector::Constant(2, -1.0));
        }) == Errc::BadGraph);
}

TEST_CASE("energy examples") {
  const auto g = fixtures::two_point();
  CHECK(energy(g, Vector::Ones(2), Vector::Ones(2)) == doctest::Approx(2.0));
  CHECK(energy(g, Vector::Zero(2), Vector::Zero(2)) == 0.0);
  Vector f(2);
  f << 1, 0;
  CHECK(energy(g, f, f) == doctest::Approx(2.0));
  CHECK(code_of([&] { energy(g, Vector::Ones(3), Vector::Ones(2)); }) == Errc::BadGraph);
}

TEST_CASE("twisted energy examples") {
  const auto g = fixtures::two_point();
  OneForm w = OneForm::Zero(2, 2);
  w(0, 1) = 0.5;
  w(1, 0) = -0.5;
  CHECK(twisted_energy(g, w, CVector::Ones(2)) == doctest::Approx(6.0));
  CHECK(twisted_energy(g, w, CVector::Zero(2)) == 0.0);
  Vector f(2);
  f << 0.3, -1.7;
  CHECK(twisted_energy(g, OneForm::Zero(2, 2), f.cast<std::complex<double>>()) ==
        doctest::Approx(energy(g, f, f)));
  OneForm bad = OneForm::Zero(2, 2);
  bad(0, 1) = 0.5;
  CHECK(code_of([&] { twisted_energy(g, bad, CVector::Ones(2)); }) == Errc::BadForm);
  CHECK(code_of([&] { twisted_energy(g, OneForm::Zero(3, 3), CVector::Ones(2)); }) ==
        Errc::BadForm);
}

TEST_CASE("graph JSON input") {
  const auto g = WeightedGraph::load(fixtures::data_file("two_point.json"));
  CHECK(g.size() == 2);
  CHECK(g.conductance(0, 1) == 1.0);
  CHECK(g.killing()(1) == 1.0);
  CHECK(WeightedGraph::from_json(g.to_json()).conductances() == g.conductances());

  SUBCASE("missing file names the path") {
    try {
      WeightedGraph::load("/nonexistent/graph.json");
      FAIL("no throw");
    } catch (const Error &e) {
      CHECK(e.code() == Errc::BadInput);
      CHECK(std::string(e.what()).find("/nonexistent/graph.json") != std::string::npos);
    }
  }
  SUBCASE("syntax error carries line and column") {
    try {
      WeightedGraph::parse("{\n  \"vertices\": [\"a\",\n}");
      FAIL("no throw");
    } catch (const Error &e) {
      CHECK(e.code() == Errc::BadGraph);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("field diagnostics") {
    try {
      WeightedGraph::parse(R"({"vertices":["a","b"],"edges":[{"u":"a","v":"b","c":-1}]})");
      FAIL("no throw");
    } catch (const Error &e) {
      CHECK(std::string(e.what()).find("edges[0].c") != std::string::npos);
    }
    CHECK(code_of([] { WeightedGraph::parse(R"({"edges":[]})"); }) == Errc::BadGraph);
    CHECK(code_of([] {
            WeightedGraph::parse(R"({"vertices":["a"],"edges":[{"u":"a","v":"z"}]})");
          }) == Errc::BadGraph);
  }
}

TEST_CASE("restriction to D turns conductance into killing") {
  const auto g = fixtures::path3();
  const auto d = g.without_vertex(0);
  REQUIRE(d.size() == 2);
  CHECK(d.name(0) == "b");
  CHECK(d.killing()(0) == doctest::Approx(1.0));
  CHECK(d.killing()(1) == 0.0);
  CHECK(d.conductance(0, 1) == 1.0);
}

TEST_CASE("kernel identities on random graphs") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto g = fixtures::random_connected(rng, n, trial % 5);
    const auto k = build_kernel(g);
    const auto m = static_cast<Eigen::Index>(n);
    double prod_lambda = 1.0;
    for (Eigen::Index x = 0; x < m; ++x)
      prod_lambda *= k.lambda()(x);
    CHECK(k.det_i_minus_p() * prod_lambda == doctest::Approx(k.det_energy()).epsilon(1e-12));
    CHECK((k.green() * k.energy_matrix() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(k.green().minCoeff() >= 0.0);
    CHECK((k.green() - k.green().transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index x = 0; x < m; ++x)
      CHECK(k.transition().row(x).sum() <= 1.0 + 1e-15);
    // strict substochasticity is reached at the killed vertex
    CHECK(k.transition().row(0).sum() < 1.0);

    std::normal_distribution<double> normal;
    Vector f(m);
    for (auto &v : f)
      v = normal(rng);
    const double quad = f.dot(k.energy_matrix() * f);
    CHECK(energy(g, f, f) == doctest::Approx(quad).epsilon(1e-12));
    CHECK(energy(g, f, f) > 0.0);

    OneForm w = OneForm::Zero(m, m);
    for (const auto &[u, v] : g.edges()) {
      const double t = normal(rng);
      w(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = t;
      w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = -t;
    }
    CVector h(m);
    for (auto &v : h)
      v = {normal(rng), normal(rng)};
    CHECK(twisted_energy(g, w, h) >= 0.0);
  }
}
