#include "loopsoup/lab.hpp"

#include "loopsoup/error.hpp"
#include "loopsoup/exact.hpp"
#include "loopsoup/field.hpp"
#include "loopsoup/homology.hpp"
#include "loopsoup/networks.hpp"
#include "loopsoup/stats.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace loopsoup {

namespace {

using json = nlohmann::json;

json matrix_json(const Matrix &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char *sampler_name(SamplerKind k) { return k == SamplerKind::Wilson ? "wilson" : "direct"; }

CheckOptions check_options(const RunConfig &c) {
  CheckOptions o;
  o.replicas = c.replicas;
  o.seed = c.seed;
  o.workers = c.workers;
  o.z_threshold = c.z_threshold;
  o.ks_threshold = c.ks_threshold;
  o.tail_cut = c.epsilon;
  o.sampler = c.sampler;
  return o;
}

Network read_network(const RunConfig &c, const WeightedGraph &g) {
  if (c.network.empty())
    throw Error(Errc::BadInput, "this subcommand needs --network");
  json doc;
  try {
    if (c.network.front() == '{') {
      doc = json::parse(c.network);
    } else {
      std::ifstream in(c.network);
      if (!in)
        throw Error(Errc::BadInput, "cannot open network file '" + c.network + "'");
      doc = json::parse(in);
    }
  } catch (const json::parse_error &e) {
    throw Error(Errc::BadInput, std::string("network JSON: ") + e.what());
  }
  Network k = Network::from_json(doc);
  check_network_on_graph(k, g);
  return k;
}

std::vector<std::size_t> vertex_list(const WeightedGraph &g, const std::vector<std::string> &names) {
  std::vector<std::size_t> out;
  for (const auto &n : names)
    out.push_back(g.index(n));
  return out;
}

std::vector<DirectedEdge> edge_list(const WeightedGraph &g, const std::vector<std::string> &specs) {
  std::vector<DirectedEdge> out;
  for (const auto &s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw Error(Errc::BadInput, "edge '" + s + "' must be written x:y");
    out.emplace_back(g.index(s.substr(0, colon)), g.index(s.substr(colon + 1)));
  }
  return out;
}

/// Result of one subcommand before wrapping.
struct Outcome {
  json result = json::object();
  std::vector<Report> reports;
};

json reports_json(const std::vector<Report> &reports) {
  json arr = json::array();
  for (const auto &r : reports)
    arr.push_back(r.to_json());
  return arr;
}

bool all_pass(const std::vector<Report> &reports) {
  for (const auto &r : reports)
    if (!r.passed())
      return false;
  return true;
}

void flatten(const json &j, const std::string &prefix, std::ostringstream &out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

// ----- subcommands -------------------------------------------------------

Outcome cmd_kernel(const RunConfig &, const ChainKernel &k) {
  Outcome o;
  o.result = {{"vertices", k.graph().vertices()},
              {"lambda", vector_json(k.lambda())},
              {"P", matrix_json(k.transition())},
              {"G", matrix_json(k.green())},
              {"det_energy", k.det_energy()},
              {"det_i_minus_p", k.det_i_minus_p()},
              {"mu_mass_nontrivial", mu_mass_nontrivial(k)}};
  return o;
}

Outcome cmd_sample(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  LoopSoup soup;
  if (c.sampler == SamplerKind::Wilson) {
    if (c.alpha != 1.0)
      throw Error(Errc::BadInput, "the Wilson route samples alpha = 1 only");
    auto w = wilson_sample(k, c.seed);
    std::vector<std::string> parents;
    for (auto p : w.tree.parent)
      parents.push_back(p == kCemetery ? "cemetery" : k.graph().name(static_cast<std::size_t>(p)));
    o.result["tree_parent"] = parents;
    soup = std::move(w.soup);
  } else {
    soup = direct_sample(k, c.alpha, c.epsilon, c.seed);
  }
  o.result["soup"] = soup.to_json(k.graph());
  o.result["occupation"] = vector_json(occupation(soup, k));
  o.result["jumps"] = jump_matrix(soup, k.size()).to_json();
  return o;
}

Outcome cmd_occupation(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const auto obs = sample_observables(k, c.sampler, c.alpha, c.replicas, c.seed, c.workers, c.epsilon);
  Report r("occupation");
  r.meta()["expectation"] = "alpha G_xx";
  json means = json::object();
  for (std::size_t x = 0; x < k.size(); ++x) {
    RunningStats s;
    for (const auto &ob : obs)
      s.add(ob.occupation(static_cast<Eigen::Index>(x)));
    means[k.graph().name(x)] = s.mean();
    r.add_z("mean/" + k.graph().name(x), s.mean(),
            c.alpha * k.green()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)),
            s.stderr_mean(), c.z_threshold);
  }
  o.result["mean_occupation"] = means;
  o.reports.push_back(std::move(r));
  return o;
}

Outcome cmd_jumps(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const auto obs = sample_observables(k, c.sampler, c.alpha, c.replicas, c.seed, c.workers, c.epsilon);
  const auto n = static_cast<Eigen::Index>(k.size());
  const Matrix resolvent = (Matrix::Identity(n, n) - k.transition()).inverse();
  Report r("jumps");
  r.meta()["expectation"] = "alpha P_xy [(I - P)^{-1}]_yx";
  for (const auto &[u, v] : k.graph().edges())
    for (auto [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
      RunningStats s;
      for (const auto &ob : obs)
        s.add(static_cast<double>(ob.jumps(x, y)));
      r.add_z("mean/" + k.graph().name(x) + "," + k.graph().name(y), s.mean(),
              c.alpha * k.p(x, y) *
                  resolvent(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)),
              s.stderr_mean(), c.z_threshold);
    }
  o.reports.push_back(std::move(r));
  return o;
}

Outcome cmd_exact_network(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const Network net = read_network(c, k.graph());
  o.result["network"] = net.to_json();
  o.result["p_alpha1"] = exact_network_prob_alpha1(k, net);
  if (net.total() <= kAlphaRouteMaxTotal)
    o.result["p_alpha"] = {{"alpha", c.alpha}, {"p", exact_network_prob_alpha(k, net, c.alpha)}};
  if (!net.is_zero())
    o.result["mu"] = mu_network_measure(k, net);
  return o;
}

Outcome cmd_best_count(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const Network net = read_network(c, k.graph());
  o.result["network"] = net.to_json();
  o.result["rooted_tours"] = best_tour_count(net);
  o.result["arborescences"] = arborescence_count(net, net.support().front());
  return o;
}

Outcome cmd_mu_network(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  if (!c.network.empty()) {
    const Network net = read_network(c, k.graph());
    o.result["network"] = net.to_json();
    o.result["mu"] = mu_network_measure(k, net);
  }
  o.reports.push_back(verify_mu_total(k, c.delta, c.tolerance));
  return o;
}

Outcome cmd_convolution(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  o.reports.push_back(verify_poisson_convolution(k, c.delta, c.tolerance));
  return o;
}

Outcome cmd_homology(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const CycleBasis basis = cycle_basis(k.graph());
  const HomologyLaw law = homology_distribution(k, basis, c.alpha, c.grid);
  json dist = json::array();
  for (const auto &[j, p] : law.probability)
    dist.push_back({{"class", j.coords}, {"p", p}});
  o.result["distribution"] = std::move(dist);
  o.result["captured_mass"] = law.captured_mass;
  o.result["grid"] = law.grid;
  o.result["max_imaginary"] = law.max_imaginary;
  o.result["clipped_negative"] = law.clipped_negative;
  if (c.verify && basis.size() > 0)
    o.reports.push_back(verify_homology_law(k, c.alpha, c.grid, check_options(c), c.tv_threshold));
  return o;
}

Outcome cmd_jacobian(const RunConfig &, const ChainKernel &k) {
  Outcome o;
  const auto &g = k.graph();
  const CycleBasis basis = cycle_basis(g);
  const JacobianVolume v = jacobian_volume(g);
  o.result = {{"cycles", basis.size()},
              {"volume", v.value},
              {"via_intersection", v.via_intersection},
              {"via_trees", v.via_trees},
              {"degenerate", v.degenerate},
              {"spanning_tree_weight_sum", spanning_tree_weight_sum(g)}};
  if (basis.size() > 0) {
    o.result["intersection_matrix"] = matrix_json(intersection_matrix(basis, g));
    json forms = json::array();
    for (const auto &w : harmonic_basis(g, basis))
      forms.push_back(matrix_json(w));
    o.result["harmonic_forms"] = std::move(forms);
  }
  o.reports.push_back(verify_jacobian(g));
  return o;
}

Outcome cmd_isomorphism(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  o.reports.push_back(verify_isomorphism(k, check_options(c)));
  return o;
}

std::size_t ray_knight_base(const RunConfig &c, const ChainKernel &k) {
  if (!c.x0.empty())
    return k.graph().index(c.x0);
  for (std::size_t x = 0; x < k.size(); ++x)
    if (k.graph().killing()(static_cast<Eigen::Index>(x)) > 0.0)
      return x;
  throw Error(Errc::BadSupport, "graph has no killed vertex");
}

Outcome cmd_ray_knight(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const auto x0 = ray_knight_base(c, k);
  o.reports.push_back(ray_knight_check(k, x0, c.rho, check_options(c)));
  o.reports.push_back(decomposition_independence_check(k, x0, check_options(c)));
  return o;
}

Outcome cmd_moments(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const auto edges = edge_list(k.graph(), c.edges);
  const auto points = vertex_list(k.graph(), c.points);
  o.result["closed_form"] = wick_moment(k, edges, points);
  o.reports.push_back(verify_moment_formula(k, edges, points, check_options(c)));
  return o;
}

Outcome cmd_det_identity(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const Vector chi = c.chi_scale * k.lambda();
  o.result["rhs"] = det_identity_rhs(k, chi);
  o.reports.push_back(verify_det_identity(k, chi, check_options(c)));
  return o;
}

Outcome cmd_genfun(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  Engine rng = make_stream(derive_seed(c.seed, "genfun/modifiers"));
  for (std::size_t i = 0; i < c.modifiers; ++i) {
    const ModifierMatrix z = random_modifier(k.graph(), rng);
    CheckOptions opts = check_options(c);
    opts.seed = derive_seed(c.seed, "genfun/" + std::to_string(i));
    Report r = verify_generating_function(k, z, c.alpha, opts);
    r.meta()["modifier_index"] = i;
    o.reports.push_back(std::move(r));
  }
  return o;
}

Outcome cmd_maxflow(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const Network net = read_network(c, k.graph());
  o.result["max_flow"] = max_flow(net, vertex_list(k.graph(), c.sources), vertex_list(k.graph(), c.sinks));
  return o;
}

Outcome cmd_verify_all(const RunConfig &c, const ChainKernel &k) {
  Outcome o;
  const auto &g = k.graph();
  const auto opts = check_options(c);
  json skipped = json::array();

  o.reports.push_back(verify_isomorphism(k, opts));
  if (!g.edges().empty()) {
    const auto [u, v] = g.edges().front();
    o.reports.push_back(verify_moment_formula(k, {{u, v}}, {}, opts));
    o.reports.push_back(verify_moment_formula(k, {{u, v}, {v, u}}, {}, opts));
  }
  o.reports.push_back(verify_moment_formula(k, {}, {0}, opts));
  o.reports.push_back(verify_det_identity(k, k.lambda(), opts));
  for (double alpha : {0.5, 1.0, 2.0}) {
    Engine rng = make_stream(derive_seed(c.seed, "verify-all/modifier"), static_cast<std::uint64_t>(alpha * 4));
    CheckOptions gopts = opts;
    gopts.seed = derive_seed(c.seed, "verify-all/genfun/" + std::to_string(alpha));
    o.reports.push_back(verify_generating_function(k, random_modifier(g, rng), alpha, gopts));
  }
  o.reports.push_back(verify_network_law(k, opts, c.delta, c.tv_threshold));
  o.reports.push_back(compare_samplers(k, opts, c.tv_threshold));
  o.reports.push_back(verify_poisson_convolution(k, c.delta, c.tolerance));
  o.reports.push_back(verify_mu_total(k, c.delta, c.delta / k.det_i_minus_p()));
  if (g.connected()) {
    o.reports.push_back(verify_jacobian(g));
    if (cycle_basis(g).size() > 0)
      o.reports.push_back(verify_homology_law(k, 1.0, c.grid, opts, c.tv_threshold));
    else
      skipped.push_back("homology-dist: graph has no cycles");
  } else {
    skipped.push_back("jacobian, homology-dist: graph is not connected");
  }
  std::size_t killed = 0;
  for (std::size_t x = 0; x < k.size(); ++x)
    killed += g.killing()(static_cast<Eigen::Index>(x)) > 0.0;
  if (killed == 1 && k.size() > 1) {
    const auto x0 = ray_knight_base(c, k);
    o.reports.push_back(ray_knight_check(k, x0, c.rho, opts));
    o.reports.push_back(decomposition_independence_check(k, x0, opts));
  } else {
    skipped.push_back("ray-knight: killing is not supported by a single vertex");
  }
  o.result["skipped"] = std::move(skipped);
  return o;
}

using Handler = std::function<Outcome(const RunConfig &, const ChainKernel &)>;

const std::map<std::string, Handler> &handlers() {
  static const std::map<std::string, Handler> table{
      {"kernel", cmd_kernel},
      {"sample", cmd_sample},
      {"occupation", cmd_occupation},
      {"jumps", cmd_jumps},
      {"exact-network", cmd_exact_network},
      {"best-count", cmd_best_count},
      {"mu-network", cmd_mu_network},
      {"convolution-check", cmd_convolution},
      {"homology-dist", cmd_homology},
      {"jacobian", cmd_jacobian},
      {"isomorphism", cmd_isomorphism},
      {"ray-knight", cmd_ray_knight},
      {"moments", cmd_moments},
      {"det-identity", cmd_det_identity},
      {"genfun", cmd_genfun},
      {"maxflow", cmd_maxflow},
      {"verify-all", cmd_verify_all},
  };
  return table;
}

void validate(const RunConfig &c) {
  if (!handlers().contains(c.subcommand))
    throw Error(Errc::BadInput, "unknown subcommand '" + c.subcommand + "'");
  if (c.replicas < 1)
    throw Error(Errc::BadInput, "--replicas must be at least 1");
  if (!(c.alpha > 0.0))
    throw Error(Errc::BadInput, "--alpha must be positive");
  if (!(c.epsilon > 0.0))
    throw Error(Errc::BadInput, "--epsilon must be positive");
  if (c.graph.empty())
    throw Error(Errc::BadInput, "--graph is required");
}

std::string render(const json &doc, const std::vector<Report> &reports, OutputFormat format) {
  if (format == OutputFormat::Json)
    return doc.dump(2) + "\n";
  std::ostringstream out;
  if (!reports.empty()) {
    bool header = true;
    for (const auto &r : reports) {
      std::string csv = r.to_csv();
      if (!header)
        csv.erase(0, csv.find('\n') + 1);
      out << csv;
      header = false;
    }
    return out.str();
  }
  out << "key,value\n";
  flatten(doc, "", out);
  return out.str();
}

} // namespace

json RunConfig::to_json() const {
  return {{"subcommand", subcommand},
          {"graph", graph.string()},
          {"alpha", alpha},
          {"replicas", replicas},
          {"seed", seed},
          {"workers", workers},
          {"out", out ? json(out->string()) : json(nullptr)},
          {"format", format == OutputFormat::Json ? "json" : "csv"},
          {"grid", grid},
          {"delta", delta},
          {"epsilon", epsilon},
          {"sampler", sampler_name(sampler)},
          {"z_threshold", z_threshold},
          {"ks_threshold", ks_threshold},
          {"tv_threshold", tv_threshold},
          {"tolerance", tolerance},
          {"network", network},
          {"x0", x0},
          {"rho", rho},
          {"edges", edges},
          {"points", points},
          {"chi_scale", chi_scale},
          {"sources", sources},
          {"sinks", sinks},
          {"modifiers", modifiers},
          {"verify", verify}};
}

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto &[name, h] : handlers())
      v.push_back(name);
    return v;
  }();
  return names;
}

RunResult run(const RunConfig &config) {
  RunResult res;
  json doc{{"subcommand", config.subcommand},
           {"config", config.to_json()},
           {"conventions",
            {{"complex_field", kComplexConvention},
             {"det_identity_diagonal", kDiagonalConvention},
             {"transition", "P_xy = C_xy / lambda_x"}}},
           {"timestamp", timestamp()}};
  std::vector<Report> reports;
  try {
    validate(config);
    const ChainKernel kernel = build_kernel(WeightedGraph::load(config.graph));
    Outcome out = handlers().at(config.subcommand)(config, kernel);
    const bool pass = all_pass(out.reports);
    doc["result"] = std::move(out.result);
    doc["reports"] = reports_json(out.reports);
    doc["pass"] = pass;
    res.exit_code = pass ? 0 : 2;
    reports = std::move(out.reports);
  } catch (const Error &e) {
    doc["error"] = {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}};
    doc["pass"] = false;
    res.exit_code = 1;
  }
  res.text = render(doc, reports, res.exit_code == 1 ? OutputFormat::Json : config.format);
  res.document = std::move(doc);
  if (config.out) {
    std::ofstream file(*config.out);
    if (!file) {
      res.exit_code = 1;
      res.document["error"] = {{"code", "BadInput"},
                               {"message", "cannot write '" + config.out->string() + "'"}};
    } else {
      file << res.text;
    }
  }
  return res;
}

} // namespace loopsoup
