#include "loopsoup/lab.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char **argv) {
  using loopsoup::OutputFormat;
  using loopsoup::SamplerKind;

  loopsoup::RunConfig cfg;
  CLI::App app{"Loop soups, free fields and Eulerian networks on finite graphs"};
  app.add_option("subcommand", cfg.subcommand, "what to run")
      ->required()
      ->check(CLI::IsMember(loopsoup::subcommands()));
  app.add_option("--graph", cfg.graph, "graph JSON file")->required();
  app.add_option("--alpha", cfg.alpha, "soup intensity")->capture_default_str();
  app.add_option("--replicas", cfg.replicas, "Monte-Carlo replicas")->capture_default_str();
  app.add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", cfg.out, "write the report here instead of stdout");
  std::map<std::string, OutputFormat> formats{{"json", OutputFormat::Json},
                                              {"csv", OutputFormat::Csv}};
  app.add_option("--format", cfg.format, "json or csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  std::map<std::string, SamplerKind> samplers{{"direct", SamplerKind::Direct},
                                              {"wilson", SamplerKind::Wilson}};
  app.add_option("--sampler", cfg.sampler, "direct or wilson")
      ->transform(CLI::CheckedTransformer(samplers, CLI::ignore_case));
  app.add_option("--grid", cfg.grid, "Fourier grid per dimension")->capture_default_str();
  app.add_option("--delta", cfg.delta, "mass budget for network enumeration")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "loop-length tail cut")->capture_default_str();
  app.add_option("--z-threshold", cfg.z_threshold)->capture_default_str();
  app.add_option("--ks-threshold", cfg.ks_threshold)->capture_default_str();
  app.add_option("--tv-threshold", cfg.tv_threshold)->capture_default_str();
  app.add_option("--tolerance", cfg.tolerance, "exact-comparison tolerance")->capture_default_str();
  app.add_option("--network", cfg.network, "network JSON literal or file");
  app.add_option("--x0", cfg.x0, "Ray-Knight base vertex");
  app.add_option("--rho", cfg.rho, "Ray-Knight local time")->capture_default_str();
  app.add_option("--edge", cfg.edges, "oriented edge x:y (repeatable)");
  app.add_option("--point", cfg.points, "vertex (repeatable)");
  app.add_option("--chi-scale", cfg.chi_scale, "chi = scale * lambda")->capture_default_str();
  app.add_option("--source", cfg.sources, "max-flow source vertex (repeatable)");
  app.add_option("--sink", cfg.sinks, "max-flow sink vertex (repeatable)");
  app.add_option("--modifiers", cfg.modifiers, "random modifiers for genfun")->capture_default_str();
  app.add_flag("--verify", cfg.verify, "homology-dist: Monte-Carlo comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  const auto result = loopsoup::run(cfg);
  if (!cfg.out)
    std::cout << result.text;
  if (result.document.contains("error"))
    std::cerr << "error: " << result.document["error"]["message"].get<std::string>() << '\n';
  return result.exit_code;
}
