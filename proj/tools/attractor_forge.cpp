// attractor_forge <certify|simulate|pullback|rates|noise-gen> --config PATH [--seed N] [--out DIR]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pullback attractor simulation and verification runs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", af::version_string());

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  const char* verbs[] = {"certify", "simulate", "pullback", "rates", "noise-gen"};
  const char* blurbs[] = {"numerically certify the structural conditions of a drift",
                          "solve one trajectory and write norms and energy diagnostics",
                          "pullback a bundle of initial fields along a ladder of start times",
                          "check the polynomial or exponential contraction bound",
                          "generate and persist a noise path"};
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(verbs[i], blurbs[i]);
    sub->add_option("--config", config_path, "experiment config file")->required();
    seed_opts.push_back(sub->add_option("--seed", seed, "seed (overrides the config)"));
    sub->add_option("--out", out_dir, "output directory");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : af::kExitConfig;
  }

  std::size_t which = 0;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) which = i;

  try {
    std::ifstream in(config_path);
    if (!in) throw af::ConfigError("cannot open config '" + config_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    af::ExperimentConfig cfg = af::parse_config(text.str());
    if (af::to_string(cfg.kind()) != verbs[which])
      throw af::ConfigError(std::string("config describes a '") + af::to_string(cfg.kind()) +
                            "' experiment, not '" + verbs[which] + "'");
    af::RunOptions opt;
    opt.out_dir = out_dir;
    if (seed_opts[which]->count() > 0) opt.seed_override = seed;
    return af::run_experiment(cfg, opt, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return af::exit_code_for(e);
  }
}
