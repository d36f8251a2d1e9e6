// txamp: amplification-attack modelling, peer estimation, gossip simulation,
// spam detection and egress economics for transaction-gossip networks.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "txamp/config.hpp"
#include "txamp/errors.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  bool seed_set = false;
  std::vector<std::string> overrides;
};

txamp::Config load_config(const GlobalOpts& opts) {
  txamp::Config cfg;
  if (!opts.config_path.empty()) cfg = txamp::Config::from_file(opts.config_path);
  if (opts.seed_set) cfg.set("seed", std::to_string(opts.seed));
  for (const auto& kv : opts.overrides) cfg.apply_override(kv);
  return cfg;
}

void add_global_options(CLI::App* cmd, GlobalOpts& opts) {
  cmd->add_option("--config", opts.config_path, "flat key = value configuration file");
  cmd->add_option("--out", opts.out_dir, "output directory (default: current)");
  cmd->add_option("--seed", opts.seed, "override the run seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--set", opts.overrides, "config override key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transaction amplification toolkit"};
  app.require_subcommand(1);

  GlobalOpts opts;
  int (*handler)(const txamp::Config&, const std::string&) = nullptr;

  auto* model = app.add_subcommand("model", "closed-form waste and amplification factors");
  add_global_options(model, opts);
  model->callback([&] { handler = txamp::cli::cmd_model; });

  auto* infer = app.add_subcommand("infer", "peer-count estimation from message logs");
  add_global_options(infer, opts);
  infer->callback([&] { handler = txamp::cli::cmd_infer; });

  auto* simulate = app.add_subcommand("simulate", "gossip and eviction attack simulation");
  add_global_options(simulate, opts);
  simulate->callback([&] { handler = txamp::cli::cmd_simulate; });

  auto* detect = app.add_subcommand("detect", "spam instance detection over txpool logs");
  add_global_options(detect, opts);
  detect->callback([&] { handler = txamp::cli::cmd_detect; });

  auto* econ = app.add_subcommand("econ", "egress pricing and latency economics");
  add_global_options(econ, opts);
  econ->callback([&] { handler = txamp::cli::cmd_econ; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const txamp::Config cfg = load_config(opts);
    return handler(cfg, opts.out_dir);
  } catch (const txamp::parse_error& e) {
    std::fprintf(stderr, "txamp: input error: %s\n", e.what());
    return 1;
  } catch (const txamp::parameter_error& e) {
    std::fprintf(stderr, "txamp: input error: %s\n", e.what());
    return 1;
  } catch (const txamp::configuration_error& e) {
    std::fprintf(stderr, "txamp: input error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "txamp: internal error: %s\n", e.what());
    return 2;
  }
}
