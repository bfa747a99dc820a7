// SPDX-License-Identifier: MIT
// favard: command-line driver for the Favard length experiments.
#include <fmt/format.h>

#include <cstdlib>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "favard/errors.hpp"

namespace {

favard::ExperimentConfig resolve_config(const std::string& path) {
  favard::ExperimentConfig cfg = path.empty() ? favard::parse_config("{}") : favard::load_config(path);
  if (const char* w = std::getenv("FAVARD_WORKERS"); w != nullptr && *w != '\0') {
    try {
      cfg.workers = std::stoi(w);
    } catch (const std::exception&) {
      throw favard::PreconditionError(fmt::format("FAVARD_WORKERS: '{}' is not an integer", w));
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Favard length, conical energies and Lipschitz graph extraction"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::string input;
  std::function<favard::cli::CommandOutput(const favard::ExperimentConfig&)> action;

  auto common = [&](CLI::App* sub, bool needs_input) {
    sub->add_option("--config", config_path, "JSON experiment configuration");
    sub->add_option("--out", out_dir, "Directory for the report and tables");
    if (needs_input) sub->add_option("input", input, "Segment CSV or square-set JSON")->required();
  };

  std::uint64_t needles = 0;
  auto* compute = app.add_subcommand("compute", "Favard length by quadrature");
  common(compute, true);
  compute->add_option("--mc", needles, "Buffon needles for a Monte Carlo cross-check");
  compute->callback([&] {
    action = [&](const auto& cfg) { return favard::cli::run_compute(cfg, input, needles > 0 ? needles : cfg.mc_needles); };
  });

  std::uint64_t mc_needles = 1000000;
  auto* mc = app.add_subcommand("mc", "Favard length by quadrature and Buffon needles");
  common(mc, true);
  mc->add_option("--needles", mc_needles, "Number of needles");
  mc->callback([&] { action = [&](const auto& cfg) { return favard::cli::run_mc(cfg, input, mc_needles); }; });

  int n_max = -1;
  auto* cantor = app.add_subcommand("cantor-decay", "Favard length of the 4-corners skeletons");
  common(cantor, false);
  cantor->add_option("--n-max", n_max, "Last generation (at most 6)");
  cantor->callback([&] {
    action = [&](const auto& cfg) { return favard::cli::run_cantor_decay(cfg, n_max >= 0 ? n_max : cfg.n_max); };
  });

  double kappa = -1.0;
  auto* pipeline = app.add_subcommand("pipeline", "Good directions, propagation and graph extraction");
  common(pipeline, true);
  pipeline->add_option("--kappa", kappa, "Favard ratio hypothesis");
  pipeline->callback([&] {
    action = [&](const auto& cfg) { return favard::cli::run_pipeline(cfg, input, kappa > 0.0 ? kappa : cfg.kappa); };
  });

  double delta = 0.0;
  std::string curve;
  auto* content = app.add_subcommand("content", "Hausdorff content near a curve");
  common(content, true);
  content->add_option("--delta", delta, "Neighbourhood radius")->required();
  content->add_option("--curve", curve, "Polyline CSV")->required();
  content->callback([&] { action = [&](const auto& cfg) { return favard::cli::run_content(cfg, input, delta, curve); }; });

  auto* lattice = app.add_subcommand("lattice-check", "Anisotropic lattice and Whitney invariants");
  common(lattice, true);
  lattice->callback([&] { action = [&](const auto& cfg) { return favard::cli::run_lattice_check(cfg, input); }; });

  auto* tree = app.add_subcommand("tree-check", "Direction tree properties");
  common(tree, true);
  tree->add_option("--kappa", kappa, "Favard ratio hypothesis");
  tree->callback([&] {
    action = [&](const auto& cfg) { return favard::cli::run_tree_check(cfg, input, kappa > 0.0 ? kappa : cfg.kappa); };
  });

  double theta = 0.25;
  double width = 0.0;
  int m0 = -1;
  auto* extract = app.add_subcommand("extract-graph", "Lipschitz graph extraction on all atoms");
  common(extract, true);
  extract->add_option("--theta", theta, "Center of the cone interval J in turns");
  extract->add_option("--width", width, "Length of J in turns (default c_J)");
  extract->add_option("--m0", m0, "Bad-scale bound (default: the largest count)");
  extract->callback([&] {
    action = [&](const auto& cfg) { return favard::cli::run_extract_graph(cfg, input, theta, width, m0); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve_config(config_path);
    const auto out = action(cfg);
    favard::cli::write_outputs(out, out_dir);
    const int code = favard::cli::exit_code(out);
    fmt::print("{}: {} ({})\n", out.command, code == 0 ? "all invariants hold" : "invariant failure",
               out_dir + "/" + out.command + ".json");
    return code;
  } catch (const favard::PreconditionError& e) {
    fmt::print(stderr, "precondition failed: {}\n", e.what());
    return 3;
  } catch (const favard::InvariantError& e) {
    fmt::print(stderr, "invariant failed: {}\n", e.what());
    return 2;
  } catch (const favard::IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
