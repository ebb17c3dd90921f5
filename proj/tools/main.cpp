// plpot: batch driver for the p-Laplace potential laboratory.  Reads a JSON
// experiment config, runs one subcommand (solve, potential, lorentz, verify,
// hodge, sweep), writes CSV + JSON artifacts into the output directory, and
// exits 0 exactly when every reported check passed and no solve diverged.
// Config or file errors exit 2 with a diagnostic naming the offending field.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "config_view.hpp"
#include "reporting.hpp"
#include "runners.hpp"
#include "plpot/error.hpp"
#include "plpot/parallel.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string cap_file;
  std::int64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (JSON)")
      ->required();
  cmd->add_option("--out", c.out,
                  "output directory (overrides the config's \"out\")");
  cmd->add_option("--seed", c.seed,
                  "seed override (overrides the config's \"seed\")");
  cmd->add_option("--threads", c.threads,
                  "worker count for sweeps (overrides PLPOT_THREADS)");
  cmd->add_option("--cap-file", c.cap_file,
                  "JSON file of empirical-constant caps (overrides built-ins)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "plpot: p-Laplace potential laboratory.  Batch driver wiring JSON "
      "experiment configs to solves, nonlinear potentials, Lorentz norms, "
      "and inequality verification; emits machine-readable CSV/JSON reports."};
  app.require_subcommand(1);

  Common c;
  const struct {
    const char* name;
    const char* desc;
  } subs[] = {
      {"solve",
       "run one Dirichlet or fixed-point solve and write the solution field"},
      {"potential", "sweep nonlinear potentials over a set of centers"},
      {"lorentz",
       "rearrangements, Lorentz norms, and the square identity on seeded "
       "fields"},
      {"verify",
       "check one inequality family (or \"all\") on a solved problem"},
      {"hodge", "gradient decomposition rigidity sweep over seeded fields"},
      {"sweep", "cross-product parameter sweep with per-cell checks"},
  };
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.desc), c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    plcli::RunContext ctx;
    ctx.config = plcli::load_json_file(c.config);
    plcli::View root(ctx.config, "");
    root.check_keys({"seed", "out", "grid", "model", "problem", "potential",
                     "lorentz", "verify", "hodge", "sweep"});
    // Shared blocks are validated whenever present, even if the invoked
    // subcommand does not consume them; command blocks are validated in
    // full by their runner.
    if (auto gv = root.opt("grid")) plcli::build_grid(*gv);
    if (auto mv = root.opt("model")) {
      int dim = 2;
      if (auto gv = root.opt("grid")) dim = plcli::build_grid(*gv).dim();
      plcli::build_model(*mv, dim);
    }

    ctx.seed = sub->count("--seed")
                   ? static_cast<std::uint64_t>(c.seed)
                   : static_cast<std::uint64_t>(root.integer("seed", 0));
    const std::string out =
        sub->count("--out") ? c.out : root.str("out", "plpot_out");
    ctx.out_dir = out;
    std::filesystem::create_directories(ctx.out_dir);
    if (sub->count("--threads")) plpot::set_thread_count(c.threads);
    if (sub->count("--cap-file")) ctx.caps.load_overrides(c.cap_file);

    const std::string name = sub->get_name();
    if (name == "solve") return plcli::run_solve(ctx);
    if (name == "potential") return plcli::run_potential(ctx);
    if (name == "lorentz") return plcli::run_lorentz(ctx);
    if (name == "verify") return plcli::run_verify(ctx);
    if (name == "hodge") return plcli::run_hodge(ctx);
    if (name == "sweep") return plcli::run_sweep(ctx);
    std::cerr << "plpot: unknown subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "plpot: " << e.what() << "\n";
    return 2;
  }
}
