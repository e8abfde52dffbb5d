#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scmref/commands.hpp"
#include "scmref/config.hpp"
#include "scmref/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kUserError = 2, kNumericalError = 3 };

int fail(int code, const std::string& kind, const std::string& message) {
  nlohmann::json err{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-cascode current reference design tool"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  scmref::commands::LutGenSpec lutgen;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--format", format, "csv or json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
  };
  auto* solve = app.add_subcommand("solve", "operating points and I_REF(T)");
  auto* valley = app.add_subcommand("valley", "TC valleys, fits and TC maps");
  auto* size = app.add_subcommand("size", "design flow and transistor sizing");
  auto* mc = app.add_subcommand("mc", "Monte Carlo / first-order variability");
  auto* ss = app.add_subcommand("smallsignal", "line sensitivity and dominant pole");
  auto* lg = app.add_subcommand("lutgen", "write an ACM-synthesized device LUT");
  for (auto* sub : {solve, valley, size, mc, ss, lg}) add_common(sub);
  lg->add_option("--vg-lo", lutgen.vg_lo, "lowest gate voltage [V]");
  lg->add_option("--vg-hi", lutgen.vg_hi, "highest gate voltage [V]");
  lg->add_option("--vg-points", lutgen.vg_points, "gate-voltage samples");
  lg->add_option("--vs-hi", lutgen.vs_hi, "highest source voltage [V]");
  lg->add_option("--vs-points", lutgen.vs_points, "source-voltage samples");
  lg->add_option("--length", lutgen.length_m, "device length [m]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUserError, "usage", e.what());
  }

  try {
    scmref::config::RunConfig cfg = scmref::config::load(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (mc->count("--seed") > 0) {
      if (!cfg.mc) cfg.mc = scmref::config::McSpec{};
      cfg.mc->seed = seed;
    }

    scmref::report::StagedOutput out("");
    if (solve->parsed()) out = scmref::commands::cmd_solve(cfg);
    if (valley->parsed()) out = scmref::commands::cmd_valley(cfg);
    if (size->parsed()) out = scmref::commands::cmd_size(cfg);
    if (mc->parsed()) out = scmref::commands::cmd_mc(cfg);
    if (ss->parsed()) out = scmref::commands::cmd_smallsignal(cfg);
    if (lg->parsed()) out = scmref::commands::cmd_lutgen(cfg, lutgen);
    for (const auto& path : out.commit()) std::cout << path << '\n';
    return kOk;
  } catch (const scmref::InputError& e) {
    return fail(kUserError, "config", e.what());
  } catch (const scmref::DomainError& e) {
    return fail(kUserError, "domain", e.what());
  } catch (const scmref::InfeasibleDesign& e) {
    return fail(kNumericalError, "infeasible", e.what());
  } catch (const scmref::SaturatedDevice& e) {
    return fail(kNumericalError, "saturated", e.what());
  } catch (const scmref::DegenerateDesign& e) {
    return fail(kNumericalError, "degenerate", e.what());
  } catch (const scmref::SolverError& e) {
    return fail(kNumericalError, "solver", e.what());
  } catch (const std::exception& e) {
    return fail(kNumericalError, "internal", e.what());
  }
}
