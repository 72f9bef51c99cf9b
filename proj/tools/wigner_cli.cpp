// wigner: command-line driver for the phase-space toolkit.
//
//   wigner <command> [--config <path>] [--out <dir>]
//
// Commands: wigner, evolve, husimi, star, expect, demo-negativity.
// Exit codes: 0 ok, 1 I/O or demo failure, 2 config error, 3 numeric abort.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "wigner/cli.hpp"

namespace {

using wigner::cli::RunConfig;

RunConfig load(const std::string& path) {
  return path.empty() ? RunConfig::empty() : RunConfig::load_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner phase-space toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::string> star_a;
  std::optional<std::string> star_b;
  std::optional<double> star_hbar;

  const auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", config_path, "key = value run configuration");
    if (config_required) opt->required();
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  };

  auto* wigner_cmd = app.add_subcommand("wigner", "Wigner function of a state, with marginals");
  add_common(wigner_cmd, true);
  auto* evolve_cmd = app.add_subcommand("evolve", "evolve a Wigner function in time");
  add_common(evolve_cmd, true);
  auto* husimi_cmd = app.add_subcommand("husimi", "Gaussian-smoothed (Husimi) distribution");
  add_common(husimi_cmd, true);
  auto* expect_cmd = app.add_subcommand("expect", "phase-space expectation value of an observable");
  add_common(expect_cmd, true);
  auto* demo_cmd = app.add_subcommand("demo-negativity", "two-interval negativity demonstration");
  add_common(demo_cmd, false);

  auto* star_cmd = app.add_subcommand("star", "Moyal star product of two polynomial symbols");
  star_cmd->add_option("a", star_a, "left operand, e.g. \"q^2*p + 0.5*i*p\"");
  star_cmd->add_option("b", star_b, "right operand");
  star_cmd->add_option("--hbar", star_hbar, "numeric hbar (default: keep hbar symbolic)");
  star_cmd->add_option("--config", config_path, "config with star.a / star.b");
  auto* star_out = star_cmd->add_option("--out", out_dir, "also write star.txt here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wigner::cli::kConfigError;
  }

  try {
    if (star_cmd->parsed()) {
      const RunConfig rc = load(config_path);
      std::optional<std::filesystem::path> dir;
      if (star_out->count() > 0) dir = out_dir;
      return wigner::cli::cmd_star(rc, star_a, star_b, star_hbar, dir, std::cout);
    }
    const RunConfig rc = load(config_path);
    if (wigner_cmd->parsed()) return wigner::cli::cmd_wigner(rc, out_dir, std::cout);
    if (evolve_cmd->parsed()) return wigner::cli::cmd_evolve(rc, out_dir, std::cout);
    if (husimi_cmd->parsed()) return wigner::cli::cmd_husimi(rc, out_dir, std::cout);
    if (expect_cmd->parsed()) return wigner::cli::cmd_expect(rc, out_dir, std::cout);
    if (demo_cmd->parsed()) return wigner::cli::cmd_demo_negativity(rc, out_dir, std::cout);
  } catch (const wigner::NumericAbort& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return wigner::cli::kNumericAbort;
  } catch (const wigner::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return wigner::cli::kFailure;
  } catch (const wigner::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return wigner::cli::kConfigError;
  } catch (const wigner::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return wigner::cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return wigner::cli::kFailure;
  }
  return wigner::cli::kFailure;
}
