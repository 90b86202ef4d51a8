#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "pipeline.hpp"
#include "taylorlp/errors.hpp"
#include "taylorlp/version.hpp"

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int exit_code(tlp::ErrorClass c) {
  switch (c) {
    case tlp::ErrorClass::config: return 2;
    case tlp::ErrorClass::data: return 3;
    case tlp::ErrorClass::estimation: return 4;
    case tlp::ErrorClass::io: return 5;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monetary policy shocks and gendered labor-market impulse responses"};
  app.set_version_flag("--version", std::string(tlp::kVersion));
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed = 0;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"shocks", "estimate policy rules and export standardized shocks"},
      {"lp", "impulse-response batteries for the configured outcomes"},
      {"regimed", "state-dependent (smooth transition) impulse responses"},
      {"signsplit", "tightening vs easing impulse responses"},
      {"regions", "per-region impulse responses"},
      {"synth", "generate a synthetic panel with known ground truth"},
      {"plot", "render an impulse-response CSV as SVG"},
  };
  for (const auto& [name, desc] : cmds) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config, "config file")->required();
    sub->add_option("--out", out, "output directory")->required();
    if (name == "synth") sub->add_option("--seed", seed, "override the configured seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "config_error: " << one_line(e.what()) << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  tlp::cli::RunRequest req;
  req.command = sub->get_name();
  req.config_path = config;
  req.out_dir = out;
  if (req.command == "synth" && sub->count("--seed") > 0) req.seed = seed;

  try {
    tlp::cli::run(req);
  } catch (const tlp::Error& err) {
    std::cerr << tlp::error_class_name(err.cls()) << ": " << one_line(err.what()) << "\n";
    return exit_code(err.cls());
  } catch (const std::exception& ex) {
    std::cerr << "error: " << one_line(ex.what()) << "\n";
    return 1;
  }
  return 0;
}
