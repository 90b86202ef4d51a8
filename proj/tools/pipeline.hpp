#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tlp::cli {

struct RunRequest {
  std::string command;  // shocks | lp | regimed | signsplit | regions | synth | plot
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // synth only, overrides [dgp] seed
};

// One subcommand end to end: parse + validate config, run the engine, stage
// artifacts, write the manifest, promote atomically. Throws tlp::Error.
void run(const RunRequest& req);

}  // namespace tlp::cli
