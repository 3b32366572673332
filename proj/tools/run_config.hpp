#pragma once

// Flat key=value run configuration shared by all l2g subcommands.
//
//   # comment
//   seed = 7
//   epochs = 150
//
// Keys: seed, n, hidden, latent, embed, beta, lr, batch, epochs, reconstruction (sum|mean),
// block_side, close_threshold, above_xy_tol, above_z_tol,
// data_dir, model, report_dir, executor (oracle|stochastic), p_fail, workers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "l2g/geometry.hpp"
#include "l2g/goalgen.hpp"
#include "l2g/grounding.hpp"

namespace l2g::cli {

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t dataset_size = 5000;
  Hyperparams hp;
  geometry::MappingParams mapping;
  std::filesystem::path data_dir = ".";
  std::filesystem::path model_file = "model.cvae";
  std::filesystem::path report_dir = ".";
  ExecutorConfig executor;
  std::size_t workers = 1;
};

// Applies one key=value assignment. Throws kInvalidArgument on unknown keys or
// unparsable values.
void apply(RunConfig& config, const std::string& key, const std::string& value);

// Throws kInvalidArgument with the line number on malformed lines.
RunConfig parse_config(std::istream& in, RunConfig base = {});
// Throws kIo when the file cannot be opened.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

std::string to_text(const RunConfig& config);

}  // namespace l2g::cli
