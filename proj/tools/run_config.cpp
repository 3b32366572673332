#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "l2g/error.hpp"

namespace l2g::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument, "bad value '" + value + "' for " + key);
  }
  return out;
}

}  // namespace

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  auto size = [&] { return parse_number<std::size_t>(key, value); };
  auto real = [&] { return parse_number<double>(key, value); };
  if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
    c.hp.seed = c.seed;
  } else if (key == "n") {
    c.dataset_size = size();
  } else if (key == "hidden") {
    c.hp.hidden = size();
  } else if (key == "latent") {
    c.hp.latent = size();
  } else if (key == "embed") {
    c.hp.embed = size();
  } else if (key == "beta") {
    c.hp.beta = real();
  } else if (key == "lr") {
    c.hp.lr = real();
  } else if (key == "batch") {
    c.hp.batch = size();
  } else if (key == "epochs") {
    c.hp.epochs = size();
  } else if (key == "reconstruction") {
    if (value == "sum") {
      c.hp.reconstruction = Reconstruction::kSum;
    } else if (value == "mean") {
      c.hp.reconstruction = Reconstruction::kMean;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "reconstruction must be sum or mean");
    }
  } else if (key == "block_side") {
    c.mapping.block_side = real();
  } else if (key == "close_threshold") {
    c.mapping.close_threshold = real();
  } else if (key == "above_xy_tol") {
    c.mapping.above_xy_tol = real();
  } else if (key == "above_z_tol") {
    c.mapping.above_z_tol = real();
  } else if (key == "data_dir") {
    c.data_dir = value;
  } else if (key == "model") {
    c.model_file = value;
  } else if (key == "report_dir") {
    c.report_dir = value;
  } else if (key == "executor") {
    if (value == "oracle") {
      c.executor.mode = ExecutorConfig::Mode::kOracleSuccess;
    } else if (value == "stochastic") {
      c.executor.mode = ExecutorConfig::Mode::kStochastic;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "executor must be oracle or stochastic");
    }
  } else if (key == "p_fail") {
    c.executor.p_fail = real();
    if (c.executor.p_fail < 0.0 || c.executor.p_fail > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "p_fail outside [0, 1]");
    }
  } else if (key == "workers") {
    c.workers = size();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      apply(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "seed = " << c.seed << '\n'
      << "n = " << c.dataset_size << '\n'
      << "hidden = " << c.hp.hidden << '\n'
      << "latent = " << c.hp.latent << '\n'
      << "embed = " << c.hp.embed << '\n'
      << "beta = " << c.hp.beta << '\n'
      << "lr = " << c.hp.lr << '\n'
      << "batch = " << c.hp.batch << '\n'
      << "epochs = " << c.hp.epochs << '\n'
      << "reconstruction = " << (c.hp.reconstruction == Reconstruction::kSum ? "sum" : "mean") << '\n'
      << "block_side = " << c.mapping.block_side << '\n'
      << "close_threshold = " << c.mapping.close_threshold << '\n'
      << "above_xy_tol = " << c.mapping.above_xy_tol << '\n'
      << "above_z_tol = " << c.mapping.above_z_tol << '\n'
      << "data_dir = " << c.data_dir.string() << '\n'
      << "model = " << c.model_file.string() << '\n'
      << "report_dir = " << c.report_dir.string() << '\n'
      << "executor = "
      << (c.executor.mode == ExecutorConfig::Mode::kOracleSuccess ? "oracle" : "stochastic") << '\n'
      << "p_fail = " << c.executor.p_fail << '\n'
      << "workers = " << c.workers << '\n';
  return out.str();
}

}  // namespace l2g::cli
