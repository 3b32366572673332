// l2g: dataset generation, training, evaluation and protocol runs.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "l2g/corpus.hpp"
#include "l2g/error.hpp"
#include "l2g/evalmod.hpp"
#include "l2g/expression.hpp"
#include "l2g/geometry.hpp"
#include "l2g/goalgen.hpp"
#include "l2g/grounding.hpp"
#include "l2g/oracle.hpp"
#include "l2g/semantics.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using l2g::cli::RunConfig;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to --out when given, else stdout.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw l2g::Error(l2g::ErrorCode::kIo, "cannot write " + out_path);
  out << text << '\n';
  if (!out) throw l2g::Error(l2g::ErrorCode::kIo, "write failed: " + out_path);
}

std::vector<l2g::Triplet> load_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw l2g::Error(l2g::ErrorCode::kIo, "cannot open dataset " + path);
  return l2g::read_dataset(in);
}

l2g::SemanticConfig parse_ci(const std::string& text) {
  try {
    return l2g::SemanticConfig::from_string(text);
  } catch (const l2g::Error& e) {
    throw UsageError(e.what());
  }
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool pretty = false;
  std::optional<std::size_t> workers;
  std::optional<double> p_fail;
  std::string model;
};

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  std::string path = c.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("L2G_CONFIG"); env != nullptr) path = env;
  }
  if (!path.empty()) cfg = l2g::cli::load_config(path);
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.hp.seed = *c.seed;
  }
  if (c.workers) cfg.workers = *c.workers;
  if (c.p_fail) cfg.executor = l2g::ExecutorConfig::stochastic(*c.p_fail);
  if (!c.model.empty()) cfg.model_file = c.model;
  return cfg;
}

void add_common(CLI::App* cmd, Common& c, bool seeded) {
  cmd->add_option("--config", c.config_path, "key=value config file (default: $L2G_CONFIG)");
  if (seeded) cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
}

std::string pretty_eval(const l2g::EvalReport& r) {
  std::ostringstream out;
  out << "test   n_entries   CP      Cov\n" << std::fixed << std::setprecision(3);
  for (const auto& row : r.rows) {
    out << std::setw(4) << row.test_id << std::setw(12) << row.n_entries << "   " << row.cp_mean
        << "   " << row.cov_mean << '\n';
  }
  return out.str();
}

std::string pretty_protocol(const l2g::ProtocolReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << r.protocol << " p_fail=" << r.p_fail
      << " episodes=" << r.episodes;
  if (r.protocol == "sequence") {
    out << " n_s=" << r.n_s;
  } else {
    out << " sr1=" << r.sr1 << " sr5=" << r.sr5;
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-conditioned goal generation"};
  app.require_subcommand(1);
  Common c;

  auto* enumerate = app.add_subcommand("enumerate", "list the 35 valid configurations");

  auto* instructions = app.add_subcommand("instructions", "export the instruction list as JSON");
  instructions->add_option("--out", c.out);

  auto* oracle_cmd = app.add_subcommand("oracle", "export the brute-force oracle as JSON");
  oracle_cmd->add_option("--out", c.out);

  std::size_t n_data = 0;
  std::string manifest;
  auto* gen = app.add_subcommand("gen-data", "write a JSONL dataset and its split manifest");
  add_common(gen, c, true);
  gen->add_option("--n", n_data, "number of triplets (default: config n)")
      ->check(CLI::PositiveNumber);
  gen->add_option("--manifest", manifest, "split manifest path (default: OUT.splits.json)");

  std::string data_path;
  std::string log_path;
  auto* train_cmd = app.add_subcommand("train", "train the goal generator and save it");
  add_common(train_cmd, c, true);
  train_cmd->add_option("--data", data_path)->required();
  train_cmd->add_option("--log", log_path, "per-epoch JSONL loss log");
  std::optional<std::size_t> epochs;
  train_cmd->add_option("--epochs", epochs)->check(CLI::PositiveNumber);

  std::size_t n_samples = 100;
  auto* eval = app.add_subcommand("eval", "CP and Cov over the five test sets");
  add_common(eval, c, true);
  eval->add_option("--model", c.model);
  eval->add_option("--data", data_path)->required();
  eval->add_option("--n", n_samples, "samples per entry")->check(CLI::PositiveNumber);
  eval->add_option("--workers", c.workers)->check(CLI::PositiveNumber);
  eval->add_flag("--pretty", c.pretty);

  std::string ci_text;
  std::string sentence;
  std::size_t n_goals = 10;
  auto* sample = app.add_subcommand("sample", "sample goals for (ci, sentence)");
  add_common(sample, c, true);
  sample->add_option("--model", c.model);
  sample->add_option("--ci", ci_text)->required();
  sample->add_option("--s", sentence)->required();
  sample->add_option("--n", n_goals)->check(CLI::PositiveNumber);
  sample->add_flag("--pretty", c.pretty);

  std::size_t n_protocol = 0;
  auto add_protocol = [&](const char* name, const char* help, const char* n_flag) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, c, true);
    cmd->add_option("--model", c.model);
    cmd->add_option("--p-fail", c.p_fail, "stochastic executor failure probability")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option(n_flag, n_protocol)->check(CLI::PositiveNumber);
    cmd->add_flag("--pretty", c.pretty);
    return cmd;
  };
  auto* transition = add_protocol("transition-eval", "transition protocol", "--episodes");
  auto* expr_eval = add_protocol("expr-eval", "expression protocol", "--n-expr");
  auto* seq_eval = add_protocol("seq-eval", "sequence protocol", "--n-seq");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (enumerate->parsed()) {
      for (auto cfg : l2g::enumerate_valid()) {
        std::cout << cfg.to_string() << ' ' << l2g::describe(*l2g::structure_of(cfg)) << '\n';
      }
      return 0;
    }
    if (instructions->parsed()) {
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (const auto& s : l2g::instruction_set().sentences()) {
        out.push_back({{"text", s.text},
                       {"slot", s.meaning.slot},
                       {"direction", l2g::direction_name(s.meaning.direction)}});
      }
      emit(out.dump(1), c.out);
      return 0;
    }
    if (oracle_cmd->parsed()) {
      emit(l2g::oracle_to_json(l2g::build_oracle()), c.out);
      return 0;
    }

    RunConfig cfg = resolve(c);

    if (gen->parsed()) {
      const std::size_t n = n_data ? n_data : cfg.dataset_size;
      if (n == 0) throw UsageError("--n must be positive");
      l2g::Rng rng(cfg.seed);
      const auto data = l2g::generate_dataset(n, rng);
      std::ostringstream jsonl;
      l2g::write_dataset(jsonl, data);
      const auto splits = l2g::build_splits(data);
      if (c.out.empty()) {
        std::cout << jsonl.str();
        if (!manifest.empty()) emit(l2g::split_manifest_json(splits), manifest);
      } else {
        std::ofstream out(c.out, std::ios::binary);
        if (!out) throw l2g::Error(l2g::ErrorCode::kIo, "cannot write " + c.out);
        out << jsonl.str();
        emit(l2g::split_manifest_json(splits), manifest.empty() ? c.out + ".splits.json" : manifest);
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      if (epochs) cfg.hp.epochs = *epochs;
      cfg.hp.validate();
      const auto splits = l2g::build_splits(load_data(data_path));
      std::vector<l2g::EpochLog> log;
      auto result = l2g::train(splits.train, cfg.hp, [&](const l2g::EpochLog& e) {
        log.push_back(e);
        std::cerr << "epoch " << e.epoch << " loss " << e.mean_total << '\r' << std::flush;
      });
      std::cerr << '\n';
      const fs::path model_path = c.out.empty() ? cfg.model_file : fs::path(c.out);
      l2g::save(result.model, model_path);
      if (!log_path.empty()) {
        std::ofstream out(log_path, std::ios::binary);
        if (!out) throw l2g::Error(l2g::ErrorCode::kIo, "cannot write " + log_path);
        out << l2g::training_log_jsonl(result.log);
      }
      const auto& last = result.log.back();
      nlohmann::ordered_json summary = {{"model", model_path.string()},
                                        {"train_size", splits.train.size()},
                                        {"epochs", last.epoch},
                                        {"final_bce", last.mean_bce},
                                        {"final_kl", last.mean_kl},
                                        {"final_total", last.mean_total}};
      std::cout << summary.dump(1) << '\n';
      return 0;
    }

    const auto model = l2g::load(cfg.model_file);
    const auto sampler = l2g::model_sampler(model);

    if (eval->parsed()) {
      const auto splits = l2g::build_splits(load_data(data_path));
      const l2g::Oracle oracle;
      const auto report =
          l2g::evaluate_testsets(sampler, oracle, splits, n_samples, cfg.seed, cfg.workers);
      emit(c.pretty ? pretty_eval(report) : l2g::to_json(report), c.out);
      return 0;
    }

    if (sample->parsed()) {
      const auto ci = parse_ci(ci_text);
      l2g::Rng rng(cfg.seed);
      const auto goals = l2g::sample_goals(model, ci, sentence, n_goals, rng);
      if (c.pretty) {
        std::ostringstream out;
        for (auto g : goals) {
          out << g.to_string() << (l2g::is_valid(g) ? "" : "  (invalid)") << '\n';
        }
        emit(out.str(), c.out);
      } else {
        nlohmann::ordered_json out = {{"ci", ci.to_string()}, {"s", sentence}, {"seed", cfg.seed}};
        out["goals"] = nlohmann::ordered_json::array();
        for (auto g : goals) out["goals"].push_back(g.to_string());
        emit(out.dump(1), c.out);
      }
      return 0;
    }

    l2g::ProtocolReport report;
    if (transition->parsed()) {
      report = l2g::transition_protocol(sampler, cfg.executor, cfg.seed, n_protocol ? n_protocol : 5);
    } else if (expr_eval->parsed()) {
      report = l2g::expression_protocol(sampler, cfg.executor, cfg.seed, n_protocol ? n_protocol : 500);
    } else if (seq_eval->parsed()) {
      report = l2g::sequence_protocol(sampler, cfg.executor, cfg.seed, n_protocol ? n_protocol : 20);
    }
    emit(c.pretty ? pretty_protocol(report) : l2g::to_json(report), c.out);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const l2g::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
