// Experiment runner for the upper-half-plane laboratory.  Every verification
// is a subcommand; parameters come from a flat key-value config file plus
// --set overrides, and results land as CSV or JSON tables under --out.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "uhplab/config.hpp"
#include "uhplab/experiments.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  uint64_t seed = 1;
  int workers = 2;
  std::vector<std::string> overrides;
  std::string axis;           // sweep only
  std::string values_csv;     // sweep only
  std::string run_experiment; // run/sweep: experiment name from config or flag
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "flat key=value config file");
  cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "deterministic seed")->capture_default_str();
  cmd->add_option("--workers", opt.workers, "sweep concurrency cap")->capture_default_str();
  cmd->add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--set", opt.overrides, "extra key=value parameter overrides");
}

int execute(const CliOptions& opt, const std::string& experiment, bool is_sweep) {
  uhplab::ExperimentConfig cfg;
  try {
    if (!opt.config_path.empty()) cfg.kv = uhplab::parse_config_file(opt.config_path);
    for (const auto& kvs : opt.overrides) {
      auto one = uhplab::parse_config_text(kvs);
      for (const auto& [k, v] : one.raw()) cfg.kv.set(k, v);
    }
    cfg.experiment = experiment.empty()
                         ? cfg.kv.get_string("experiment", "")
                         : experiment;
    if (cfg.experiment.empty())
      throw uhplab::ConfigError("experiment", "no experiment named (config or subcommand)");
    cfg.out_dir = opt.out_dir;
    cfg.format = opt.format;
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;

    uhplab::ExperimentResult res;
    if (is_sweep) {
      if (opt.axis.empty()) throw uhplab::ConfigError("axis", "sweep requires --axis");
      std::vector<std::string> values;
      std::string cur;
      for (char c : opt.values_csv) {
        if (c == ',') {
          if (!cur.empty()) values.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) values.push_back(cur);
      res = uhplab::sweep(cfg, opt.axis, values);
    } else {
      res = uhplab::run_experiment(cfg);
    }
    auto paths = uhplab::write_outputs(res, cfg);
    for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    if (res.exit_code != 0) std::printf("contract FAILED for %s\n", cfg.experiment.c_str());
    return res.exit_code;
  } catch (const uhplab::ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uhplab: numerical experiments for weighted mixed-norm Bergman analysis"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, CliOptions>> cmds;
  cmds.reserve(20);

  for (const auto& name : uhplab::experiment_names()) {
    cmds.emplace_back(app.add_subcommand(name, "run the " + name + " experiment"), CliOptions{});
    add_common(cmds.back().first, cmds.back().second);
  }
  cmds.emplace_back(app.add_subcommand("run", "run the experiment named in the config"),
                    CliOptions{});
  add_common(cmds.back().first, cmds.back().second);

  cmds.emplace_back(app.add_subcommand("sweep", "sweep one config key over a value list"),
                    CliOptions{});
  {
    auto& [cmd, opt] = cmds.back();
    add_common(cmd, opt);
    cmd->add_option("--axis", opt.axis, "config key to sweep")->required();
    cmd->add_option("--values", opt.values_csv, "comma-separated values");
    cmd->add_option("--experiment", opt.run_experiment, "experiment name (else from config)");
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [cmd, opt] : cmds) {
    if (!cmd->parsed()) continue;
    std::string name = cmd->get_name();
    if (name == "sweep") return execute(opt, opt.run_experiment, true);
    if (name == "run") return execute(opt, "", false);
    return execute(opt, name, false);
  }
  return 2;
}
