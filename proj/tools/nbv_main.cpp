// Command-line front end: `nbv run`, `nbv verify-theorem`, `nbv compare`.
//
// Exit codes: 0 success; 1 runtime failure (every seed of a run failed, or an
// unexpected internal error); 2 invalid input (bad config value, unreadable
// file, malformed report), with the offending field or path on stderr.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbv/bench/run.hpp"
#include "nbv/core/errors.hpp"

namespace {

using namespace nbv;

struct RunOptions {
  std::string config_file;
  std::vector<std::string> sets;       // --set key=value, applied in order
  std::vector<std::string> flag_sets;  // convenience flags, applied last
  std::string run_dir;                 // exact output directory; empty -> timestamped
};

void add_run_options(CLI::App* cmd, RunOptions& opt, bool with_protocol) {
  cmd->add_option("-c,--config", opt.config_file, "flat `key = value` config file");
  cmd->add_option("--set", opt.sets, "override one config entry (key=value, repeatable)")
      ->type_name("KEY=VALUE");
  cmd->add_option("-o,--out", opt.run_dir,
                  "exact run directory (default: timestamped under the config's `out`)");

  auto forward = [&opt, cmd](const std::string& flag, const std::string& key,
                             const std::string& help) {
    cmd->add_option_function<std::string>(
           flag, [&opt, key](const std::string& v) { opt.flag_sets.push_back(key + "=" + v); },
           help)
        ->type_name("VALUE");
  };
  if (with_protocol) forward("--protocol", "protocol", "object-sphere | scene5d | verify-theorem");
  forward("--mesh", "mesh", "OBJ/PLY scene mesh path");
  forward("--shape", "shape", "analytic scene: sphere | torus | rounded_cube | blob | desk");
  forward("--policy", "policy", "gain-oracle | gain-carving | entropy | random");
  forward("--steps", "steps", "views per episode");
  forward("--seeds", "seeds", "comma-separated 64-bit trial seeds");

  auto flag_true = [&opt, cmd](const std::string& flag, const std::string& key,
                               const std::string& help) {
    cmd->add_flag_callback(
        flag, [&opt, key] { opt.flag_sets.push_back(key + "=true"); }, help);
  };
  flag_true("--svg", "svg", "also write plot.svg");
  flag_true("--dump-depth", "dump.depth", "dump the first depth map (PGM)");
  flag_true("--dump-cloud", "dump.cloud", "dump the reconstructed cloud (PLY)");
  flag_true("--dump-carving", "dump.carving", "dump the carved occupancy grid (raw)");
  flag_true("--dump-gain-table", "dump.gain_table", "dump per-pose estimate vs ground truth (CSV)");
  flag_true("--dump-proxies", "dump.proxies", "dump proxies with gain/history coefficients (JSON)");
}

ExperimentConfig build_config(const RunOptions& opt, std::optional<Protocol> forced) {
  ExperimentConfig config =
      opt.config_file.empty() ? ExperimentConfig{} : load_config(opt.config_file);
  apply_overrides(config, opt.sets);
  apply_overrides(config, opt.flag_sets);
  if (forced) config.protocol = *forced;
  return config;
}

int execute_run(const RunOptions& opt, std::optional<Protocol> forced) {
  const ExperimentConfig config = build_config(opt, forced);
  validate_config(config);
  const std::string dir =
      opt.run_dir.empty() ? timestamped_run_dir(config.out, config.protocol) : opt.run_dir;
  const RunReport report = run_experiment(config, dir);

  for (const auto& s : report.seeds) {
    if (!s.ok()) std::cerr << "seed " << s.seed << " failed: " << s.error << "\n";
  }
  std::cout << "wrote " << dir << "\n";
  if (config.protocol == Protocol::verify_theorem) {
    std::cout << "seeds ok: " << report.seeds_ok << "/" << report.seeds.size() << "\n";
    if (report.theorem.conclusive) {
      std::cout << "slope " << report.theorem.slope << " (conclusive), "
                << (report.theorem.pass ? "pass" : "fail") << "\n";
    } else {
      std::cout << "inconclusive (gaps at the Monte Carlo noise floor)\n";
    }
  } else {
    std::cout << "seeds ok: " << report.seeds_ok << "/" << report.seeds.size();
    if (report.seeds_ok > 0) {
      std::cout << "   mean AUC " << report.mean_auc << " +- " << report.std_auc;
    }
    std::cout << "\n";
  }
  return exit_code_for(report);
}

int execute_compare(const std::vector<std::string>& paths, const std::string& out_path) {
  std::vector<RunReport> reports;
  reports.reserve(paths.size());
  for (const std::string& p : paths) {
    const bool dir = std::filesystem::is_directory(p);
    reports.push_back(load_report(dir ? p + "/report.json" : p));
  }
  const ComparisonTable table = compare_reports(reports);
  if (out_path.empty()) {
    write_comparison_csv(table, std::cout);
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + out_path + "' for writing");
    write_comparison_csv(table, os);
    if (!os.flush()) throw IoError("failed writing '" + out_path + "'");
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-best-view planning toolkit"};
  app.set_version_flag("--version", std::string(nbv::kToolkitVersion));
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a reconstruction experiment");
  add_run_options(run_cmd, run_opt, /*with_protocol=*/true);

  RunOptions thm_opt;
  CLI::App* thm_cmd =
      app.add_subcommand("verify-theorem", "measure the convergence order of the gap bound");
  add_run_options(thm_cmd, thm_opt, /*with_protocol=*/false);

  std::vector<std::string> compare_paths;
  std::string compare_out;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "tabulate two or more run reports");
  cmp_cmd->add_option("reports", compare_paths, "report.json files or run directories")
      ->required()
      ->expected(2, -1);
  cmp_cmd->add_option("-o,--out", compare_out, "output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return execute_run(run_opt, std::nullopt);
    if (thm_cmd->parsed()) return execute_run(thm_opt, nbv::Protocol::verify_theorem);
    return execute_compare(compare_paths, compare_out);
  } catch (const nbv::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nbv::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nbv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nbv::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
