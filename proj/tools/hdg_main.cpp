// Command-line front end: simulate from a config file, run the verification
// suites, or run one of the built-in figure experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdg/errors.hpp"
#include "hdg/harness/config.hpp"
#include "hdg/harness/experiment.hpp"
#include "hdg/harness/verify.hpp"
#include "hdg/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;

using hdg::harness::ExperimentConfig;

int run_and_write(const ExperimentConfig& cfg) {
  const auto result = hdg::harness::run_experiment(cfg);
  hdg::harness::write_outputs(cfg, result, cfg.out);
  std::cout << "wrote " << cfg.out << "/results.csv, summary.json, figure.svg ("
            << 2 * cfg.trials() * cfg.T() << " rows)\n";
  const auto& dom = result.summary["dominance"]["mean_count"];
  std::cout << "mean-count dominance from t=" << dom["from_t"] << ": " << (dom["passed"].get<bool>() ? "holds" : "violated")
            << " (" << dom["violations"] << " of " << dom["checked"] << " steps below 2 SE)\n";
  if (!result.passed) {
    std::cerr << "invariance check failed; see summary.json\n";
    return kExitPropertyFailure;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and verify history-dependent binary-action games"};
  app.set_version_flag("--version", std::string(hdg::kVersion));
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run an experiment described by a JSON config file");
  std::string config_path;
  std::optional<std::uint64_t> sim_seed, sim_trials;
  std::optional<std::string> sim_out;
  simulate->add_option("--config", config_path, "Config file")->required();
  simulate->add_option("--seed", sim_seed, "Override the root seed");
  simulate->add_option("--trials", sim_trials, "Override the number of trials");
  simulate->add_option("--out", sim_out, "Override the output directory");

  auto* verify = app.add_subcommand("verify", "Run the exhaustive desk-scale verification suites");
  std::string scope = "all";
  std::size_t budget = 4;
  std::string fault;
  std::optional<std::string> verify_out;
  verify->add_option("--scope", scope, "core, coupling, equilibrium or all")
      ->check(CLI::IsMember({"core", "coupling", "equilibrium", "all"}));
  verify->add_option("--budget", budget, "Largest agent count for exhaustive sweeps")->check(CLI::Range(2, 6));
  verify->add_option("--out", verify_out, "Also write the JSON report to this file");
  verify->add_option("--inject-fault", fault, "Corrupt one fixture (testing only)")->group("");

  auto* experiment = app.add_subcommand("experiment", "Run a built-in figure experiment");
  std::string which;
  std::uint64_t exp_seed = 1;
  std::optional<std::uint64_t> exp_trials, exp_T, exp_parallelism;
  std::optional<double> exp_tau;
  std::optional<std::string> exp_out;
  std::vector<std::string> sets;
  experiment->add_option("name", which, "cti-fig1 or sis-fig2")->required()->check(CLI::IsMember({"cti-fig1", "sis-fig2"}));
  experiment->add_option("--seed", exp_seed, "Root seed")->capture_default_str();
  experiment->add_option("--trials", exp_trials, "Number of trials");
  experiment->add_option("--T", exp_T, "Steps per trial");
  experiment->add_option("--tau", exp_tau, "Log-linear temperature");
  experiment->add_option("--parallelism", exp_parallelism, "Worker threads");
  experiment->add_option("--out", exp_out, "Output directory");
  experiment->add_option("--set", sets, "Any config key, e.g. --set graph.n=12 --set value.width=0.2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*simulate) {
      nlohmann::json doc;
      {
        std::ifstream in(config_path);
        if (!in) throw hdg::ConfigError("config", "cannot read " + config_path);
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw hdg::ConfigError("config", std::string("malformed JSON: ") + e.what());
        }
      }
      if (sim_seed) doc["seed"] = *sim_seed;
      if (sim_trials) doc["trials"] = *sim_trials;
      if (sim_out) doc["out"] = *sim_out;
      return run_and_write(hdg::harness::parse_config(doc));
    }
    if (*verify) {
      hdg::harness::VerifyOptions opt;
      opt.scope = scope == "core"          ? hdg::harness::VerifyScope::Core
                  : scope == "coupling"    ? hdg::harness::VerifyScope::Coupling
                  : scope == "equilibrium" ? hdg::harness::VerifyScope::Equilibrium
                                           : hdg::harness::VerifyScope::All;
      opt.max_agents = budget;
      if (!fault.empty()) opt.fault = fault;
      const auto report = hdg::harness::run_verifications(opt);
      const std::string text = report.to_json().dump(2);
      std::cout << text << '\n';
      if (verify_out) {
        std::ofstream f(*verify_out);
        if (!f) throw std::runtime_error("cannot write " + *verify_out);
        f << text << '\n';
      }
      for (const auto& p : report.properties) {
        std::cerr << (p.passed ? "PASS " : "FAIL ") << p.scope << '/' << p.name << '\n';
      }
      return report.passed() ? kExitPass : kExitPropertyFailure;
    }
    if (*experiment) {
      nlohmann::json doc{{"experiment", which}, {"seed", exp_seed}};
      if (exp_trials) doc["trials"] = *exp_trials;
      if (exp_T) doc["T"] = *exp_T;
      if (exp_tau) doc["tau"] = *exp_tau;
      if (exp_parallelism) doc["parallelism"] = *exp_parallelism;
      doc["out"] = exp_out ? *exp_out : "out/" + which;
      for (const auto& s : sets) hdg::harness::apply_override(doc, s);
      return run_and_write(hdg::harness::parse_config(doc));
    }
  } catch (const hdg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPropertyFailure;
  }
  return kExitUsage;
}
