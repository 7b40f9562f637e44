// Scenario-driven front end: quantize run|verify|sweep.
// Exit codes: 0 ok, 2 config, 3 divergence, 4 infeasible, 5 verification failure.

#include "dynquant/errors.hpp"
#include "dynquant/scenario.hpp"
#include "dynquant/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace {

using namespace dynquant;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string scenario, config, out;
  double hbar = 0;
  int dim = 0;
  double dt = 0;
  long steps = 0;
  std::uint64_t seed = 0;
  bool verify = false, classical_only = false, allow_large = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "built-in scenario name");
  cmd->add_option("--config", f.config, "JSON config (or run manifest) file");
  cmd->add_option("--hbar", f.hbar, "Planck constant");
  cmd->add_option("--dim", f.dim, "per-mode truncation");
  cmd->add_option("--dt", f.dt, "time step");
  cmd->add_option("--steps", f.steps, "step count");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "seed for randomized checks");
  cmd->add_flag("--verify", f.verify, "run identity suites and write a report");
  cmd->add_flag("--classical-only", f.classical_only, "integrate the classical system only");
  cmd->add_flag("--allow-large", f.allow_large, "permit gated 3-mode quantum runs");
}

CliOverrides to_overrides(const CommonFlags& f) {
  CliOverrides ov;
  if (!f.scenario.empty()) ov.scenario = f.scenario;
  if (f.hbar > 0) ov.hbar = f.hbar;
  if (f.dim > 0) ov.dim = f.dim;
  if (f.dt > 0) ov.dt = f.dt;
  if (f.steps > 0) ov.steps = f.steps;
  if (!f.out.empty()) ov.out = f.out;
  if (f.seed != 0) ov.seed = f.seed;
  ov.verify = f.verify;
  ov.classical_only = f.classical_only;
  ov.allow_large = f.allow_large;
  return ov;
}

int run_one(const std::string& config_text, const CliOverrides& ov) {
  ScenarioConfig cfg = load_scenario_config(config_text, ov);
  return run_scenario(cfg);
}

int cmd_run(const CommonFlags& f) {
  const std::string text = f.config.empty() ? std::string() : read_file(f.config);
  return run_one(text, to_overrides(f));
}

int cmd_verify(const CommonFlags& f, bool corrupt_q) {
  QuantizationContext ctx(f.hbar > 0 ? f.hbar : 1.0, f.dim > 0 ? f.dim : 16, 1);
  VerifyOptions opt;
  if (f.seed != 0) opt.seed = f.seed;
  opt.corrupt_q = corrupt_q;
  VerificationReport report = verify_all(ctx, opt);
  const std::string text = verification_report_json(report);
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    std::ofstream o(f.out + "/verify_report.json");
    o << text;
  }
  std::cout << text;
  return report.all_passed() ? 0 : 5;
}

int cmd_sweep(const CommonFlags& f, int jobs) {
  if (f.config.empty()) throw ConfigError("config: sweep needs --config");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(f.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("base") || !j.contains("items"))
    throw ConfigError("config: sweep file needs 'base' and 'items'");
  const nlohmann::json base = j["base"];
  const nlohmann::json items = j["items"];
  if (!items.is_array() || items.empty())
    throw ConfigError("config: 'items' must be a non-empty array");

  const std::string out_root = !f.out.empty()
                                   ? f.out
                                   : base.value("out", std::string("out"));
  std::vector<std::string> texts;
  for (size_t i = 0; i < items.size(); ++i) {
    nlohmann::json merged = base;
    merged.update(items[i]);
    if (!items[i].contains("out"))
      merged["out"] = out_root + "/item_" + std::to_string(i);
    texts.push_back(merged.dump());
  }

  CliOverrides ov = to_overrides(f);
  ov.out.reset();  // per-item directories
  std::vector<int> codes(texts.size(), 0);
  std::mutex mu;
  size_t next = 0;
  auto worker = [&] {
    while (true) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= texts.size()) return;
        i = next++;
      }
      try {
        codes[i] = run_one(texts[i], ov);
      } catch (const ConfigError& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "item " << i << ": " << e.what() << "\n";
        codes[i] = 2;
      } catch (const DivergenceError& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "item " << i << ": diverged at step " << e.step() << "\n";
        codes[i] = 3;
      } catch (const InfeasibleError& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "item " << i << ": " << e.what() << "\n";
        codes[i] = 4;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "item " << i << ": " << e.what() << "\n";
        codes[i] = 1;
      }
    }
  };
  const int k = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int worst = 0;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Weyl quantization of classical dynamical operators"};
  app.require_subcommand(1);

  CommonFlags run_flags, verify_flags, sweep_flags;
  bool corrupt_q = false;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  add_common(run, run_flags);

  CLI::App* ver = app.add_subcommand("verify", "run the operator identity suites");
  add_common(ver, verify_flags);
  ver->add_flag("--self-test-corrupt-q", corrupt_q,
                "fault injection: misscale a basis superoperator so dependent checks fail");

  CLI::App* sw = app.add_subcommand("sweep", "run a batch of scenarios");
  add_common(sw, sweep_flags);
  sw->add_option("--jobs", jobs, "parallel scenario processes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (ver->parsed()) return cmd_verify(verify_flags, corrupt_q);
    if (sw->parsed()) return cmd_sweep(sweep_flags, jobs);
  } catch (const dynquant::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const dynquant::DivergenceError& e) {
    std::cerr << "divergence at step " << e.step() << ": " << e.what() << "\n";
    return 3;
  } catch (const dynquant::InfeasibleError& e) {
    std::cerr << e.what() << " (violating eigenvalue " << e.negative_eigenvalue() << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
