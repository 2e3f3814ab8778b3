#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "chanrate/bounds.hpp"
#include "chanrate/harness.hpp"
#include "chanrate/io.hpp"

namespace {

using namespace chanrate;

LinkModel load_model(const std::string& theta_path, const std::string& rates_path) {
  RateSet rates = load_rates_json(rates_path);
  Grid theta = load_theta_csv(theta_path, rates.size());
  return LinkModel(std::move(rates), std::move(theta));
}

int simulate(const std::string& config_path, std::uint64_t seeds, const std::string& out) {
  ExperimentConfig config = load_config(config_path);
  if (seeds > 0) {
    config.seeds.resize(seeds);
    std::iota(config.seeds.begin(), config.seeds.end(), std::uint64_t{1});
  }
  if (!out.empty()) config.out_dir = out;
  const ExperimentResult result = run_experiment(config);
  emit_outputs(result, config.out_dir);
  std::cout << summary_json(result)["efficiency_table"].dump(2) << '\n';
  if (result.original_time) {
    const auto report = accounting_check(result, RateSet(config.rates));
    for (const auto& e : report.entries)
      std::cout << "accounting " << e.label << ": R(floor(T r_1))=" << format_number(e.lower)
                << " R_1(T)=" << format_number(e.middle) << " R(ceil(T r_K))=" << format_number(e.upper)
                << (e.lower_holds && e.upper_holds && e.budget_holds ? " ok" : " VIOLATED") << '\n';
  }
  std::cout << "wrote " << config.out_dir.string() << '\n';
  return 0;
}

int bounds(const std::string& theta, const std::string& rates) {
  std::cout << to_json(compute_bounds(load_model(theta, rates))).dump(2) << '\n';
  return 0;
}

int check(const std::string& theta, const std::string& rates) {
  std::cout << structure_report(load_model(theta, rates)).dump(2) << '\n';
  return 0;
}

int gen_env(const std::string& spec_path, const std::string& out_path) {
  const TraceTable trace = synth_drift_trace(parse_synth_spec(read_json_file(spec_path)));
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write " + out_path);
  write_trace_csv(out, trace);
  if (!out) throw ModelError("failed writing " + out_path);
  std::cout << "wrote " << trace.segments.size() << " segments to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel and rate selection bandit toolkit"};
  app.require_subcommand(1);

  std::string config, out, theta, rates, spec;
  std::uint64_t seeds = 0;

  auto* sim = app.add_subcommand("simulate", "Run an experiment described by a JSON config");
  sim->add_option("--config", config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--seeds", seeds, "Replace the config seeds with 1..N")->check(CLI::PositiveNumber);
  sim->add_option("--out", out, "Output directory");

  auto* bnd = app.add_subcommand("bounds", "Regret constants for a stationary theta matrix");
  auto* chk = app.add_subcommand("check", "Structural checks for a stationary theta matrix");
  for (auto* sub : {bnd, chk}) {
    sub->add_option("--theta", theta, "Theta CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--rates", rates, "Rates JSON")->required()->check(CLI::ExistingFile);
  }

  auto* gen = app.add_subcommand("gen-env", "Generate a synthetic drift trace CSV");
  gen->add_option("--spec", spec, "Synthetic drift spec JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out, "Trace CSV to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return simulate(config, seeds, out);
    if (bnd->parsed()) return bounds(theta, rates);
    if (chk->parsed()) return check(theta, rates);
    if (gen->parsed()) return gen_env(spec, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
