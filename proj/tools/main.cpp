// Command line front end: run one experiment cell, sweep a comparison table,
// brute-force an instance, or print circuit resource counts.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqufl/harness.hpp"

namespace {

using namespace vqufl;

std::optional<double> parse_lambda(const std::string& text) {
  if (text.empty() || text == "default") return std::nullopt;
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--lambda", "expected a number or 'default'");
  }
}

struct CommonOptions {
  std::string instance = "instance-01";
  std::string lambda_text = "default";
  int p = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--instance", opts.instance, "registry key (instance-01..12) or file path");
  cmd->add_option("--lambda", opts.lambda_text, "penalty weight or 'default'");
  cmd->add_option("--p", opts.p, "number of ansatz layers")->check(CLI::PositiveNumber);
}

int cmd_run(const CommonOptions& common, ExperimentConfig config) {
  config.instance = common.instance;
  config.p = common.p;
  config.lambda = parse_lambda(common.lambda_text);
  const RunRecord record = run(config);
  std::cout << "instance=" << record.instance_name << " algorithm="
            << algorithm_name(config.algorithm) << " p=" << config.p
            << " lambda=" << record.lambda << " qubits=" << record.n_qubits << '\n'
            << "optimal_value=" << record.optimal_value << " optima="
            << record.optimal_bits.size() << '\n';
  for (const SeedResult& seed : record.seeds) {
    std::cout << "seed " << seed.seed << ": final_loss=" << seed.final_loss
              << " success_prob=" << seed.success_prob
              << " iters_to_plateau=" << seed.iters_to_plateau
              << " infeasible_mass=" << seed.infeasible_mass << '\n';
  }
  std::cout << "success mean=" << record.mean_success << " median=" << record.median_success
            << " max=" << record.max_success << '\n';
  if (!config.output_path.empty()) std::cout << "wrote " << config.output_path << '\n';
  return 0;
}

int cmd_compare(const std::vector<std::string>& instances,
                const std::vector<std::string>& algorithm_names,
                const std::vector<int>& p_values, ExperimentConfig base) {
  std::vector<Algorithm> algorithms;
  algorithms.reserve(algorithm_names.size());
  for (const std::string& name : algorithm_names) algorithms.push_back(parse_algorithm(name));
  const std::vector<RunRecord> records =
      compare(instances, algorithms, p_values, base.seeds, base);
  if (!base.output_path.empty()) {
    write_output_file(base.output_path, base.format, records, base.best_over_trajectory);
    std::cout << "wrote " << base.output_path << '\n';
  } else {
    write_csv_header(std::cout, base.best_over_trajectory);
    for (const RunRecord& record : records) write_csv_rows(std::cout, record);
  }
  return 0;
}

int cmd_oracle(const CommonOptions& common, bool all_instances) {
  std::vector<UflpInstance> instances;
  if (all_instances) {
    instances = instance_registry();
  } else {
    instances.push_back(resolve_instance(common.instance));
  }
  const auto start = std::chrono::steady_clock::now();
  for (const UflpInstance& instance : instances) {
    const std::optional<double> lambda_flag = parse_lambda(common.lambda_text);
    const double lambda = lambda_flag ? *lambda_flag : instance.lambda_or_default();
    const BruteForceResult result = brute_force(instance, lambda);
    std::cout << instance.name << ": optimal_value=" << result.optimal_value
              << " lambda=" << lambda;
    if (instance.known_optimal) std::cout << " known_optimal=" << *instance.known_optimal;
    std::cout << " optima=" << result.optimal_bits.size() << '\n';
    for (const std::string& bits : result.optimal_bits) std::cout << "  " << bits << '\n';
  }
  const auto stop = std::chrono::steady_clock::now();
  std::cout << "elapsed " << std::chrono::duration<double>(stop - start).count() << " s\n";
  return 0;
}

int cmd_resources(const CommonOptions& common, const std::string& algorithm_text,
                  bool show_diagram, bool dump_terms) {
  const Algorithm algorithm = parse_algorithm(algorithm_text);
  const UflpInstance instance = resolve_instance(common.instance);
  const QubitLayout layout(instance);
  const std::optional<double> lambda_flag = parse_lambda(common.lambda_text);
  const double lambda = lambda_flag ? *lambda_flag : instance.lambda_or_default();
  const MixerSpec mixer = mixer_pairs(layout.m, layout.n);

  Circuit circuit;
  QuboForm qubo;
  switch (algorithm) {
    case Algorithm::Qaoa:
      qubo = qubo_full(instance, lambda);
      circuit = build_qaoa(layout, qubo, common.p);
      break;
    case Algorithm::QaoaPlus:
      qubo = qubo_pfs(instance, lambda);
      circuit = build_qaoa_plus(layout, qubo, mixer, common.p);
      break;
    case Algorithm::Hea:
      qubo = qubo_full(instance, lambda);
      circuit = build_hea(layout.total_qubits(), common.p);
      break;
    case Algorithm::VqaPfs:
      qubo = qubo_pfs(instance, lambda);
      circuit = build_vqa_pfs(layout, mixer, common.p);
      break;
  }
  const ResourceReport report =
      resources(circuit, circuit.has_diag_phase() ? &qubo : nullptr);
  std::cout << "instance=" << instance.name << " algorithm=" << algorithm_text
            << " p=" << common.p << " qubits=" << layout.total_qubits() << '\n'
            << "depth=" << report.depth << " cnots=" << report.cnot_count
            << " param_gates=" << report.param_gate_count
            << " params=" << report.param_count << '\n';
  if (dump_terms) dump_qubo(std::cout, qubo);
  if (show_diagram) std::cout << circuit_diagram(circuit);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational quantum algorithm benchmarks for uncapacitated "
               "facility location"};
  app.require_subcommand(1);

  CommonOptions common;
  ExperimentConfig config;
  std::string algorithm_text = "vqa-pfs";
  std::string format_text = "csv";
  std::string mixer_text = "per-layer";
  bool no_timing = false;
  bool serial_seeds = false;

  auto add_adam_flags = [&](CLI::App* cmd) {
    cmd->add_option("--seeds", config.seeds, "optimizer seeds")->delimiter(',');
    cmd->add_option("--lr", config.adam.learning_rate, "Adam learning rate")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--iters", config.adam.max_iters, "Adam iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--plateau-stop", config.adam.plateau_stop,
                  "stop once the loss stops improving");
    cmd->add_option("--out", config.output_path, "output file path");
    cmd->add_option("--format", format_text, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--no-timing", no_timing, "write 0 for wall_seconds (stable output)");
    cmd->add_flag("--best-over-trajectory", config.best_over_trajectory,
                  "also report the best success probability along the trajectory");
    cmd->add_flag("--single-optimum", config.single_optimum,
                  "score only the first optimal bitstring");
    cmd->add_option("--mixer-schedule", mixer_text, "per-layer or final-only")
        ->check(CLI::IsMember({"per-layer", "final-only"}));
    cmd->add_flag("--serial-seeds", serial_seeds, "run seeds one at a time");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "optimize one (algorithm, instance, p) cell");
  add_common(run_cmd, common);
  run_cmd->add_option("--algorithm", algorithm_text, "qaoa, qaoa-plus, hea or vqa-pfs");
  add_adam_flags(run_cmd);

  std::vector<std::string> sweep_instances;
  std::vector<std::string> sweep_algorithms;
  std::vector<int> sweep_p;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "sweep instances x algorithms x layers");
  compare_cmd->add_option("--instances", sweep_instances, "registry keys or paths")
      ->delimiter(',')
      ->required();
  compare_cmd->add_option("--algorithms", sweep_algorithms, "algorithms to compare")
      ->delimiter(',')
      ->required();
  compare_cmd->add_option("--p", sweep_p, "layer counts")->delimiter(',')->required();
  compare_cmd->add_option("--lambda", common.lambda_text, "penalty weight or 'default'");
  add_adam_flags(compare_cmd);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force an instance");
  bool oracle_all = false;
  add_common(oracle_cmd, common);
  oracle_cmd->add_flag("--all", oracle_all, "all twelve registry instances");

  CLI::App* resources_cmd =
      app.add_subcommand("resources", "print circuit resource counts");
  bool show_diagram = false;
  bool dump_terms = false;
  add_common(resources_cmd, common);
  resources_cmd->add_option("--algorithm", algorithm_text, "qaoa, qaoa-plus, hea or vqa-pfs");
  resources_cmd->add_flag("--diagram", show_diagram, "print the circuit diagram");
  resources_cmd->add_flag("--dump-qubo", dump_terms,
                          "print the cost coefficients (constant, linear, pairwise)");

  CLI11_PARSE(app, argc, argv);

  try {
    config.format = format_text == "json" ? OutputFormat::Json : OutputFormat::Csv;
    config.mixer_schedule =
        mixer_text == "final-only" ? MixerSchedule::FinalOnly : MixerSchedule::PerLayer;
    config.include_timing = !no_timing;
    config.parallel_seeds = !serial_seeds;

    if (run_cmd->parsed()) {
      config.algorithm = parse_algorithm(algorithm_text);
      return cmd_run(common, config);
    }
    if (compare_cmd->parsed()) {
      config.lambda = parse_lambda(common.lambda_text);
      return cmd_compare(sweep_instances, sweep_algorithms, sweep_p, config);
    }
    if (oracle_cmd->parsed()) return cmd_oracle(common, oracle_all);
    if (resources_cmd->parsed()) {
      return cmd_resources(common, algorithm_text, show_diagram, dump_terms);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
