#include "vqufl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vqufl {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// Marks every basis index whose y-blocks all have Hamming weight one.
std::vector<std::uint8_t> feasible_mask(const QubitLayout& layout) {
  const int n_qubits = layout.total_qubits();
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<std::uint8_t> mask(dim, 1);
  for (std::size_t b = 0; b < dim; ++b) {
    for (int i = 0; i < layout.m; ++i) {
      int weight = 0;
      for (int j = 0; j < layout.n; ++j) weight += bit_of(b, n_qubits, layout.y_index(i, j));
      if (weight != 1) {
        mask[b] = 0;
        break;
      }
    }
  }
  return mask;
}

double infeasible_mass(const StateVector& state, const std::vector<std::uint8_t>& mask) {
  double mass = 0.0;
  for (std::size_t b = 0; b < state.dim(); ++b) {
    if (!mask[b]) mass += std::norm(state.amps[b]);
  }
  return mass;
}

int iterations_to_plateau(const std::vector<double>& losses, double final_loss) {
  const double tolerance = 0.01 * std::max(std::abs(final_loss), 1e-12);
  for (std::size_t t = 0; t < losses.size(); ++t) {
    if (std::abs(losses[t] - final_loss) <= tolerance) return static_cast<int>(t);
  }
  return static_cast<int>(losses.size());
}

struct ProblemSetup {
  UflpInstance instance;
  QubitLayout layout;
  double lambda = 0.0;
  QuboForm qubo;       // drives both phase separation and the loss
  Circuit circuit;
  std::vector<double> table;
  ResourceReport report;
};

ProblemSetup prepare(const ExperimentConfig& config) {
  ProblemSetup setup;
  setup.instance = resolve_instance(config.instance);
  setup.instance.validate();
  setup.layout = QubitLayout(setup.instance);
  setup.lambda = config.lambda ? *config.lambda : setup.instance.lambda_or_default();
  if (setup.lambda < 0.0 || !std::isfinite(setup.lambda)) {
    throw std::invalid_argument("run: lambda must be finite and >= 0");
  }

  const MixerSpec mixer = mixer_pairs(setup.layout.m, setup.layout.n);
  switch (config.algorithm) {
    case Algorithm::Qaoa:
      setup.qubo = qubo_full(setup.instance, setup.lambda);
      setup.circuit = build_qaoa(setup.layout, setup.qubo, config.p);
      break;
    case Algorithm::QaoaPlus:
      setup.qubo = qubo_pfs(setup.instance, setup.lambda);
      setup.circuit = build_qaoa_plus(setup.layout, setup.qubo, mixer, config.p);
      break;
    case Algorithm::Hea:
      setup.qubo = qubo_full(setup.instance, setup.lambda);
      setup.circuit = build_hea(setup.layout.total_qubits(), config.p);
      break;
    case Algorithm::VqaPfs:
      setup.qubo = qubo_pfs(setup.instance, setup.lambda);
      setup.circuit = build_vqa_pfs(setup.layout, mixer, config.p, config.mixer_schedule);
      break;
  }
  setup.table = diagonal_table(setup.qubo, setup.layout.total_qubits());
  setup.report =
      resources(setup.circuit, setup.circuit.has_diag_phase() ? &setup.qubo : nullptr);
  return setup;
}

SeedResult run_seed(const ExperimentConfig& config, const ProblemSetup& setup,
                    const std::vector<std::uint8_t>& mask,
                    std::span<const std::size_t> optimal_indices, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;

  AdamConfig adam = config.adam;
  adam.seed = seed;
  const std::vector<double> init = random_init(setup.circuit.n_params, seed);

  double max_infeasible = 0.0;
  double best_success = 0.0;
  const bool track_best = config.best_over_trajectory;
  const auto observer = [&](int, double, const StateVector& state) {
    max_infeasible = std::max(max_infeasible, infeasible_mass(state, mask));
    if (track_best) {
      best_success = std::max(best_success, success_probability(state, optimal_indices));
    }
  };

  const auto start = std::chrono::steady_clock::now();
  Trajectory trajectory = adam_minimize(setup.circuit, setup.table, init, adam, observer);

  const StateVector final_state =
      simulate(setup.circuit, trajectory.final_params,
               setup.circuit.has_diag_phase() ? std::span<const double>(setup.table)
                                              : std::span<const double>{});
  result.final_loss = expectation_diagonal(final_state, setup.table);
  result.success_prob = success_probability(final_state, optimal_indices);
  max_infeasible = std::max(max_infeasible, infeasible_mass(final_state, mask));
  const auto stop = std::chrono::steady_clock::now();

  result.losses = std::move(trajectory.losses);
  result.grad_norms = std::move(trajectory.grad_norms);
  result.best_success_prob = std::max(best_success, result.success_prob);
  result.iters_to_plateau = iterations_to_plateau(result.losses, result.final_loss);
  result.infeasible_mass = max_infeasible;
  result.wall_seconds =
      config.include_timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
  return result;
}

json record_to_json(const RunRecord& record) {
  json doc;
  doc["instance"] = record.instance_name;
  doc["algorithm"] = std::string(algorithm_name(record.config.algorithm));
  doc["p"] = record.config.p;
  doc["lambda"] = record.lambda;
  doc["n_qubits"] = record.n_qubits;
  doc["adam"] = {{"learning_rate", record.config.adam.learning_rate},
                 {"beta1", record.config.adam.beta1},
                 {"beta2", record.config.adam.beta2},
                 {"epsilon", record.config.adam.epsilon},
                 {"max_iters", record.config.adam.max_iters},
                 {"plateau_stop", record.config.adam.plateau_stop}};
  doc["resources"] = {{"depth", record.resources.depth},
                      {"cnots", record.resources.cnot_count},
                      {"param_gates", record.resources.param_gate_count},
                      {"params", record.resources.param_count}};
  doc["optimal_value"] = record.optimal_value;
  doc["optimal_bits"] = record.optimal_bits;
  json seeds = json::array();
  for (const SeedResult& seed : record.seeds) {
    json entry;
    entry["seed"] = seed.seed;
    entry["final_loss"] = seed.final_loss;
    entry["success_prob"] = seed.success_prob;
    if (record.config.best_over_trajectory) {
      entry["best_success_prob"] = seed.best_success_prob;
    }
    entry["iters_to_plateau"] = seed.iters_to_plateau;
    entry["infeasible_mass"] = seed.infeasible_mass;
    entry["wall_seconds"] = seed.wall_seconds;
    entry["iterations"] = seed.losses.size();
    entry["losses"] = seed.losses;
    entry["grad_norms"] = seed.grad_norms;
    seeds.push_back(std::move(entry));
  }
  doc["seeds"] = std::move(seeds);
  doc["mean_success"] = record.mean_success;
  doc["median_success"] = record.median_success;
  doc["max_success"] = record.max_success;
  return doc;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "qaoa") return Algorithm::Qaoa;
  if (name == "qaoa-plus") return Algorithm::QaoaPlus;
  if (name == "hea") return Algorithm::Hea;
  if (name == "vqa-pfs") return Algorithm::VqaPfs;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected qaoa, qaoa-plus, hea or vqa-pfs)");
}

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Qaoa: return "qaoa";
    case Algorithm::QaoaPlus: return "qaoa-plus";
    case Algorithm::Hea: return "hea";
    case Algorithm::VqaPfs: return "vqa-pfs";
  }
  throw std::logic_error("algorithm_name: bad enum");
}

void ExperimentConfig::validate() const {
  if (p < 1) throw std::invalid_argument("config: p must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  if (instance.empty()) throw std::invalid_argument("config: instance must be set");
  adam.validate();
  if (lambda && (*lambda < 0.0 || !std::isfinite(*lambda))) {
    throw std::invalid_argument("config: lambda must be finite and >= 0");
  }
}

double success_probability(const StateVector& state,
                           std::span<const std::size_t> optimal_indices) {
  if (optimal_indices.empty()) {
    throw std::invalid_argument("success_probability: empty optimal set");
  }
  return probability_mass(state, optimal_indices);
}

double success_probability(const StateVector& state,
                           std::span<const std::string> optimal_bits) {
  std::vector<std::size_t> indices;
  indices.reserve(optimal_bits.size());
  for (const std::string& bits : optimal_bits) indices.push_back(bits_to_index(bits));
  return success_probability(state, indices);
}

RunRecord run(const ExperimentConfig& config) {
  config.validate();
  const ProblemSetup setup = prepare(config);
  const BruteForceResult oracle = brute_force(setup.instance, setup.lambda);
  const std::vector<std::uint8_t> mask = feasible_mask(setup.layout);
  const std::vector<std::size_t> targets =
      config.single_optimum
          ? std::vector<std::size_t>{oracle.optimal_indices.front()}
          : oracle.optimal_indices;

  RunRecord record;
  record.config = config;
  record.instance_name = setup.instance.name;
  record.n_qubits = setup.layout.total_qubits();
  record.lambda = setup.lambda;
  record.resources = setup.report;
  record.optimal_value = oracle.optimal_value;
  record.optimal_bits = oracle.optimal_bits;
  record.seeds.resize(config.seeds.size());

  const std::ptrdiff_t n_seeds = static_cast<std::ptrdiff_t>(config.seeds.size());
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic) if (config.parallel_seeds && n_seeds > 1)
  for (std::ptrdiff_t s = 0; s < n_seeds; ++s) {
    try {
      record.seeds[static_cast<std::size_t>(s)] =
          run_seed(config, setup, mask, targets, config.seeds[static_cast<std::size_t>(s)]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> probs;
  probs.reserve(record.seeds.size());
  for (const SeedResult& seed : record.seeds) probs.push_back(seed.success_prob);
  std::sort(probs.begin(), probs.end());
  record.max_success = probs.back();
  record.median_success = probs.size() % 2 == 1
                              ? probs[probs.size() / 2]
                              : 0.5 * (probs[probs.size() / 2 - 1] + probs[probs.size() / 2]);
  double total = 0.0;
  for (double v : probs) total += v;
  record.mean_success = total / static_cast<double>(probs.size());

  if (!config.output_path.empty()) {
    write_output_file(config.output_path, config.format, {&record, 1},
                      config.best_over_trajectory);
  }
  return record;
}

std::vector<RunRecord> compare(const std::vector<std::string>& instances,
                               const std::vector<Algorithm>& algorithms,
                               const std::vector<int>& p_values,
                               const std::vector<std::uint64_t>& seeds,
                               const ExperimentConfig& base) {
  if (instances.empty() || algorithms.empty() || p_values.empty() || seeds.empty()) {
    throw std::invalid_argument("compare: every sweep list must be nonempty");
  }
  std::vector<RunRecord> records;
  records.reserve(instances.size() * algorithms.size() * p_values.size());
  for (const std::string& instance : instances) {
    for (const Algorithm algorithm : algorithms) {
      for (const int p : p_values) {
        ExperimentConfig config = base;
        config.instance = instance;
        config.algorithm = algorithm;
        config.p = p;
        config.seeds = seeds;
        config.output_path.clear();  // caller writes the combined table
        records.push_back(run(config));
      }
    }
  }
  return records;
}

UflpInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& error) {
    throw std::runtime_error("instance file " + path + ": " + error.what());
  }

  UflpInstance instance;
  try {
    instance.name = doc.at("name").get<std::string>();
    instance.num_customers = doc.at("m").get<int>();
    instance.num_facilities = doc.at("n").get<int>();
    instance.service_cost = doc.at("D").get<std::vector<std::vector<double>>>();
    instance.opening_cost = doc.at("G").get<std::vector<double>>();
    if (doc.contains("known_optimal")) {
      instance.known_optimal = doc.at("known_optimal").get<double>();
    }
    if (doc.contains("lambda")) instance.lambda_override = doc.at("lambda").get<double>();
  } catch (const json::exception& error) {
    throw std::runtime_error("instance file " + path + ": " + error.what());
  }
  instance.validate();
  return instance;
}

void save_instance(std::ostream& out, const UflpInstance& instance) {
  json doc;
  doc["name"] = instance.name;
  doc["m"] = instance.num_customers;
  doc["n"] = instance.num_facilities;
  doc["D"] = instance.service_cost;
  doc["G"] = instance.opening_cost;
  if (instance.known_optimal) doc["known_optimal"] = *instance.known_optimal;
  if (instance.lambda_override) doc["lambda"] = *instance.lambda_override;
  out << doc.dump(2) << '\n';
}

UflpInstance resolve_instance(const std::string& key_or_path) {
  for (const UflpInstance& instance : instance_registry()) {
    if (instance.name == key_or_path) return instance;
  }
  return load_instance(key_or_path);
}

const char* const kCsvHeader =
    "instance,algorithm,p,seed,lambda,final_loss,success_prob,iters_to_plateau,"
    "depth,cnots,param_gates,params,infeasible_mass,wall_seconds";

void write_csv_header(std::ostream& out, bool best_column) {
  out << kCsvHeader;
  if (best_column) out << ",best_success_prob";
  out << '\n';
}

void write_csv_rows(std::ostream& out, const RunRecord& record) {
  for (const SeedResult& seed : record.seeds) {
    out << record.instance_name << ',' << algorithm_name(record.config.algorithm) << ','
        << record.config.p << ',' << seed.seed << ',' << format_double(record.lambda) << ','
        << format_double(seed.final_loss) << ',' << format_double(seed.success_prob) << ','
        << seed.iters_to_plateau << ',' << record.resources.depth << ','
        << record.resources.cnot_count << ',' << record.resources.param_gate_count << ','
        << record.resources.param_count << ',' << format_double(seed.infeasible_mass) << ','
        << format_double(seed.wall_seconds);
    if (record.config.best_over_trajectory) {
      out << ',' << format_double(seed.best_success_prob);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, std::span<const RunRecord> records) {
  json doc = json::array();
  for (const RunRecord& record : records) doc.push_back(record_to_json(record));
  out << doc.dump(2) << '\n';
}

void write_output_file(const std::string& path, OutputFormat format,
                       std::span<const RunRecord> records, bool best_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file for writing: " + path);
  if (format == OutputFormat::Csv) {
    write_csv_header(out, best_column);
    for (const RunRecord& record : records) write_csv_rows(out, record);
  } else {
    write_json(out, records);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace vqufl
