#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vqufl/circuit.hpp"
#include "vqufl/optimizer.hpp"
#include "vqufl/qubo.hpp"
#include "vqufl/state_vector.hpp"
#include "vqufl/uflp.hpp"

namespace vqufl {

enum class Algorithm { Qaoa, QaoaPlus, Hea, VqaPfs };

Algorithm parse_algorithm(std::string_view name);  // qaoa | qaoa-plus | hea | vqa-pfs
std::string_view algorithm_name(Algorithm algorithm);

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::VqaPfs;
  std::string instance;                // registry key or instance file path
  int p = 1;
  std::optional<double> lambda;        // empty: instance override or default policy
  std::vector<std::uint64_t> seeds = {0};
  AdamConfig adam;
  std::string output_path;             // empty: no file written
  OutputFormat format = OutputFormat::Csv;

  bool include_timing = true;          // false writes 0 for byte-stable output
  bool best_over_trajectory = false;   // extra column, evaluated at every iteration
  bool single_optimum = false;         // success prob against one optimal string only
  MixerSchedule mixer_schedule = MixerSchedule::PerLayer;
  bool parallel_seeds = true;

  void validate() const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> losses;
  std::vector<double> grad_norms;
  double final_loss = 0.0;             // at the optimized parameters
  double success_prob = 0.0;
  double best_success_prob = 0.0;      // filled when best_over_trajectory is on
  int iters_to_plateau = 0;            // first iteration within 1% of final loss
  double infeasible_mass = 0.0;        // max over logged iterations and final state
  double wall_seconds = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string instance_name;
  int n_qubits = 0;
  double lambda = 0.0;
  ResourceReport resources;
  double optimal_value = 0.0;
  std::vector<std::string> optimal_bits;
  std::vector<SeedResult> seeds;
  double mean_success = 0.0;
  double median_success = 0.0;
  double max_success = 0.0;
};

// Total probability the state assigns to the optimal set; degenerate optima
// are summed.
double success_probability(const StateVector& state,
                           std::span<const std::size_t> optimal_indices);
double success_probability(const StateVector& state,
                           std::span<const std::string> optimal_bits);

// One experiment cell: builds circuit and cost table, certifies the optimum
// by brute force, optimizes from each seed and evaluates the optimized state.
// Writes config.output_path when set.
RunRecord run(const ExperimentConfig& config);

// Cartesian sweep; one RunRecord per (instance, algorithm, p), each holding
// all seeds. Iteration order is instances > algorithms > p values.
std::vector<RunRecord> compare(const std::vector<std::string>& instances,
                               const std::vector<Algorithm>& algorithms,
                               const std::vector<int>& p_values,
                               const std::vector<std::uint64_t>& seeds,
                               const ExperimentConfig& base);

// Instance files are JSON documents: name, m, n, D (row-major array of
// arrays), G (array), optional known_optimal, optional lambda.
UflpInstance load_instance(const std::string& path);
void save_instance(std::ostream& out, const UflpInstance& instance);
UflpInstance resolve_instance(const std::string& key_or_path);

// Fixed CSV schema shared by run and compare outputs.
extern const char* const kCsvHeader;
void write_csv_header(std::ostream& out, bool best_column);
void write_csv_rows(std::ostream& out, const RunRecord& record);
void write_json(std::ostream& out, std::span<const RunRecord> records);
void write_output_file(const std::string& path, OutputFormat format,
                       std::span<const RunRecord> records, bool best_column);

}  // namespace vqufl
