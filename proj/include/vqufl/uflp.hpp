#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vqufl {

// Facility location instance: m customers, n candidate facilities,
// service costs D (m x n) and opening costs G (n).
struct UflpInstance {
  std::string name;
  int num_customers = 0;                         // m
  int num_facilities = 0;                        // n
  std::vector<std::vector<double>> service_cost; // D, row per customer
  std::vector<double> opening_cost;              // G
  std::optional<double> known_optimal;
  std::optional<double> lambda_override;

  void validate() const;  // throws std::invalid_argument naming the bad field
  double max_service_cost() const;
  double max_opening_cost() const;

  // Penalty weight: 2 * (max d_ij + max g_j) unless overridden. Makes a unit
  // constraint violation costlier than any achievable objective swing.
  double default_lambda() const { return 2.0 * (max_service_cost() + max_opening_cost()); }
  double lambda_or_default() const {
    return lambda_override ? *lambda_override : default_lambda();
  }
};

// Qubit order: the m*n assignment bits y_ij first, then the n opening bits
// x_j, then the m*n slack bits z_ij. The y qubits are the constrained set
// (one-hot per customer); x and z are unconstrained.
struct QubitLayout {
  int m = 0;
  int n = 0;

  QubitLayout() = default;
  QubitLayout(int customers, int facilities) : m(customers), n(facilities) {}
  explicit QubitLayout(const UflpInstance& instance)
      : m(instance.num_customers), n(instance.num_facilities) {}

  int y_index(int i, int j) const { return i * n + j; }
  int x_index(int j) const { return m * n + j; }
  int z_index(int i, int j) const { return m * n + n + i * n + j; }
  int total_qubits() const { return 2 * m * n + n; }
  int num_constrained() const { return m * n; }
  int num_unconstrained() const { return m * n + n; }
  std::vector<int> unconstrained_qubits() const;
};

// Binary decision variables decoded from a bitstring.
struct Assignment {
  std::vector<std::uint8_t> y;  // m*n, row-major
  std::vector<std::uint8_t> x;  // n
  std::vector<std::uint8_t> z;  // m*n, row-major

  static Assignment from_bits(std::string_view bits, const QubitLayout& layout);
  std::string to_bits(const QubitLayout& layout) const;
};

// Objective: sum d_ij y_ij + sum g_j x_j.
double uflp_cost(const UflpInstance& instance, const std::vector<std::uint8_t>& y,
                 const std::vector<std::uint8_t>& x);

// Objective plus lambda * sum_ij (y_ij + z_ij - x_j)^2 over the full bitstring.
double penalized_cost(const UflpInstance& instance, std::string_view bits, double lambda);

// True iff every y-block of n bits has Hamming weight exactly one.
bool hard_feasible(std::string_view bits, const QubitLayout& layout);

// Every customer served by facility 0, nothing opened, no slack.
std::string trivial_feasible_bits(const QubitLayout& layout);

struct BruteForceResult {
  double optimal_value = 0.0;
  std::vector<std::string> optimal_bits;         // every attaining bitstring, sorted
  std::vector<std::size_t> optimal_indices;      // same strings as basis indices
  std::vector<Assignment> optimal_yx;            // distinct (y, x) projections
};

// Exhaustive minimum of penalized_cost over hard-feasible bitstrings:
// n^m feasible y-blocks crossed with all 2^(mn+n) (x, z) completions.
// Rejected when that product exceeds 2^26 evaluations.
BruteForceResult brute_force(const UflpInstance& instance, double lambda);

// The twelve built-in benchmark instances, keyed "instance-01".."instance-12".
const std::vector<UflpInstance>& instance_registry();
const UflpInstance& registry_instance(std::string_view key);

}  // namespace vqufl
