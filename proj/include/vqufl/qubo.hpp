#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "vqufl/uflp.hpp"

namespace vqufl {

// Diagonal cost operator as constant + linear + pairwise coefficients over
// binary variables. Keys are qubit indices; quadratic keys are ordered pairs
// (a < b). Ordered maps keep every downstream traversal deterministic.
struct QuboForm {
  double constant = 0.0;
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;

  void add_constant(double c) { constant += c; }
  void add_linear(int a, double c);
  void add_quadratic(int a, int b, double c);

  double eval_bits(std::string_view bits) const;
  double eval_index(std::size_t index, int n_qubits) const;
  int max_qubit() const;  // -1 when no terms
};

// Pauli-Z image of a QuboForm under bit -> (1 - Z)/2.
struct ZForm {
  double constant = 0.0;
  std::map<int, double> z;
  std::map<std::pair<int, int>, double> zz;
};

ZForm to_z_basis(const QuboForm& qubo);
QuboForm from_z_basis(const ZForm& zform);

// Objective plus lambda * sum_ij (y_ij + z_ij - x_j)^2; the one-hot row
// constraint stays hard (enforced by the mixer, not the Hamiltonian).
QuboForm qubo_pfs(const UflpInstance& instance, double lambda);

// Objective plus lambda * [sum_i (sum_j y_ij - 1)^2 + sum_ij (y_ij + z_ij - x_j)^2];
// both constraint groups softened, as needed when the mixer explores all strings.
QuboForm qubo_full(const UflpInstance& instance, double lambda);

// Nearest-neighbour pairs (a, a+1) chained inside each customer's y-block.
struct MixerSpec {
  std::vector<std::pair<int, int>> pairs;
};

MixerSpec mixer_pairs(int m, int n);

// Dense table: entry b = qubo.eval on the bits of b. Guarded at 24 qubits.
std::vector<double> diagonal_table(const QuboForm& qubo, int n_qubits);

// Debug dump: constant, then "l <qubit> <coeff>" lines, then "q <a> <b> <coeff>".
void dump_qubo(std::ostream& out, const QuboForm& qubo);

}  // namespace vqufl
