#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace vqufl {

using complex_t = std::complex<double>;

// Qubit k occupies bit position (n_qubits - 1 - k) of the basis index, so an
// index written in binary left-to-right reads q0 q1 ... q_{N-1} and a basis
// bitstring is simply the binary representation of its index.
inline int bit_position(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

inline int bit_of(std::size_t index, int n_qubits, int qubit) {
  return static_cast<int>((index >> bit_position(n_qubits, qubit)) & 1U);
}

std::size_t bits_to_index(std::string_view bits);
std::string index_to_bits(std::size_t index, int n_qubits);

// Dense 2^n amplitude vector. Hard cap at 24 qubits (256 MB of amplitudes).
inline constexpr int kMaxQubits = 24;

struct StateVector {
  int n_qubits = 0;
  std::vector<complex_t> amps;

  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;
  double probability(std::size_t index) const { return std::norm(amps[index]); }

  static StateVector zero_state(int n_qubits);
  static StateVector basis_state(int n_qubits, std::string_view bits);
  static StateVector uniform_superposition(int n_qubits);
};

enum class SingleGate { H, X, RX, RY, RZ };

// In-place gate kernels. Rotation convention: R_A(theta) = exp(-i theta A / 2).
void apply_single(StateVector& state, int qubit, SingleGate gate, double theta = 0.0);
void apply_cnot(StateVector& state, int control, int target);

// exp(-i beta (X_a X_b + Y_a Y_b)) as an exact unitary on the pair subspace:
// |01> -> cos(2b)|01> - i sin(2b)|10> and symmetrically; |00>, |11> untouched.
void apply_xy(StateVector& state, int a, int b, double beta);

// Multiplies amplitude b by exp(-i gamma * cost[b]).
void apply_diagonal_phase(StateVector& state, std::span<const double> cost, double gamma);

double expectation_diagonal(const StateVector& state, std::span<const double> cost);
double probability_mass(const StateVector& state, std::span<const std::size_t> indices);

// Callable-based variants for costs that are cheaper to evaluate than to
// tabulate; the span versions above are the hot path.
template <typename CostFn>
  requires std::is_invocable_r_v<double, CostFn, std::size_t>
void apply_diagonal_phase(StateVector& state, CostFn&& cost, double gamma) {
  for (std::size_t b = 0; b < state.dim(); ++b) {
    const double phase = -gamma * cost(b);
    state.amps[b] *= complex_t{std::cos(phase), std::sin(phase)};
  }
}

template <typename CostFn>
  requires std::is_invocable_r_v<double, CostFn, std::size_t>
double expectation_diagonal(const StateVector& state, CostFn&& cost) {
  double total = 0.0;
  for (std::size_t b = 0; b < state.dim(); ++b) total += std::norm(state.amps[b]) * cost(b);
  return total;
}

// Hermitian generator applications used by the adjoint gradient sweep.
// Each computes <bra| A |ket> by streaming both vectors once; A is never
// materialized and neither input is modified.
complex_t inner_product(const StateVector& bra, const StateVector& ket);
complex_t generator_inner_x(const StateVector& bra, const StateVector& ket, int qubit);
complex_t generator_inner_y(const StateVector& bra, const StateVector& ket, int qubit);
complex_t generator_inner_z(const StateVector& bra, const StateVector& ket, int qubit);
complex_t generator_inner_xy(const StateVector& bra, const StateVector& ket, int a, int b);
complex_t generator_inner_diagonal(const StateVector& bra, const StateVector& ket,
                                   std::span<const double> cost);

}  // namespace vqufl
