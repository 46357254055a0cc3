#include "vqufl/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vqufl {

namespace {

// States at or above this size run gate loops in parallel.
constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

// Reductions accumulate fixed-size chunk partials and then sum them in index
// order, so results do not depend on the number of threads.
constexpr std::size_t kReduceChunk = std::size_t{1} << 12;

void check_qubit(const StateVector& state, int qubit, const char* what) {
  if (qubit < 0 || qubit >= state.n_qubits) {
    throw std::invalid_argument(std::string(what) + ": qubit index " +
                                std::to_string(qubit) + " out of range for " +
                                std::to_string(state.n_qubits) + " qubits");
  }
}

void check_n_qubits(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
  }
}

template <typename F>
double reduce_real(std::size_t n, F&& term) {
  const std::size_t n_chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partial(n_chunks, 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t end = std::min(begin + kReduceChunk, n);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

template <typename F>
complex_t reduce_complex(std::size_t n, F&& term) {
  const std::size_t n_chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<complex_t> partial(n_chunks, complex_t{0.0, 0.0});
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReduceChunk;
    const std::size_t end = std::min(begin + kReduceChunk, n);
    complex_t acc{0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  complex_t total{0.0, 0.0};
  for (const complex_t& v : partial) total += v;
  return total;
}

// Applies an arbitrary 2x2 unitary to one qubit.
void apply_two_by_two(StateVector& state, int qubit, complex_t m00, complex_t m01,
                      complex_t m10, complex_t m11) {
  const int pos = bit_position(state.n_qubits, qubit);
  const std::size_t stride = std::size_t{1} << pos;
  const std::size_t mask_low = stride - 1;
  const std::size_t half = state.dim() >> 1;
  complex_t* amps = state.amps.data();
#pragma omp parallel for schedule(static) if (half >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(half); ++k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    const std::size_t i0 = ((kk & ~mask_low) << 1) | (kk & mask_low);
    const std::size_t i1 = i0 | stride;
    const complex_t a0 = amps[i0];
    const complex_t a1 = amps[i1];
    amps[i0] = m00 * a0 + m01 * a1;
    amps[i1] = m10 * a0 + m11 * a1;
  }
}

// Index of the lowest basis state whose bits at positions pa > pb are zero,
// for the k-th group of four; the other two indices follow by or-ing strides.
inline std::size_t insert_two_zero_bits(std::size_t k, int ph, int pl) {
  const std::size_t mask_l = (std::size_t{1} << pl) - 1;
  const std::size_t low = k & mask_l;
  k >>= pl;
  const std::size_t mid_bits = static_cast<std::size_t>(ph - pl - 1);
  const std::size_t mask_m = (std::size_t{1} << mid_bits) - 1;
  const std::size_t mid = k & mask_m;
  k >>= mid_bits;
  return (k << (ph + 1)) | (mid << (pl + 1)) | low;
}

}  // namespace

std::size_t bits_to_index(std::string_view bits) {
  std::size_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bitstring must contain only '0'/'1', got '" +
                                  std::string(bits) + "'");
    }
    index = (index << 1) | static_cast<std::size_t>(c == '1');
  }
  return index;
}

std::string index_to_bits(std::size_t index, int n_qubits) {
  std::string bits(static_cast<std::size_t>(n_qubits), '0');
  for (int k = 0; k < n_qubits; ++k) {
    if ((index >> (n_qubits - 1 - k)) & 1U) bits[static_cast<std::size_t>(k)] = '1';
  }
  return bits;
}

double StateVector::norm_sq() const {
  const complex_t* a = amps.data();
  return reduce_real(dim(), [a](std::size_t i) { return std::norm(a[i]); });
}

StateVector StateVector::zero_state(int n_qubits) {
  check_n_qubits(n_qubits);
  StateVector state;
  state.n_qubits = n_qubits;
  state.amps.assign(std::size_t{1} << n_qubits, complex_t{0.0, 0.0});
  state.amps[0] = complex_t{1.0, 0.0};
  return state;
}

StateVector StateVector::basis_state(int n_qubits, std::string_view bits) {
  check_n_qubits(n_qubits);
  if (bits.size() != static_cast<std::size_t>(n_qubits)) {
    throw std::invalid_argument("basis_state: bitstring length " +
                                std::to_string(bits.size()) + " does not match " +
                                std::to_string(n_qubits) + " qubits");
  }
  StateVector state;
  state.n_qubits = n_qubits;
  state.amps.assign(std::size_t{1} << n_qubits, complex_t{0.0, 0.0});
  state.amps[bits_to_index(bits)] = complex_t{1.0, 0.0};
  return state;
}

StateVector StateVector::uniform_superposition(int n_qubits) {
  check_n_qubits(n_qubits);
  StateVector state;
  state.n_qubits = n_qubits;
  const std::size_t dim = std::size_t{1} << n_qubits;
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  state.amps.assign(dim, complex_t{amp, 0.0});
  return state;
}

void apply_single(StateVector& state, int qubit, SingleGate gate, double theta) {
  check_qubit(state, qubit, "apply_single");
  if (!std::isfinite(theta)) throw std::invalid_argument("apply_single: non-finite angle");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (gate) {
    case SingleGate::H: {
      const double r = 1.0 / std::sqrt(2.0);
      apply_two_by_two(state, qubit, {r, 0}, {r, 0}, {r, 0}, {-r, 0});
      return;
    }
    case SingleGate::X:
      apply_two_by_two(state, qubit, {0, 0}, {1, 0}, {1, 0}, {0, 0});
      return;
    case SingleGate::RX:
      apply_two_by_two(state, qubit, {c, 0}, {0, -s}, {0, -s}, {c, 0});
      return;
    case SingleGate::RY:
      apply_two_by_two(state, qubit, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
      return;
    case SingleGate::RZ:
      apply_two_by_two(state, qubit, {c, -s}, {0, 0}, {0, 0}, {c, s});
      return;
  }
  throw std::invalid_argument("apply_single: unknown gate");
}

void apply_cnot(StateVector& state, int control, int target) {
  check_qubit(state, control, "apply_cnot");
  check_qubit(state, target, "apply_cnot");
  if (control == target) throw std::invalid_argument("apply_cnot: control equals target");
  const int pc = bit_position(state.n_qubits, control);
  const int pt = bit_position(state.n_qubits, target);
  const int ph = std::max(pc, pt);
  const int pl = std::min(pc, pt);
  const std::size_t quarter = state.dim() >> 2;
  const std::size_t control_bit = std::size_t{1} << pc;
  const std::size_t target_bit = std::size_t{1} << pt;
  complex_t* amps = state.amps.data();
#pragma omp parallel for schedule(static) if (quarter >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(quarter); ++k) {
    const std::size_t base = insert_two_zero_bits(static_cast<std::size_t>(k), ph, pl);
    std::swap(amps[base | control_bit], amps[base | control_bit | target_bit]);
  }
}

void apply_xy(StateVector& state, int a, int b, double beta) {
  check_qubit(state, a, "apply_xy");
  check_qubit(state, b, "apply_xy");
  if (a == b) throw std::invalid_argument("apply_xy: equal qubit indices");
  if (!std::isfinite(beta)) throw std::invalid_argument("apply_xy: non-finite angle");
  const int pa = bit_position(state.n_qubits, a);
  const int pb = bit_position(state.n_qubits, b);
  const int ph = std::max(pa, pb);
  const int pl = std::min(pa, pb);
  const std::size_t quarter = state.dim() >> 2;
  const std::size_t bit_a = std::size_t{1} << pa;
  const std::size_t bit_b = std::size_t{1} << pb;
  const double c = std::cos(2.0 * beta);
  const complex_t mis{0.0, -std::sin(2.0 * beta)};
  complex_t* amps = state.amps.data();
#pragma omp parallel for schedule(static) if (quarter >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(quarter); ++k) {
    const std::size_t base = insert_two_zero_bits(static_cast<std::size_t>(k), ph, pl);
    const std::size_t i01 = base | bit_b;  // qubit a = 0, qubit b = 1
    const std::size_t i10 = base | bit_a;
    const complex_t a01 = amps[i01];
    const complex_t a10 = amps[i10];
    amps[i01] = c * a01 + mis * a10;
    amps[i10] = mis * a01 + c * a10;
  }
}

void apply_diagonal_phase(StateVector& state, std::span<const double> cost, double gamma) {
  if (cost.size() != state.dim()) {
    throw std::invalid_argument("apply_diagonal_phase: cost table length " +
                                std::to_string(cost.size()) + " != state dimension " +
                                std::to_string(state.dim()));
  }
  if (!std::isfinite(gamma)) throw std::invalid_argument("apply_diagonal_phase: non-finite angle");
  complex_t* amps = state.amps.data();
  const double* table = cost.data();
  const std::size_t n = state.dim();
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double phase = -gamma * table[i];
    amps[i] *= complex_t{std::cos(phase), std::sin(phase)};
  }
}

double expectation_diagonal(const StateVector& state, std::span<const double> cost) {
  if (cost.size() != state.dim()) {
    throw std::invalid_argument("expectation_diagonal: cost table length mismatch");
  }
  const complex_t* a = state.amps.data();
  const double* table = cost.data();
  return reduce_real(state.dim(),
                     [a, table](std::size_t i) { return std::norm(a[i]) * table[i]; });
}

double probability_mass(const StateVector& state, std::span<const std::size_t> indices) {
  double mass = 0.0;
  for (std::size_t index : indices) {
    if (index >= state.dim()) {
      throw std::invalid_argument("probability_mass: index " + std::to_string(index) +
                                  " out of range");
    }
    mass += std::norm(state.amps[index]);
  }
  return mass;
}

complex_t inner_product(const StateVector& bra, const StateVector& ket) {
  if (bra.dim() != ket.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  const complex_t* b = bra.amps.data();
  const complex_t* k = ket.amps.data();
  return reduce_complex(bra.dim(),
                        [b, k](std::size_t i) { return std::conj(b[i]) * k[i]; });
}

complex_t generator_inner_x(const StateVector& bra, const StateVector& ket, int qubit) {
  check_qubit(ket, qubit, "generator_inner_x");
  const std::size_t stride = std::size_t{1} << bit_position(ket.n_qubits, qubit);
  const std::size_t mask_low = stride - 1;
  const complex_t* b = bra.amps.data();
  const complex_t* k = ket.amps.data();
  // <b| X_q |k> summed over (i0, i1) pairs: X swaps the pair.
  return reduce_complex(ket.dim() >> 1, [=](std::size_t idx) {
    const std::size_t i0 = ((idx & ~mask_low) << 1) | (idx & mask_low);
    const std::size_t i1 = i0 | stride;
    return std::conj(b[i0]) * k[i1] + std::conj(b[i1]) * k[i0];
  });
}

complex_t generator_inner_y(const StateVector& bra, const StateVector& ket, int qubit) {
  check_qubit(ket, qubit, "generator_inner_y");
  const std::size_t stride = std::size_t{1} << bit_position(ket.n_qubits, qubit);
  const std::size_t mask_low = stride - 1;
  const complex_t* b = bra.amps.data();
  const complex_t* k = ket.amps.data();
  // Y|0> = i|1>, Y|1> = -i|0>.
  return reduce_complex(ket.dim() >> 1, [=](std::size_t idx) {
    const std::size_t i0 = ((idx & ~mask_low) << 1) | (idx & mask_low);
    const std::size_t i1 = i0 | stride;
    const complex_t t = std::conj(b[i1]) * k[i0] - std::conj(b[i0]) * k[i1];
    return complex_t{-t.imag(), t.real()};  // i * t
  });
}

complex_t generator_inner_z(const StateVector& bra, const StateVector& ket, int qubit) {
  check_qubit(ket, qubit, "generator_inner_z");
  const std::size_t stride = std::size_t{1} << bit_position(ket.n_qubits, qubit);
  const complex_t* b = bra.amps.data();
  const complex_t* k = ket.amps.data();
  return reduce_complex(ket.dim(), [=](std::size_t i) {
    const double sign = (i & stride) ? -1.0 : 1.0;
    return sign * std::conj(b[i]) * k[i];
  });
}

complex_t generator_inner_xy(const StateVector& bra, const StateVector& ket, int a, int b) {
  check_qubit(ket, a, "generator_inner_xy");
  check_qubit(ket, b, "generator_inner_xy");
  if (a == b) throw std::invalid_argument("generator_inner_xy: equal qubit indices");
  const int pa = bit_position(ket.n_qubits, a);
  const int pb = bit_position(ket.n_qubits, b);
  const int ph = std::max(pa, pb);
  const int pl = std::min(pa, pb);
  const std::size_t bit_a = std::size_t{1} << pa;
  const std::size_t bit_b = std::size_t{1} << pb;
  const complex_t* bv = bra.amps.data();
  const complex_t* kv = ket.amps.data();
  // (XX + YY)|01> = 2|10>, (XX + YY)|10> = 2|01>, zero on |00>, |11>.
  return reduce_complex(ket.dim() >> 2, [=](std::size_t idx) {
    const std::size_t base = insert_two_zero_bits(idx, ph, pl);
    const std::size_t i01 = base | bit_b;
    const std::size_t i10 = base | bit_a;
    return 2.0 * (std::conj(bv[i01]) * kv[i10] + std::conj(bv[i10]) * kv[i01]);
  });
}

complex_t generator_inner_diagonal(const StateVector& bra, const StateVector& ket,
                                   std::span<const double> cost) {
  if (cost.size() != ket.dim()) {
    throw std::invalid_argument("generator_inner_diagonal: cost table length mismatch");
  }
  const complex_t* b = bra.amps.data();
  const complex_t* k = ket.amps.data();
  const double* table = cost.data();
  return reduce_complex(ket.dim(), [=](std::size_t i) {
    return std::conj(b[i]) * k[i] * table[i];
  });
}

}  // namespace vqufl
