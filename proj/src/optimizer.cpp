#include "vqufl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace vqufl {

namespace {

void check_table(const Circuit& circuit, std::span<const double> table) {
  if (circuit.n_qubits < 1 || circuit.n_qubits > kMaxQubits) {
    throw std::invalid_argument("circuit qubit count out of range");
  }
  if (table.size() != (std::size_t{1} << circuit.n_qubits)) {
    throw std::invalid_argument("cost table length " + std::to_string(table.size()) +
                                " != 2^" + std::to_string(circuit.n_qubits));
  }
}

double gate_angle(const GateOp& gate, std::span<const double> params) {
  return gate.param.bound()
             ? params[static_cast<std::size_t>(gate.param.slot)] * gate.param.scale
             : 0.0;
}

// d/dphi exp(-i c phi A) inserts -i c A; rotations carry c = 1/2, the pair
// mixer and the phase separation carry c = 1.
double generator_term(const GateOp& gate, const StateVector& bra, const StateVector& ket,
                      std::span<const double> table) {
  switch (gate.kind) {
    case GateKind::RX:
      return 0.5 * generator_inner_x(bra, ket, gate.q0).imag();
    case GateKind::RY:
      return 0.5 * generator_inner_y(bra, ket, gate.q0).imag();
    case GateKind::RZ:
      return 0.5 * generator_inner_z(bra, ket, gate.q0).imag();
    case GateKind::XY:
      return generator_inner_xy(bra, ket, gate.q0, gate.q1).imag();
    case GateKind::DiagPhase:
      return generator_inner_diagonal(bra, ket, table).imag();
    default:
      throw std::logic_error("generator_term: gate has no parameter");
  }
}

}  // namespace

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (plateau_window < 1) throw std::invalid_argument("plateau_window must be >= 1");
}

void apply_gate(StateVector& state, const GateOp& gate, double angle,
                std::span<const double> diag) {
  switch (gate.kind) {
    case GateKind::H:
      apply_single(state, gate.q0, SingleGate::H);
      return;
    case GateKind::X:
      apply_single(state, gate.q0, SingleGate::X);
      return;
    case GateKind::RX:
      apply_single(state, gate.q0, SingleGate::RX, angle);
      return;
    case GateKind::RY:
      apply_single(state, gate.q0, SingleGate::RY, angle);
      return;
    case GateKind::RZ:
      apply_single(state, gate.q0, SingleGate::RZ, angle);
      return;
    case GateKind::CNOT:
      apply_cnot(state, gate.q0, gate.q1);
      return;
    case GateKind::XY:
      apply_xy(state, gate.q0, gate.q1, angle);
      return;
    case GateKind::DiagPhase:
      apply_diagonal_phase(state, diag, angle);
      return;
  }
  throw std::logic_error("apply_gate: unknown gate kind");
}

double cost(const Circuit& circuit, std::span<const double> params,
            std::span<const double> diag_cost_table) {
  check_table(circuit, diag_cost_table);
  const StateVector state = simulate(
      circuit, params, circuit.has_diag_phase() ? diag_cost_table : std::span<const double>{});
  return expectation_diagonal(state, diag_cost_table);
}

std::vector<double> gradient(const Circuit& circuit, std::span<const double> params,
                             std::span<const double> diag_cost_table) {
  return value_and_gradient(circuit, params, diag_cost_table).gradient;
}

namespace {

// Reverse sweep over one (sub)circuit, accumulating into grad. ket tracks
// U_g..U_1|init>, bra the observable pulled back through the already-undone
// tail; both walk the circuit in reverse together.
void adjoint_accumulate(const Circuit& circuit, std::span<const double> params,
                        std::span<const double> table, std::vector<double>& grad,
                        const StateVector& forward) {
  std::ptrdiff_t first_param = -1;
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    if (circuit.gates[g].param.bound()) {
      first_param = static_cast<std::ptrdiff_t>(g);
      break;
    }
  }
  if (first_param < 0) return;

  const std::span<const double> diag =
      circuit.has_diag_phase() ? table : std::span<const double>{};
  StateVector ket = forward;
  StateVector bra = forward;
  for (std::size_t i = 0; i < bra.amps.size(); ++i) bra.amps[i] *= table[i];

  for (std::ptrdiff_t g = static_cast<std::ptrdiff_t>(circuit.gates.size()) - 1;
       g >= first_param; --g) {
    const GateOp& gate = circuit.gates[static_cast<std::size_t>(g)];
    const double angle = gate_angle(gate, params);
    if (gate.param.bound()) {
      const double term = generator_term(gate, bra, ket, table);
      grad[static_cast<std::size_t>(gate.param.slot)] += 2.0 * gate.param.scale * term;
    }
    if (g > first_param) {
      apply_gate(ket, gate, -angle, diag);
      apply_gate(bra, gate, -angle, diag);
    }
  }
}

// Largest qubit position k such that no gate couples {0..k-1} to {k..N-1},
// or 0 when the circuit does not split. Phase separation couples everything.
// Taking the largest cut keeps the full-size trace pass at the top of the
// recursion and leaves the biggest factor as a leaf.
int find_cut(const Circuit& circuit) {
  if (circuit.n_qubits < 2) return 0;
  std::vector<char> blocked(static_cast<std::size_t>(circuit.n_qubits), 0);
  for (const GateOp& gate : circuit.gates) {
    if (gate.kind == GateKind::DiagPhase) return 0;
    if (gate.q1 < 0) continue;
    const int lo = std::min(gate.q0, gate.q1);
    const int hi = std::max(gate.q0, gate.q1);
    for (int k = lo + 1; k <= hi; ++k) blocked[static_cast<std::size_t>(k)] = 1;
  }
  for (int k = circuit.n_qubits - 1; k >= 1; --k) {
    if (!blocked[static_cast<std::size_t>(k)]) return k;
  }
  return 0;
}

// The gates and initial state restricted to qubits [begin, end); parameter
// slots keep their global numbering.
Circuit slice_circuit(const Circuit& circuit, int begin, int end) {
  Circuit part;
  part.n_qubits = end - begin;
  part.initial = circuit.initial;
  if (circuit.initial == InitialState::Basis) {
    part.initial_bits = circuit.initial_bits.substr(static_cast<std::size_t>(begin),
                                                    static_cast<std::size_t>(end - begin));
  }
  part.n_params = circuit.n_params;
  for (const GateOp& gate : circuit.gates) {
    if (gate.q0 < begin || gate.q0 >= end) continue;
    GateOp shifted = gate;
    shifted.q0 -= begin;
    if (shifted.q1 >= 0) shifted.q1 -= begin;
    part.gates.push_back(shifted);
  }
  return part;
}

// Gradient of <psi| diag(table) |psi> for a circuit whose qubits split at a
// cut: the state is an exact product a (x) b, so each factor sees an
// effective diagonal obtained by tracing the table against the other
// factor's probabilities. Recurses until no cut remains.
void gradient_accumulate(const Circuit& circuit, std::span<const double> params,
                         std::span<const double> table, std::vector<double>& grad) {
  const int cut = find_cut(circuit);
  if (cut == 0) {
    const StateVector forward =
        simulate(circuit, params,
                 circuit.has_diag_phase() ? table : std::span<const double>{});
    adjoint_accumulate(circuit, params, table, grad, forward);
    return;
  }

  const Circuit part_a = slice_circuit(circuit, 0, cut);
  const Circuit part_b = slice_circuit(circuit, cut, circuit.n_qubits);
  const StateVector state_a = simulate(part_a, params);
  const StateVector state_b = simulate(part_b, params);
  const std::size_t dim_a = state_a.dim();
  const std::size_t dim_b = state_b.dim();

  std::vector<double> prob_a(dim_a);
  for (std::size_t r = 0; r < dim_a; ++r) prob_a[r] = std::norm(state_a.amps[r]);
  std::vector<double> prob_b(dim_b);
  for (std::size_t u = 0; u < dim_b; ++u) prob_b[u] = std::norm(state_b.amps[u]);

  std::vector<double> eff_a(dim_a, 0.0);
  std::vector<double> eff_b(dim_b, 0.0);
  for (std::size_t r = 0; r < dim_a; ++r) {
    const double* row = table.data() + r * dim_b;
    const double weight = prob_a[r];
    double traced = 0.0;
    for (std::size_t u = 0; u < dim_b; ++u) {
      traced += row[u] * prob_b[u];
      eff_b[u] += weight * row[u];
    }
    eff_a[r] = traced;
  }

  gradient_accumulate(part_a, params, eff_a, grad);
  gradient_accumulate(part_b, params, eff_b, grad);
}

StateVector materialize_product(const StateVector& state_a, const StateVector& state_b) {
  StateVector state;
  state.n_qubits = state_a.n_qubits + state_b.n_qubits;
  state.amps.resize(state_a.dim() * state_b.dim());
  const std::size_t dim_b = state_b.dim();
  const complex_t* b = state_b.amps.data();
  complex_t* out = state.amps.data();
#pragma omp parallel for schedule(static) if (state.amps.size() >= (std::size_t{1} << 16))
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(state_a.dim()); ++r) {
    const complex_t a = state_a.amps[static_cast<std::size_t>(r)];
    complex_t* row = out + static_cast<std::size_t>(r) * dim_b;
    for (std::size_t u = 0; u < dim_b; ++u) row[u] = a * b[u];
  }
  return state;
}

}  // namespace

CostAndGradient value_and_gradient(const Circuit& circuit, std::span<const double> params,
                                   std::span<const double> diag_cost_table) {
  check_table(circuit, diag_cost_table);

  CostAndGradient result;
  const int cut = find_cut(circuit);
  if (cut == 0) {
    result.state = simulate(circuit, params,
                            circuit.has_diag_phase() ? diag_cost_table
                                                     : std::span<const double>{});
    result.value = expectation_diagonal(result.state, diag_cost_table);
    result.gradient.assign(static_cast<std::size_t>(circuit.n_params), 0.0);
    adjoint_accumulate(circuit, params, diag_cost_table, result.gradient, result.state);
    return result;
  }

  // Product circuit: simulate the factors, reassemble the full state for the
  // caller, and push the gradient through per-factor effective observables.
  const Circuit part_a = slice_circuit(circuit, 0, cut);
  const Circuit part_b = slice_circuit(circuit, cut, circuit.n_qubits);
  const StateVector state_a = simulate(part_a, params);
  const StateVector state_b = simulate(part_b, params);
  result.state = materialize_product(state_a, state_b);
  result.value = expectation_diagonal(result.state, diag_cost_table);
  result.gradient.assign(static_cast<std::size_t>(circuit.n_params), 0.0);
  gradient_accumulate(circuit, params, diag_cost_table, result.gradient);
  return result;
}

Trajectory adam_minimize(const Circuit& circuit, std::span<const double> diag_cost_table,
                         std::span<const double> init, const AdamConfig& config,
                         const IterationObserver& observer) {
  config.validate();
  if (init.size() != static_cast<std::size_t>(circuit.n_params)) {
    throw std::invalid_argument("adam_minimize: expected " +
                                std::to_string(circuit.n_params) + " initial parameters, got " +
                                std::to_string(init.size()));
  }

  std::vector<double> params(init.begin(), init.end());
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);

  Trajectory trajectory;
  trajectory.losses.reserve(static_cast<std::size_t>(config.max_iters));
  trajectory.grad_norms.reserve(static_cast<std::size_t>(config.max_iters));

  int plateau_run = 0;
  for (int t = 1; t <= config.max_iters; ++t) {
    const CostAndGradient eval = value_and_gradient(circuit, params, diag_cost_table);
    if (!std::isfinite(eval.value)) {
      throw std::runtime_error("adam_minimize: non-finite loss at iteration " +
                               std::to_string(t - 1));
    }
    double grad_norm_sq = 0.0;
    for (double g : eval.gradient) {
      if (!std::isfinite(g)) {
        throw std::runtime_error("adam_minimize: non-finite gradient at iteration " +
                                 std::to_string(t - 1));
      }
      grad_norm_sq += g * g;
    }
    if (observer) observer(t - 1, eval.value, eval.state);
    trajectory.losses.push_back(eval.value);
    trajectory.grad_norms.push_back(std::sqrt(grad_norm_sq));

    const double bias1 = 1.0 - std::pow(config.beta1, t);
    const double bias2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = eval.gradient[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
      params[i] -= config.learning_rate * (m[i] / bias1) /
                   (std::sqrt(v[i] / bias2) + config.epsilon);
    }

    if (config.plateau_stop && trajectory.losses.size() >= 2) {
      const double prev = trajectory.losses[trajectory.losses.size() - 2];
      const double cur = trajectory.losses.back();
      const double rel = std::abs(cur - prev) / std::max(1.0, std::abs(prev));
      plateau_run = rel < config.plateau_rel_tol ? plateau_run + 1 : 0;
      if (plateau_run >= config.plateau_window) break;
    }
  }
  trajectory.final_params = std::move(params);
  return trajectory;
}

std::vector<double> random_init(int n_params, std::uint64_t seed) {
  if (n_params < 0) throw std::invalid_argument("random_init: negative parameter count");
  std::mt19937_64 engine(seed);
  std::vector<double> params(static_cast<std::size_t>(n_params));
  constexpr double kTwoPow53 = 9007199254740992.0;
  constexpr double pi = std::numbers::pi;
  for (double& value : params) {
    // Top 53 bits -> [0, 1); distribution code is avoided so the stream is
    // identical across standard library implementations.
    const double u = static_cast<double>(engine() >> 11) / kTwoPow53;
    value = -pi + 2.0 * pi * u;
  }
  return params;
}

}  // namespace vqufl
