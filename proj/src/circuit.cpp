#include "vqufl/circuit.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace vqufl {

namespace {

void check_layers(int p) {
  if (p < 1) throw std::invalid_argument("layer count p must be >= 1");
}

GateOp single(GateKind kind, int qubit, int slot = -1, double scale = 1.0) {
  GateOp gate;
  gate.kind = kind;
  gate.q0 = qubit;
  gate.param = {slot, scale};
  return gate;
}

GateOp two(GateKind kind, int q0, int q1, int slot = -1, double scale = 1.0) {
  GateOp gate;
  gate.kind = kind;
  gate.q0 = q0;
  gate.q1 = q1;
  gate.param = {slot, scale};
  return gate;
}

// Flattened gate after decomposition; q1 < 0 for one-qubit entries.
struct PseudoGate {
  int q0 = -1;
  int q1 = -1;
  bool is_cnot = false;
  bool is_param = false;
};

std::vector<PseudoGate> decompose(const Circuit& circuit, const QuboForm* qubo) {
  std::vector<PseudoGate> flat;
  flat.reserve(circuit.gates.size() * 2);
  for (const GateOp& gate : circuit.gates) {
    switch (gate.kind) {
      case GateKind::H:
      case GateKind::X:
        flat.push_back({gate.q0, -1, false, false});
        break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        flat.push_back({gate.q0, -1, false, true});
        break;
      case GateKind::CNOT:
        flat.push_back({gate.q0, gate.q1, true, false});
        break;
      case GateKind::XY:
        // Two commuting two-qubit rotations, each CNOT-RZ-CNOT.
        for (int rep = 0; rep < 2; ++rep) {
          flat.push_back({gate.q0, gate.q1, true, false});
          flat.push_back({gate.q1, -1, false, true});
          flat.push_back({gate.q0, gate.q1, true, false});
        }
        break;
      case GateKind::DiagPhase:
        for (const auto& [q, c] : qubo->linear) {
          (void)c;
          flat.push_back({q, -1, false, true});
        }
        for (const auto& [key, c] : qubo->quadratic) {
          (void)c;
          flat.push_back({key.first, key.second, true, false});
          flat.push_back({key.second, -1, false, true});
          flat.push_back({key.first, key.second, true, false});
        }
        break;
    }
  }
  return flat;
}

}  // namespace

bool Circuit::has_diag_phase() const {
  return std::any_of(gates.begin(), gates.end(),
                     [](const GateOp& g) { return g.kind == GateKind::DiagPhase; });
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("Circuit: n_qubits out of range");
  }
  if (initial == InitialState::Basis &&
      initial_bits.size() != static_cast<std::size_t>(n_qubits)) {
    throw std::invalid_argument("Circuit: initial bitstring length mismatch");
  }
  std::vector<bool> used(static_cast<std::size_t>(std::max(n_params, 0)), false);
  for (const GateOp& gate : gates) {
    const bool two_qubit = gate.kind == GateKind::CNOT || gate.kind == GateKind::XY;
    if (gate.kind != GateKind::DiagPhase) {
      if (gate.q0 < 0 || gate.q0 >= n_qubits) {
        throw std::invalid_argument("Circuit: gate operand out of range");
      }
      if (two_qubit && (gate.q1 < 0 || gate.q1 >= n_qubits || gate.q1 == gate.q0)) {
        throw std::invalid_argument("Circuit: invalid second operand");
      }
    }
    if (gate.param.bound()) {
      if (gate.param.slot >= n_params) {
        throw std::invalid_argument("Circuit: parameter slot beyond n_params");
      }
      used[static_cast<std::size_t>(gate.param.slot)] = true;
    }
  }
  for (int s = 0; s < n_params; ++s) {
    if (!used[static_cast<std::size_t>(s)]) {
      throw std::invalid_argument("Circuit: slot " + std::to_string(s) +
                                  " not referenced by any gate");
    }
  }
}

Circuit build_qaoa(const QubitLayout& layout, const QuboForm& full_qubo, int p) {
  check_layers(p);
  const int n_qubits = layout.total_qubits();
  if (full_qubo.max_qubit() >= n_qubits) {
    throw std::invalid_argument("build_qaoa: QUBO references qubits beyond the layout");
  }
  Circuit circuit;
  circuit.n_qubits = n_qubits;
  circuit.initial = InitialState::UniformSuperposition;
  circuit.n_params = 2 * p;
  for (int k = 0; k < p; ++k) {
    circuit.gates.push_back(single(GateKind::DiagPhase, -1, k));
    for (int q = 0; q < n_qubits; ++q) {
      circuit.gates.push_back(single(GateKind::RX, q, p + k, 2.0));
    }
  }
  circuit.validate();
  return circuit;
}

Circuit build_qaoa_plus(const QubitLayout& layout, const QuboForm& pfs_qubo,
                        const MixerSpec& mixer, int p) {
  check_layers(p);
  const int n_qubits = layout.total_qubits();
  if (pfs_qubo.max_qubit() >= n_qubits) {
    throw std::invalid_argument("build_qaoa_plus: QUBO references qubits beyond the layout");
  }
  Circuit circuit;
  circuit.n_qubits = n_qubits;
  circuit.initial = InitialState::Basis;
  circuit.initial_bits = trivial_feasible_bits(layout);
  circuit.n_params = 2 * p;
  for (int k = 0; k < p; ++k) {
    const int beta = p + k;
    circuit.gates.push_back(single(GateKind::DiagPhase, -1, k));
    for (const auto& [a, b] : mixer.pairs) {
      circuit.gates.push_back(two(GateKind::XY, a, b, beta));
    }
    for (int q : layout.unconstrained_qubits()) {
      circuit.gates.push_back(single(GateKind::RX, q, beta, 2.0));
    }
  }
  circuit.validate();
  return circuit;
}

Circuit build_hea(int n_qubits, int p) {
  check_layers(p);
  Circuit circuit;
  circuit.n_qubits = n_qubits;
  circuit.initial = InitialState::UniformSuperposition;
  circuit.n_params = p * n_qubits;
  for (int k = 0; k < p; ++k) {
    for (int q = 0; q < n_qubits; ++q) {
      circuit.gates.push_back(single(GateKind::RY, q, k * n_qubits + q));
    }
    for (int q = 0; q + 1 < n_qubits; ++q) {
      circuit.gates.push_back(two(GateKind::CNOT, q, q + 1));
    }
  }
  circuit.validate();
  return circuit;
}

Circuit build_vqa_pfs(const QubitLayout& layout, const MixerSpec& mixer, int p,
                      MixerSchedule schedule) {
  check_layers(p);
  Circuit circuit;
  circuit.n_qubits = layout.total_qubits();
  circuit.initial = InitialState::Basis;
  circuit.initial_bits = trivial_feasible_bits(layout);
  const std::vector<int> free_qubits = layout.unconstrained_qubits();
  const int l = static_cast<int>(free_qubits.size());
  // Single-facility blocks have nothing to mix; their mixer slots vanish.
  const bool mixing = !mixer.pairs.empty();
  const int slots_per_layer =
      schedule == MixerSchedule::PerLayer && mixing ? l + 1 : l;
  circuit.n_params =
      p * slots_per_layer + (schedule == MixerSchedule::FinalOnly && mixing ? 1 : 0);
  for (int k = 0; k < p; ++k) {
    for (int t = 0; t < l; ++t) {
      circuit.gates.push_back(
          single(GateKind::RY, free_qubits[static_cast<std::size_t>(t)],
                 k * slots_per_layer + t));
    }
    for (int t = 0; t + 1 < l; ++t) {
      circuit.gates.push_back(two(GateKind::CNOT, free_qubits[static_cast<std::size_t>(t)],
                                  free_qubits[static_cast<std::size_t>(t + 1)]));
    }
    if (schedule == MixerSchedule::PerLayer) {
      for (const auto& [a, b] : mixer.pairs) {
        circuit.gates.push_back(two(GateKind::XY, a, b, k * slots_per_layer + l));
      }
    }
  }
  if (schedule == MixerSchedule::FinalOnly) {
    for (const auto& [a, b] : mixer.pairs) {
      circuit.gates.push_back(two(GateKind::XY, a, b, p * l));
    }
  }
  circuit.validate();
  return circuit;
}

StateVector simulate(const Circuit& circuit, std::span<const double> params,
                     std::span<const double> diag) {
  if (params.size() != static_cast<std::size_t>(circuit.n_params)) {
    throw std::invalid_argument("simulate: expected " + std::to_string(circuit.n_params) +
                                " parameters, got " + std::to_string(params.size()));
  }
  const bool needs_diag = circuit.has_diag_phase();
  if (needs_diag && diag.empty()) {
    throw std::invalid_argument("simulate: circuit contains phase separation gates "
                                "but no diagonal table was given");
  }
  if (!needs_diag && !diag.empty()) {
    throw std::invalid_argument("simulate: diagonal table given but the circuit "
                                "contains no phase separation gate");
  }

  StateVector state = circuit.initial == InitialState::UniformSuperposition
                          ? StateVector::uniform_superposition(circuit.n_qubits)
                          : StateVector::basis_state(circuit.n_qubits, circuit.initial_bits);
  for (const GateOp& gate : circuit.gates) {
    const double angle =
        gate.param.bound() ? params[static_cast<std::size_t>(gate.param.slot)] * gate.param.scale
                           : 0.0;
    switch (gate.kind) {
      case GateKind::H:
        apply_single(state, gate.q0, SingleGate::H);
        break;
      case GateKind::X:
        apply_single(state, gate.q0, SingleGate::X);
        break;
      case GateKind::RX:
        apply_single(state, gate.q0, SingleGate::RX, angle);
        break;
      case GateKind::RY:
        apply_single(state, gate.q0, SingleGate::RY, angle);
        break;
      case GateKind::RZ:
        apply_single(state, gate.q0, SingleGate::RZ, angle);
        break;
      case GateKind::CNOT:
        apply_cnot(state, gate.q0, gate.q1);
        break;
      case GateKind::XY:
        apply_xy(state, gate.q0, gate.q1, angle);
        break;
      case GateKind::DiagPhase:
        apply_diagonal_phase(state, diag, angle);
        break;
    }
  }
  return state;
}

ResourceReport resources(const Circuit& circuit, const QuboForm* qubo) {
  if (circuit.has_diag_phase() && qubo == nullptr) {
    throw std::invalid_argument("resources: circuit contains phase separation gates "
                                "but no QUBO was given");
  }
  const std::vector<PseudoGate> flat = decompose(circuit, qubo);
  ResourceReport report;
  report.param_count = circuit.n_params;
  std::vector<int> busy_until(static_cast<std::size_t>(circuit.n_qubits), 0);
  for (const PseudoGate& gate : flat) {
    if (gate.is_cnot) ++report.cnot_count;
    if (gate.is_param) ++report.param_gate_count;
    int layer = busy_until[static_cast<std::size_t>(gate.q0)] + 1;
    if (gate.q1 >= 0) layer = std::max(layer, busy_until[static_cast<std::size_t>(gate.q1)] + 1);
    busy_until[static_cast<std::size_t>(gate.q0)] = layer;
    if (gate.q1 >= 0) busy_until[static_cast<std::size_t>(gate.q1)] = layer;
    report.depth = std::max(report.depth, layer);
  }
  return report;
}

std::string circuit_diagram(const Circuit& circuit) {
  const std::size_t n = static_cast<std::size_t>(circuit.n_qubits);
  std::vector<std::string> lines(n);
  for (std::size_t q = 0; q < n; ++q) {
    std::ostringstream head;
    head << 'q' << q << (circuit.initial == InitialState::Basis
                             ? std::string(": |") + circuit.initial_bits[q] + ">"
                             : std::string(": |+>"));
    lines[q] = head.str();
  }
  auto pad_to_width = [&lines]() {
    std::size_t width = 0;
    for (const std::string& line : lines) width = std::max(width, line.size());
    for (std::string& line : lines) line.append(width - line.size(), '-');
  };
  auto label = [](const GateOp& gate, const char* name) {
    std::ostringstream text;
    text << '-' << name;
    if (gate.param.bound()) {
      text << "(s" << gate.param.slot;
      if (gate.param.scale != 1.0) text << "x" << gate.param.scale;
      text << ')';
    }
    return text.str();
  };
  for (const GateOp& gate : circuit.gates) {
    pad_to_width();
    switch (gate.kind) {
      case GateKind::H:
        lines[static_cast<std::size_t>(gate.q0)] += "-H";
        break;
      case GateKind::X:
        lines[static_cast<std::size_t>(gate.q0)] += "-X";
        break;
      case GateKind::RX:
        lines[static_cast<std::size_t>(gate.q0)] += label(gate, "RX");
        break;
      case GateKind::RY:
        lines[static_cast<std::size_t>(gate.q0)] += label(gate, "RY");
        break;
      case GateKind::RZ:
        lines[static_cast<std::size_t>(gate.q0)] += label(gate, "RZ");
        break;
      case GateKind::CNOT:
        lines[static_cast<std::size_t>(gate.q0)] += "-o";
        lines[static_cast<std::size_t>(gate.q1)] += "-+";
        break;
      case GateKind::XY:
        lines[static_cast<std::size_t>(gate.q0)] += label(gate, "XY");
        lines[static_cast<std::size_t>(gate.q1)] += label(gate, "XY");
        break;
      case GateKind::DiagPhase:
        for (std::string& line : lines) line += label(gate, "Ph");
        break;
    }
  }
  pad_to_width();
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace vqufl
