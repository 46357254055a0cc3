#pragma once

#include <span>
#include <string>
#include <vector>

#include "vqufl/qubo.hpp"
#include "vqufl/state_vector.hpp"
#include "vqufl/uflp.hpp"

namespace vqufl {

enum class GateKind { H, X, RX, RY, RZ, CNOT, XY, DiagPhase };

// Unbound gates have slot -1. A bound gate's angle is params[slot] * scale;
// several gates may share one slot (gradients accumulate over all of them).
struct ParamRef {
  int slot = -1;
  double scale = 1.0;
  bool bound() const { return slot >= 0; }
};

struct GateOp {
  GateKind kind = GateKind::H;
  int q0 = -1;  // single-qubit target, CNOT control, or first XY qubit
  int q1 = -1;  // CNOT target or second XY qubit
  ParamRef param;
};

enum class InitialState { UniformSuperposition, Basis };

struct Circuit {
  int n_qubits = 0;
  InitialState initial = InitialState::UniformSuperposition;
  std::string initial_bits;  // used when initial == Basis
  std::vector<GateOp> gates;
  int n_params = 0;

  bool has_diag_phase() const;
  void validate() const;
};

// Whether the feasibility-preserving builders apply one mixer per layer or a
// single mixer after the last layer.
enum class MixerSchedule { PerLayer, FinalOnly };

// Uniform superposition start; per layer a phase separation over the fully
// penalized cost, then e^{-i beta X} on every qubit. Slots 0..p-1 are the
// phase angles, p..2p-1 the mixer angles.
Circuit build_qaoa(const QubitLayout& layout, const QuboForm& full_qubo, int p);

// Trivial-feasible start; per layer a phase separation over the slack-penalty
// cost, XY mixers on the constrained pairs, and e^{-i beta X} on every
// unconstrained qubit, all mixer gates in a layer sharing one slot. Slot
// layout as in build_qaoa.
Circuit build_qaoa_plus(const QubitLayout& layout, const QuboForm& pfs_qubo,
                        const MixerSpec& mixer, int p);

// Uniform superposition start; per layer one independently parametrized RY
// per qubit followed by a linear CNOT chain. Layer k, qubit q -> slot k*N+q.
Circuit build_hea(int n_qubits, int p);

// Trivial-feasible start; per layer an HEA sublayer on the l unconstrained
// qubits (own RY slot each, then a CNOT chain over them in layout order) and
// XY mixers on the constrained pairs sharing one slot. No phase separation.
// Layer k uses slots k*(l+1) .. k*(l+1)+l, the last one being the mixer
// angle. FinalOnly keeps l slots per layer and appends one mixer slot p*l.
Circuit build_vqa_pfs(const QubitLayout& layout, const MixerSpec& mixer, int p,
                      MixerSchedule schedule = MixerSchedule::PerLayer);

// Prepares the initial state and applies the gates in order. A non-empty diag
// table must be given exactly when the circuit contains a phase-separation gate.
StateVector simulate(const Circuit& circuit, std::span<const double> params,
                     std::span<const double> diag = {});

struct ResourceReport {
  int depth = 0;
  int cnot_count = 0;
  int param_gate_count = 0;
  int param_count = 0;
};

// Counts over the decomposed gate list: a phase separation costs one RZ per
// nonzero linear term and CNOT-RZ-CNOT per nonzero quadratic term; an XY pair
// costs 4 CNOTs and 2 parameter gates; rotations are one parameter gate each.
// Depth is as-soon-as-possible layering of the decomposed list. qubo must be
// given exactly when the circuit contains a phase-separation gate.
ResourceReport resources(const Circuit& circuit, const QuboForm* qubo = nullptr);

// One line per qubit; debugging aid, not a stable format.
std::string circuit_diagram(const Circuit& circuit);

}  // namespace vqufl
