#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vqufl/circuit.hpp"
#include "vqufl/state_vector.hpp"

namespace vqufl {

struct AdamConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iters = 300;
  std::uint64_t seed = 0;

  // Optional plateau stop, off by default: stop once the relative loss change
  // stays below plateau_rel_tol for plateau_window consecutive iterations.
  bool plateau_stop = false;
  double plateau_rel_tol = 1e-8;
  int plateau_window = 20;

  void validate() const;
};

struct Trajectory {
  std::vector<double> losses;      // loss before each update
  std::vector<double> grad_norms;  // Euclidean norm before each update
  std::vector<double> final_params;
};

// Applies one gate with an explicit angle; negate the angle to undo a
// parametric gate (H, X and CNOT are their own inverses).
void apply_gate(StateVector& state, const GateOp& gate, double angle,
                std::span<const double> diag = {});

// <psi(params)| diag |psi(params)>. The same table drives any phase
// separation gates inside the circuit.
double cost(const Circuit& circuit, std::span<const double> params,
            std::span<const double> diag_cost_table);

// Exact dF/dparams via a reverse sweep: forward state, co-state diag*psi,
// then per gate (last to first) a generator inner product before undoing the
// gate on both vectors. Shared slots accumulate over every gate bound to them.
std::vector<double> gradient(const Circuit& circuit, std::span<const double> params,
                             std::span<const double> diag_cost_table);

struct CostAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
  StateVector state;  // forward state at the evaluated parameters
};

CostAndGradient value_and_gradient(const Circuit& circuit, std::span<const double> params,
                                   std::span<const double> diag_cost_table);

using IterationObserver =
    std::function<void(int iteration, double loss, const StateVector& state)>;

// Standard Adam with bias-corrected moments; runs exactly max_iters updates
// unless the plateau stop is enabled. Aborts on non-finite loss or gradient.
Trajectory adam_minimize(const Circuit& circuit, std::span<const double> diag_cost_table,
                         std::span<const double> init, const AdamConfig& config,
                         const IterationObserver& observer = {});

// I.i.d. uniform on [-pi, pi), identical for a given seed on every platform.
std::vector<double> random_init(int n_params, std::uint64_t seed);

}  // namespace vqufl
