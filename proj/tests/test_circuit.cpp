#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vqufl/circuit.hpp"
#include "vqufl/optimizer.hpp"

using namespace vqufl;

namespace {

struct InstanceSetup {
  const UflpInstance* instance;
  QubitLayout layout;
  double lambda;
  QuboForm pfs;
  QuboForm full;
  MixerSpec mixer;
};

InstanceSetup setup(const char* key) {
  const UflpInstance& instance = registry_instance(key);
  InstanceSetup s{&instance, QubitLayout(instance), instance.lambda_or_default(),
                  qubo_pfs(instance, instance.lambda_or_default()),
                  qubo_full(instance, instance.lambda_or_default()),
                  mixer_pairs(instance.num_customers, instance.num_facilities)};
  return s;
}

double infeasible_mass(const StateVector& state, const QubitLayout& layout) {
  double mass = 0.0;
  for (std::size_t b = 0; b < state.dim(); ++b) {
    if (!hard_feasible(index_to_bits(b, state.n_qubits), layout)) {
      mass += std::norm(state.amps[b]);
    }
  }
  return mass;
}

bool equals_state(const StateVector& a, const StateVector& b, double tol = 1e-12) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (std::abs(a.amps[i] - b.amps[i]) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parameter count formulas hold on every registry layout") {
  for (const UflpInstance& instance : instance_registry()) {
    const QubitLayout layout(instance);
    const double lambda = instance.lambda_or_default();
    const MixerSpec mixer = mixer_pairs(layout.m, layout.n);
    const int n = layout.total_qubits();
    const int l = layout.num_unconstrained();
    for (int p : {1, 2, 3}) {
      CHECK(build_qaoa(layout, qubo_full(instance, lambda), p).n_params == 2 * p);
      CHECK(build_qaoa_plus(layout, qubo_pfs(instance, lambda), mixer, p).n_params == 2 * p);
      CHECK(build_hea(n, p).n_params == p * n);
      CHECK(build_vqa_pfs(layout, mixer, p).n_params == p * (l + 1));
    }
  }
  const InstanceSetup s = setup("instance-01");
  CHECK(build_vqa_pfs(s.layout, s.mixer, 2).n_params == 14);  // l = 6
  CHECK(build_hea(10, 2).n_params == 20);
}

TEST_CASE("builders reject p = 0") {
  const InstanceSetup s = setup("instance-01");
  CHECK_THROWS_AS(build_qaoa(s.layout, s.full, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_qaoa_plus(s.layout, s.pfs, s.mixer, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_hea(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_vqa_pfs(s.layout, s.mixer, 0), std::invalid_argument);
}

TEST_CASE("zero parameters reproduce the initial state") {
  const InstanceSetup s = setup("instance-01");
  const std::vector<double> table = diagonal_table(s.full, 10);
  const std::vector<double> pfs_table = diagonal_table(s.pfs, 10);

  SUBCASE("qaoa stays in the uniform superposition") {
    const Circuit circuit = build_qaoa(s.layout, s.full, 2);
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
    CHECK(equals_state(simulate(circuit, zeros, table),
                       StateVector::uniform_superposition(10)));
  }
  SUBCASE("qaoa-plus stays in the trivial feasible state") {
    const Circuit circuit = build_qaoa_plus(s.layout, s.pfs, s.mixer, 3);
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
    CHECK(equals_state(simulate(circuit, zeros, pfs_table),
                       StateVector::basis_state(10, "1010000000")));
  }
  SUBCASE("vqa-pfs stays in the trivial feasible state") {
    const Circuit circuit = build_vqa_pfs(s.layout, s.mixer, 2);
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
    CHECK(equals_state(simulate(circuit, zeros),
                       StateVector::basis_state(10, "1010000000")));
  }
  SUBCASE("hea at zero angles leaves the uniform superposition invariant") {
    const Circuit circuit = build_hea(10, 1);
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
    CHECK(equals_state(simulate(circuit, zeros), StateVector::uniform_superposition(10)));
  }
}

TEST_CASE("qaoa leaks probability outside the feasible set") {
  const InstanceSetup s = setup("instance-01");
  const Circuit circuit = build_qaoa(s.layout, s.full, 1);
  const std::vector<double> table = diagonal_table(s.full, 10);
  const std::vector<double> params = random_init(circuit.n_params, 1);
  const StateVector state = simulate(circuit, params, table);
  CHECK(infeasible_mass(state, s.layout) > 1e-3);
  CHECK(state.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("feasibility preservation across the registry") {
  // Mixer and HEA-on-unconstrained gates never move amplitude off the
  // one-hot subspace, for any parameters.
  for (const UflpInstance& instance : instance_registry()) {
    const QubitLayout layout(instance);
    if (layout.total_qubits() > 14) continue;
    const double lambda = instance.lambda_or_default();
    const QuboForm pfs = qubo_pfs(instance, lambda);
    const MixerSpec mixer = mixer_pairs(layout.m, layout.n);
    const std::vector<double> table = diagonal_table(pfs, layout.total_qubits());
    const Circuit plus = build_qaoa_plus(layout, pfs, mixer, 2);
    const Circuit pfs_circuit = build_vqa_pfs(layout, mixer, 2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const StateVector a =
          simulate(plus, random_init(plus.n_params, seed), table);
      CHECK(infeasible_mass(a, layout) < 1e-10);
      const StateVector b =
          simulate(pfs_circuit, random_init(pfs_circuit.n_params, seed ^ 0x9e37));
      CHECK(infeasible_mass(b, layout) < 1e-10);
    }
  }
}

TEST_CASE("qaoa-plus at p=3 keeps instance 1 feasible over 20 random vectors") {
  const InstanceSetup s = setup("instance-01");
  const Circuit circuit = build_qaoa_plus(s.layout, s.pfs, s.mixer, 3);
  const std::vector<double> table = diagonal_table(s.pfs, 10);
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const StateVector state = simulate(circuit, random_init(circuit.n_params, seed), table);
    CHECK(infeasible_mass(state, s.layout) < 1e-10);
  }
}

TEST_CASE("simulate contract") {
  const InstanceSetup s = setup("instance-01");
  SUBCASE("empty gate list returns the initial state") {
    Circuit circuit;
    circuit.n_qubits = 3;
    circuit.initial = InitialState::Basis;
    circuit.initial_bits = "010";
    CHECK(equals_state(simulate(circuit, {}), StateVector::basis_state(3, "010")));
  }
  SUBCASE("missing diagonal table is rejected") {
    const Circuit circuit = build_qaoa(s.layout, s.full, 1);
    const std::vector<double> params(2, 0.1);
    CHECK_THROWS_AS(simulate(circuit, params), std::invalid_argument);
  }
  SUBCASE("unexpected diagonal table is rejected") {
    const Circuit circuit = build_hea(10, 1);
    const std::vector<double> params(10, 0.1);
    const std::vector<double> table(1024, 0.0);
    CHECK_THROWS_AS(simulate(circuit, params, table), std::invalid_argument);
  }
  SUBCASE("wrong parameter count is rejected") {
    const Circuit circuit = build_hea(10, 1);
    CHECK_THROWS_AS(simulate(circuit, std::vector<double>(3, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("every builder is unitary under random parameters") {
  const InstanceSetup s = setup("instance-06");
  const std::vector<double> full_table = diagonal_table(s.full, 14);
  const std::vector<double> pfs_table = diagonal_table(s.pfs, 14);
  const Circuit circuits[] = {build_qaoa(s.layout, s.full, 2),
                              build_qaoa_plus(s.layout, s.pfs, s.mixer, 2),
                              build_hea(14, 2), build_vqa_pfs(s.layout, s.mixer, 2)};
  const std::vector<double>* tables[] = {&full_table, &pfs_table, nullptr, nullptr};
  for (int c = 0; c < 4; ++c) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const std::vector<double> params = random_init(circuits[c].n_params, 7 * seed + 1);
      const StateVector state =
          simulate(circuits[c], params,
                   tables[c] ? std::span<const double>(*tables[c]) : std::span<const double>{});
      CHECK(std::abs(state.norm_sq() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("vqa-pfs output factorizes across the constrained cut") {
  const InstanceSetup s = setup("instance-01");
  const Circuit circuit = build_vqa_pfs(s.layout, s.mixer, 2);
  std::mt19937 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const StateVector state =
        simulate(circuit, random_init(circuit.n_params, 31 * trial));
    // Rank-1 condition on 2x2 minors of the (constrained x unconstrained)
    // amplitude matrix.
    const std::size_t cols = std::size_t{1} << s.layout.num_unconstrained();
    const std::size_t rows = std::size_t{1} << s.layout.num_constrained();
    for (int check = 0; check < 200; ++check) {
      const std::size_t r1 = rng() % rows, r2 = rng() % rows;
      const std::size_t c1 = rng() % cols, c2 = rng() % cols;
      const complex_t det = state.amps[r1 * cols + c1] * state.amps[r2 * cols + c2] -
                            state.amps[r1 * cols + c2] * state.amps[r2 * cols + c1];
      CHECK(std::abs(det) < 1e-12);
    }
  }
}

TEST_CASE("single-facility layouts have no mixer slots") {
  const QubitLayout layout(2, 1);  // feasible space is one state per block
  const MixerSpec mixer = mixer_pairs(2, 1);
  CHECK(mixer.pairs.empty());
  const Circuit circuit = build_vqa_pfs(layout, mixer, 2);
  CHECK(circuit.n_params == 2 * layout.num_unconstrained());
  const StateVector state = simulate(circuit, random_init(circuit.n_params, 1));
  CHECK(infeasible_mass(state, layout) < 1e-10);
}

TEST_CASE("final-only mixer schedule") {
  const InstanceSetup s = setup("instance-01");
  const Circuit circuit = build_vqa_pfs(s.layout, s.mixer, 2, MixerSchedule::FinalOnly);
  CHECK(circuit.n_params == 2 * 6 + 1);
  const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
  CHECK(equals_state(simulate(circuit, zeros), StateVector::basis_state(10, "1010000000")));
  const StateVector state = simulate(circuit, random_init(circuit.n_params, 3));
  CHECK(infeasible_mass(state, s.layout) < 1e-10);
}

TEST_CASE("resource counting") {
  SUBCASE("one rotation") {
    Circuit circuit;
    circuit.n_qubits = 2;
    circuit.n_params = 1;
    GateOp gate;
    gate.kind = GateKind::RX;
    gate.q0 = 0;
    gate.param = {0, 1.0};
    circuit.gates.push_back(gate);
    const ResourceReport report = resources(circuit);
    CHECK(report.depth == 1);
    CHECK(report.cnot_count == 0);
    CHECK(report.param_gate_count == 1);
    CHECK(report.param_count == 1);
  }
  SUBCASE("one mixer pair") {
    Circuit circuit;
    circuit.n_qubits = 2;
    circuit.n_params = 1;
    GateOp gate;
    gate.kind = GateKind::XY;
    gate.q0 = 0;
    gate.q1 = 1;
    gate.param = {0, 1.0};
    circuit.gates.push_back(gate);
    const ResourceReport report = resources(circuit);
    CHECK(report.cnot_count == 4);
    CHECK(report.param_gate_count == 2);
  }
  SUBCASE("missing qubo is rejected") {
    const InstanceSetup s = setup("instance-01");
    const Circuit circuit = build_qaoa(s.layout, s.full, 1);
    CHECK_THROWS_AS(resources(circuit), std::invalid_argument);
  }
  SUBCASE("orderings at p = 2 on instance 1") {
    const InstanceSetup s = setup("instance-01");
    const ResourceReport qaoa = resources(build_qaoa(s.layout, s.full, 2), &s.full);
    const ResourceReport plus =
        resources(build_qaoa_plus(s.layout, s.pfs, s.mixer, 2), &s.pfs);
    const ResourceReport hea = resources(build_hea(10, 2));
    const ResourceReport pfs = resources(build_vqa_pfs(s.layout, s.mixer, 2));
    CHECK(pfs.depth < plus.depth);
    CHECK(pfs.cnot_count < plus.cnot_count);
    CHECK(pfs.cnot_count < qaoa.cnot_count);
    CHECK(qaoa.param_count == 4);
    CHECK(plus.param_count == 4);
    CHECK(pfs.param_count == 14);
    CHECK(hea.param_count == 20);
  }
  SUBCASE("all fields are nondecreasing in p") {
    const InstanceSetup s = setup("instance-06");
    ResourceReport previous{};
    for (int p = 1; p <= 4; ++p) {
      const ResourceReport report =
          resources(build_vqa_pfs(s.layout, s.mixer, p));
      CHECK(report.depth >= previous.depth);
      CHECK(report.cnot_count >= previous.cnot_count);
      CHECK(report.param_gate_count >= previous.param_gate_count);
      CHECK(report.param_count >= previous.param_count);
      previous = report;
    }
  }
}

TEST_CASE("shared mixer slot drives every mixer gate in a qaoa-plus layer") {
  const InstanceSetup s = setup("instance-01");
  const Circuit circuit = build_qaoa_plus(s.layout, s.pfs, s.mixer, 2);
  int xy_on_beta0 = 0;
  int rx_on_beta0 = 0;
  for (const GateOp& gate : circuit.gates) {
    if (gate.param.bound() && gate.param.slot == 2) {  // beta_0 lives at slot p + 0
      if (gate.kind == GateKind::XY) ++xy_on_beta0;
      if (gate.kind == GateKind::RX) ++rx_on_beta0;
    }
  }
  CHECK(xy_on_beta0 == 2);
  CHECK(rx_on_beta0 == 6);
}

TEST_CASE("circuit diagram renders one line per qubit") {
  const InstanceSetup s = setup("instance-01");
  const std::string text = circuit_diagram(build_vqa_pfs(s.layout, s.mixer, 1));
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
  CHECK(text.find("RY(s0)") != std::string::npos);
  CHECK(text.find("XY(s6)") != std::string::npos);
}
