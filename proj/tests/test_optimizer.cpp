#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vqufl/optimizer.hpp"

using namespace vqufl;

namespace {

// One-qubit circuit whose loss is exactly cos(2 beta).
Circuit cos_two_beta_circuit() {
  Circuit circuit;
  circuit.n_qubits = 1;
  circuit.initial = InitialState::Basis;
  circuit.initial_bits = "0";
  circuit.n_params = 1;
  GateOp gate;
  gate.kind = GateKind::RX;
  gate.q0 = 0;
  gate.param = {0, 2.0};
  circuit.gates.push_back(gate);
  return circuit;
}

const std::vector<double> kPauliZTable = {1.0, -1.0};

std::vector<double> finite_difference(const Circuit& circuit, std::vector<double> params,
                                      std::span<const double> table, double step = 1e-5) {
  std::vector<double> grad(params.size(), 0.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + step;
    const double up = cost(circuit, params, table);
    params[k] = saved - step;
    const double down = cost(circuit, params, table);
    params[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

void check_gradient_matches(const Circuit& circuit, std::span<const double> table,
                            std::uint64_t seed) {
  const std::vector<double> params = random_init(circuit.n_params, seed);
  const std::vector<double> analytic = gradient(circuit, params, table);
  const std::vector<double> numeric = finite_difference(circuit, params, table);
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double scale = std::max({1.0, std::abs(analytic[k]), std::abs(numeric[k])});
    CHECK(std::abs(analytic[k] - numeric[k]) <= 1e-5 * scale);
  }
}

}  // namespace

TEST_CASE("cost") {
  SUBCASE("zero-parameter vqa-pfs scores the trivial feasible state") {
    const UflpInstance& one = registry_instance("instance-01");
    const QubitLayout layout(one);
    const Circuit circuit = build_vqa_pfs(layout, mixer_pairs(2, 2), 1);
    const std::vector<double> table = diagonal_table(qubo_pfs(one, 10.0), 10);
    const std::vector<double> zeros(static_cast<std::size_t>(circuit.n_params), 0.0);
    CHECK(cost(circuit, zeros, table) == doctest::Approx(29.0));
  }
  SUBCASE("never below the table minimum") {
    const UflpInstance& one = registry_instance("instance-01");
    const QubitLayout layout(one);
    const Circuit circuit = build_vqa_pfs(layout, mixer_pairs(2, 2), 2);
    const std::vector<double> table = diagonal_table(qubo_pfs(one, 10.0), 10);
    const double minimum = *std::min_element(table.begin(), table.end());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CHECK(cost(circuit, random_init(circuit.n_params, seed), table) >= minimum - 1e-9);
    }
  }
  SUBCASE("gateless basis circuit reads the table entry") {
    Circuit circuit;
    circuit.n_qubits = 2;
    circuit.initial = InitialState::Basis;
    circuit.initial_bits = "10";
    const std::vector<double> table = {5.0, 6.0, 7.0, 8.0};
    CHECK(cost(circuit, {}, table) == doctest::Approx(7.0));
  }
  SUBCASE("wrong table length is rejected") {
    const Circuit circuit = cos_two_beta_circuit();
    const std::vector<double> table = {1.0, -1.0, 0.0};
    CHECK_THROWS_AS(cost(circuit, std::vector<double>{0.1}, table), std::invalid_argument);
  }
}

TEST_CASE("gradient of cos(2 beta)") {
  const Circuit circuit = cos_two_beta_circuit();
  SUBCASE("matches -2 sin(2 beta) at beta = pi/8") {
    const std::vector<double> params = {std::numbers::pi / 8.0};
    CHECK(cost(circuit, params, kPauliZTable) ==
          doctest::Approx(std::cos(std::numbers::pi / 4.0)));
    const std::vector<double> grad = gradient(circuit, params, kPauliZTable);
    CHECK(grad[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("stationary at beta = 0") {
    const std::vector<double> grad =
        gradient(circuit, std::vector<double>{0.0}, kPauliZTable);
    CHECK(grad[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("analytic gradients match central finite differences for every builder") {
  const UflpInstance& one = registry_instance("instance-01");
  const QubitLayout layout(one);
  const double lambda = one.lambda_or_default();
  const QuboForm pfs = qubo_pfs(one, lambda);
  const QuboForm full = qubo_full(one, lambda);
  const MixerSpec mixer = mixer_pairs(2, 2);
  const std::vector<double> full_table = diagonal_table(full, 10);
  const std::vector<double> pfs_table = diagonal_table(pfs, 10);

  SUBCASE("qaoa") {
    const Circuit circuit = build_qaoa(layout, full, 2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      check_gradient_matches(circuit, full_table, seed);
    }
  }
  SUBCASE("qaoa-plus") {
    const Circuit circuit = build_qaoa_plus(layout, pfs, mixer, 2);
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
      check_gradient_matches(circuit, pfs_table, seed);
    }
  }
  SUBCASE("hea") {
    const Circuit circuit = build_hea(10, 2);
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
      check_gradient_matches(circuit, full_table, seed);
    }
  }
  SUBCASE("vqa-pfs") {
    const Circuit circuit = build_vqa_pfs(layout, mixer, 2);
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
      check_gradient_matches(circuit, pfs_table, seed);
    }
  }
}

TEST_CASE("factored and monolithic evaluation agree") {
  // A vqa-pfs circuit splits at the constrained/unconstrained cut and takes
  // the product-state route. Appending CNOT(q, q') twice across the cut is
  // the identity but forces the single-statevector sweep, so the two paths
  // must agree on the same function.
  const UflpInstance& one = registry_instance("instance-01");
  const QubitLayout layout(one);
  const Circuit fast = build_vqa_pfs(layout, mixer_pairs(2, 2), 2);
  Circuit slow = fast;
  for (int rep = 0; rep < 2; ++rep) {
    GateOp barrier;
    barrier.kind = GateKind::CNOT;
    barrier.q0 = 0;
    barrier.q1 = layout.num_constrained();
    slow.gates.push_back(barrier);
  }
  const std::vector<double> table = diagonal_table(qubo_pfs(one, 34.0), 10);
  for (std::uint64_t seed = 50; seed < 55; ++seed) {
    const std::vector<double> params = random_init(fast.n_params, seed);
    const CostAndGradient a = value_and_gradient(fast, params, table);
    const CostAndGradient b = value_and_gradient(slow, params, table);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    for (std::size_t k = 0; k < a.gradient.size(); ++k) {
      CHECK(a.gradient[k] == doctest::Approx(b.gradient[k]).epsilon(1e-10));
    }
    for (std::size_t i = 0; i < a.state.dim(); ++i) {
      CHECK(std::abs(a.state.amps[i] - b.state.amps[i]) < 1e-12);
    }
  }
}

TEST_CASE("value_and_gradient returns the forward state") {
  const UflpInstance& six = registry_instance("instance-06");
  const QubitLayout layout(six);
  const Circuit circuit = build_vqa_pfs(layout, mixer_pairs(3, 2), 2);
  const std::vector<double> table = diagonal_table(qubo_pfs(six, 20.0), 14);
  const std::vector<double> params = random_init(circuit.n_params, 5);
  const CostAndGradient result = value_and_gradient(circuit, params, table);
  const StateVector expected = simulate(circuit, params);
  for (std::size_t i = 0; i < expected.dim(); ++i) {
    CHECK(std::abs(result.state.amps[i] - expected.amps[i]) < 1e-12);
  }
  CHECK(result.value == doctest::Approx(expectation_diagonal(expected, table)));
}

TEST_CASE("adam leaves parameters untouched on a constant landscape") {
  Circuit circuit = cos_two_beta_circuit();
  const std::vector<double> flat_table = {3.0, 3.0};
  AdamConfig config;
  config.max_iters = 25;
  const std::vector<double> init = {0.4};
  const Trajectory trajectory = adam_minimize(circuit, flat_table, init, config);
  CHECK(trajectory.final_params[0] == doctest::Approx(0.4));
  for (double loss : trajectory.losses) CHECK(loss == doctest::Approx(3.0));
  for (double g : trajectory.grad_norms) CHECK(g == doctest::Approx(0.0));
}

TEST_CASE("adam on cos(2 beta) tracks an independent scalar run") {
  const Circuit circuit = cos_two_beta_circuit();
  AdamConfig config;
  config.learning_rate = 0.1;
  config.max_iters = 200;
  const std::vector<double> init = {0.3};
  const Trajectory trajectory = adam_minimize(circuit, kPauliZTable, init, config);

  // Scalar re-implementation driven by the closed-form derivative.
  double beta = 0.3, m = 0.0, v = 0.0;
  std::vector<double> reference;
  for (int t = 1; t <= 200; ++t) {
    reference.push_back(std::cos(2.0 * beta));
    const double g = -2.0 * std::sin(2.0 * beta);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double m_hat = m / (1.0 - std::pow(0.9, t));
    const double v_hat = v / (1.0 - std::pow(0.999, t));
    beta -= 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);
  }

  REQUIRE(trajectory.losses.size() == 200);
  for (std::size_t t = 0; t < 200; ++t) {
    CHECK(trajectory.losses[t] == doctest::Approx(reference[t]).epsilon(1e-9));
  }
  CHECK(std::cos(2.0 * trajectory.final_params[0]) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(trajectory.losses.back() == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("adam is deterministic for a fixed configuration") {
  const UflpInstance& one = registry_instance("instance-01");
  const QubitLayout layout(one);
  const Circuit circuit = build_vqa_pfs(layout, mixer_pairs(2, 2), 1);
  const std::vector<double> table = diagonal_table(qubo_pfs(one, 34.0), 10);
  AdamConfig config;
  config.max_iters = 30;
  const std::vector<double> init = random_init(circuit.n_params, 11);
  const Trajectory a = adam_minimize(circuit, table, init, config);
  const Trajectory b = adam_minimize(circuit, table, init, config);
  REQUIRE(a.losses.size() == b.losses.size());
  for (std::size_t t = 0; t < a.losses.size(); ++t) CHECK(a.losses[t] == b.losses[t]);
  CHECK(a.final_params == b.final_params);
}

TEST_CASE("losses stay above the table minimum") {
  const UflpInstance& one = registry_instance("instance-01");
  const QubitLayout layout(one);
  const Circuit circuit = build_qaoa_plus(layout, qubo_pfs(one, 34.0),
                                          mixer_pairs(2, 2), 2);
  const std::vector<double> table = diagonal_table(qubo_pfs(one, 34.0), 10);
  const double minimum = *std::min_element(table.begin(), table.end());
  AdamConfig config;
  config.max_iters = 40;
  const Trajectory trajectory =
      adam_minimize(circuit, table, random_init(circuit.n_params, 2), config);
  CHECK(trajectory.losses.size() == 40);
  for (double loss : trajectory.losses) {
    CHECK(std::isfinite(loss));
    CHECK(loss >= minimum - 1e-9);
  }
}

TEST_CASE("plateau stop ends a converged run early") {
  const Circuit circuit = cos_two_beta_circuit();
  AdamConfig config;
  config.learning_rate = 0.1;
  config.max_iters = 2000;
  config.plateau_stop = true;
  const Trajectory trajectory =
      adam_minimize(circuit, kPauliZTable, std::vector<double>{0.3}, config);
  CHECK(trajectory.losses.size() < 2000);
  CHECK(trajectory.losses.back() == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("observer sees every iteration in order") {
  const Circuit circuit = cos_two_beta_circuit();
  AdamConfig config;
  config.max_iters = 17;
  int expected_iteration = 0;
  const Trajectory trajectory = adam_minimize(
      circuit, kPauliZTable, std::vector<double>{0.5}, config,
      [&](int iteration, double loss, const StateVector& state) {
        CHECK(iteration == expected_iteration++);
        CHECK(std::isfinite(loss));
        CHECK(state.n_qubits == 1);
      });
  CHECK(expected_iteration == 17);
  CHECK(trajectory.losses.size() == 17);
}

TEST_CASE("non-finite landscape aborts with a diagnostic") {
  const Circuit circuit = cos_two_beta_circuit();
  const std::vector<double> poisoned = {std::nan(""), 1.0};
  AdamConfig config;
  config.max_iters = 3;
  CHECK_THROWS_AS(adam_minimize(circuit, poisoned, std::vector<double>{0.1}, config),
                  std::runtime_error);
}

TEST_CASE("random_init") {
  const std::vector<double> a = random_init(20, 77);
  const std::vector<double> b = random_init(20, 77);
  const std::vector<double> c = random_init(20, 78);
  CHECK(a == b);
  CHECK(a != c);
  for (double value : a) {
    CHECK(value >= -std::numbers::pi);
    CHECK(value < std::numbers::pi);
  }
}
