#include "vqufl/qubo.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "vqufl/state_vector.hpp"

namespace vqufl {

namespace {

constexpr double kDropTolerance = 0.0;  // keep exact zeros out, nothing else

void accumulate(std::map<int, double>& terms, int key, double c) {
  const auto [it, inserted] = terms.emplace(key, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) <= kDropTolerance) terms.erase(it);
}

void accumulate(std::map<std::pair<int, int>, double>& terms, std::pair<int, int> key,
                double c) {
  const auto [it, inserted] = terms.emplace(key, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) <= kDropTolerance) terms.erase(it);
}

// Adds lambda * (sum_k coeff_k b_k + offset)^2 expanded over binaries (b^2 = b).
void add_squared_penalty(QuboForm& qubo, const std::vector<std::pair<int, double>>& affine,
                         double offset, double lambda) {
  qubo.add_constant(lambda * offset * offset);
  for (std::size_t s = 0; s < affine.size(); ++s) {
    const auto [qs, cs] = affine[s];
    qubo.add_linear(qs, lambda * (cs * cs + 2.0 * cs * offset));
    for (std::size_t t = s + 1; t < affine.size(); ++t) {
      const auto [qt, ct] = affine[t];
      qubo.add_quadratic(qs, qt, lambda * 2.0 * cs * ct);
    }
  }
}

void add_uflp_objective(QuboForm& qubo, const UflpInstance& instance,
                        const QubitLayout& layout) {
  for (int i = 0; i < layout.m; ++i)
    for (int j = 0; j < layout.n; ++j)
      qubo.add_linear(layout.y_index(i, j),
                      instance.service_cost[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(j)]);
  for (int j = 0; j < layout.n; ++j)
    qubo.add_linear(layout.x_index(j), instance.opening_cost[static_cast<std::size_t>(j)]);
}

void add_slack_penalties(QuboForm& qubo, const QubitLayout& layout, double lambda) {
  for (int i = 0; i < layout.m; ++i) {
    for (int j = 0; j < layout.n; ++j) {
      add_squared_penalty(qubo,
                          {{layout.y_index(i, j), 1.0},
                           {layout.z_index(i, j), 1.0},
                           {layout.x_index(j), -1.0}},
                          0.0, lambda);
    }
  }
}

}  // namespace

void QuboForm::add_linear(int a, double c) {
  if (a < 0) throw std::invalid_argument("QuboForm: negative qubit index");
  accumulate(linear, a, c);
}

void QuboForm::add_quadratic(int a, int b, double c) {
  if (a < 0 || b < 0) throw std::invalid_argument("QuboForm: negative qubit index");
  if (a == b) throw std::invalid_argument("QuboForm: quadratic term needs distinct indices");
  accumulate(quadratic, {std::min(a, b), std::max(a, b)}, c);
}

double QuboForm::eval_bits(std::string_view bits) const {
  double total = constant;
  for (const auto& [q, c] : linear) {
    if (static_cast<std::size_t>(q) >= bits.size()) {
      throw std::invalid_argument("QuboForm::eval_bits: term index out of range");
    }
    if (bits[static_cast<std::size_t>(q)] == '1') total += c;
  }
  for (const auto& [key, c] : quadratic) {
    if (static_cast<std::size_t>(key.second) >= bits.size()) {
      throw std::invalid_argument("QuboForm::eval_bits: term index out of range");
    }
    if (bits[static_cast<std::size_t>(key.first)] == '1' &&
        bits[static_cast<std::size_t>(key.second)] == '1') {
      total += c;
    }
  }
  return total;
}

double QuboForm::eval_index(std::size_t index, int n_qubits) const {
  double total = constant;
  for (const auto& [q, c] : linear) {
    if (bit_of(index, n_qubits, q)) total += c;
  }
  for (const auto& [key, c] : quadratic) {
    if (bit_of(index, n_qubits, key.first) && bit_of(index, n_qubits, key.second)) total += c;
  }
  return total;
}

int QuboForm::max_qubit() const {
  int best = -1;
  if (!linear.empty()) best = std::max(best, linear.rbegin()->first);
  if (!quadratic.empty()) best = std::max(best, quadratic.rbegin()->first.second);
  return best;
}

ZForm to_z_basis(const QuboForm& qubo) {
  // b_a = (1 - Z_a)/2, b_a b_b = (1 - Z_a - Z_b + Z_a Z_b)/4.
  ZForm zform;
  zform.constant = qubo.constant;
  for (const auto& [q, c] : qubo.linear) {
    zform.constant += c / 2.0;
    zform.z[q] -= c / 2.0;
  }
  for (const auto& [key, c] : qubo.quadratic) {
    zform.constant += c / 4.0;
    zform.z[key.first] -= c / 4.0;
    zform.z[key.second] -= c / 4.0;
    zform.zz[key] += c / 4.0;
  }
  return zform;
}

QuboForm from_z_basis(const ZForm& zform) {
  // Z_a = 1 - 2 b_a.
  QuboForm qubo;
  qubo.constant = zform.constant;
  for (const auto& [q, c] : zform.z) {
    qubo.add_constant(c);
    qubo.add_linear(q, -2.0 * c);
  }
  for (const auto& [key, c] : zform.zz) {
    qubo.add_constant(c);
    qubo.add_linear(key.first, -2.0 * c);
    qubo.add_linear(key.second, -2.0 * c);
    qubo.add_quadratic(key.first, key.second, 4.0 * c);
  }
  return qubo;
}

QuboForm qubo_pfs(const UflpInstance& instance, double lambda) {
  instance.validate();
  if (lambda < 0.0) throw std::invalid_argument("qubo_pfs: lambda must be >= 0");
  const QubitLayout layout(instance);
  QuboForm qubo;
  add_uflp_objective(qubo, instance, layout);
  add_slack_penalties(qubo, layout, lambda);
  return qubo;
}

QuboForm qubo_full(const UflpInstance& instance, double lambda) {
  instance.validate();
  if (lambda < 0.0) throw std::invalid_argument("qubo_full: lambda must be >= 0");
  const QubitLayout layout(instance);
  QuboForm qubo;
  add_uflp_objective(qubo, instance, layout);
  add_slack_penalties(qubo, layout, lambda);
  for (int i = 0; i < layout.m; ++i) {
    std::vector<std::pair<int, double>> row;
    row.reserve(static_cast<std::size_t>(layout.n));
    for (int j = 0; j < layout.n; ++j) row.emplace_back(layout.y_index(i, j), 1.0);
    add_squared_penalty(qubo, row, -1.0, lambda);
  }
  return qubo;
}

MixerSpec mixer_pairs(int m, int n) {
  if (m < 1 || n < 1) throw std::invalid_argument("mixer_pairs: m and n must be >= 1");
  MixerSpec spec;
  spec.pairs.reserve(static_cast<std::size_t>(m * (n - 1)));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n - 1; ++j) {
      const int a = j + i * n;
      spec.pairs.emplace_back(a, a + 1);
    }
  }
  return spec;
}

std::vector<double> diagonal_table(const QuboForm& qubo, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("diagonal_table: n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  }
  if (qubo.max_qubit() >= n_qubits) {
    throw std::invalid_argument("diagonal_table: QUBO references qubit " +
                                std::to_string(qubo.max_qubit()) + " beyond " +
                                std::to_string(n_qubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<double> table(dim, qubo.constant);
  // One sweep per term: each linear/quadratic coefficient touches the slice
  // of indices where its bits are set.
  for (const auto& [q, c] : qubo.linear) {
    const std::size_t bit = std::size_t{1} << bit_position(n_qubits, q);
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & bit) table[b] += c;
    }
  }
  for (const auto& [key, c] : qubo.quadratic) {
    const std::size_t bit_a = std::size_t{1} << bit_position(n_qubits, key.first);
    const std::size_t bit_b = std::size_t{1} << bit_position(n_qubits, key.second);
    const std::size_t both = bit_a | bit_b;
    for (std::size_t b = 0; b < dim; ++b) {
      if ((b & both) == both) table[b] += c;
    }
  }
  return table;
}

void dump_qubo(std::ostream& out, const QuboForm& qubo) {
  out << "constant " << qubo.constant << '\n';
  for (const auto& [q, c] : qubo.linear) out << "l " << q << ' ' << c << '\n';
  for (const auto& [key, c] : qubo.quadratic)
    out << "q " << key.first << ' ' << key.second << ' ' << c << '\n';
}

}  // namespace vqufl
