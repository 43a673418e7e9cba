// Copyright 2026 The vqerl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqerl/pauli_hamiltonian.hpp"

namespace vqerl {

enum class GateKind : std::uint8_t { RX, RY, RZ, CNOT };

/// Rotation axes numbered 1, 2, 3 as in the state encoding.
inline int axis_number(GateKind k) {
  switch (k) {
    case GateKind::RX: return 1;
    case GateKind::RY: return 2;
    case GateKind::RZ: return 3;
    default: return 0;
  }
}

inline std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

inline GateKind gate_kind_from_string(const std::string& s) {
  if (s == "RX") return GateKind::RX;
  if (s == "RY") return GateKind::RY;
  if (s == "RZ") return GateKind::RZ;
  if (s == "CNOT") return GateKind::CNOT;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

struct GateSpec {
  GateKind kind = GateKind::RX;
  int target = 0;
  int control = -1;    // CNOT only
  double angle = 0.0;  // radians, rotations only

  static GateSpec rotation(GateKind axis, int qubit, double angle = 0.0) {
    if (axis == GateKind::CNOT)
      throw std::invalid_argument("CNOT is not a rotation");
    return {axis, qubit, -1, angle};
  }
  static GateSpec cnot(int control, int target) {
    return {GateKind::CNOT, target, control, 0.0};
  }

  bool is_rotation() const { return kind != GateKind::CNOT; }

  /// Throws std::out_of_range when the gate does not fit `num_qubits`.
  void validate(std::size_t num_qubits) const {
    const int n = static_cast<int>(num_qubits);
    if (target < 0 || target >= n)
      throw std::out_of_range("gate target " + std::to_string(target) +
                              " out of range for " + std::to_string(n) + " qubits");
    if (kind == GateKind::CNOT) {
      if (control < 0 || control >= n)
        throw std::out_of_range("CNOT control " + std::to_string(control) +
                                " out of range");
      if (control == target)
        throw std::invalid_argument("CNOT control equals target");
    }
  }

  friend bool operator==(const GateSpec&, const GateSpec&) = default;
};

/// 2^n amplitudes; qubit 0 is the least significant bit of the index.
class StateVector {
 public:
  static constexpr std::size_t kMaxQubits = 24;
  using Amplitude = std::complex<double>;

  StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != (std::size_t{1} << num_qubits))
      throw std::invalid_argument("amplitude count must be 2^num_qubits");
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

 private:
  std::size_t num_qubits_;
  std::vector<Amplitude> amps_;
};

inline StateVector zero_state(std::size_t num_qubits) {
  if (num_qubits < 1 || num_qubits > StateVector::kMaxQubits)
    throw std::out_of_range("qubit count " + std::to_string(num_qubits) +
                            " outside [1, 24]");
  std::vector<StateVector::Amplitude> amps(std::size_t{1} << num_qubits);
  amps[0] = 1.0;
  return StateVector(num_qubits, std::move(amps));
}

/// R_P(theta) = exp(-i theta P / 2) for rotations; standard CNOT otherwise.
inline void apply_gate_inplace(StateVector& state, const GateSpec& gate) {
  gate.validate(state.num_qubits());
  auto amps = state.amplitudes();
  const std::size_t dim = amps.size();
  const std::size_t tbit = std::size_t{1} << gate.target;
  using cd = std::complex<double>;

  if (gate.kind == GateKind::CNOT) {
    const std::size_t cbit = std::size_t{1} << gate.control;
    for (std::size_t i = 0; i < dim; ++i)
      if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
    return;
  }

  const double c = std::cos(gate.angle / 2);
  const double s = std::sin(gate.angle / 2);
  cd m00, m01, m10, m11;
  switch (gate.kind) {
    case GateKind::RX:
      m00 = c; m01 = cd(0, -s); m10 = cd(0, -s); m11 = c;
      break;
    case GateKind::RY:
      m00 = c; m01 = -s; m10 = s; m11 = c;
      break;
    case GateKind::RZ:
      m00 = cd(c, -s); m01 = 0; m10 = 0; m11 = cd(c, s);
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & tbit) continue;
    const cd a0 = amps[i];
    const cd a1 = amps[i | tbit];
    amps[i] = m00 * a0 + m01 * a1;
    amps[i | tbit] = m10 * a0 + m11 * a1;
  }
}

inline StateVector apply_gate(StateVector state, const GateSpec& gate) {
  apply_gate_inplace(state, gate);
  return state;
}

inline StateVector simulate(std::size_t num_qubits, std::span<const GateSpec> gates) {
  StateVector psi = zero_state(num_qubits);
  for (const auto& g : gates) apply_gate_inplace(psi, g);
  return psi;
}

/// <psi|P|psi> via the Pauli action P|k> = i^{#Y} (-1)^{|k & z|} |k ^ x>.
inline std::complex<double> pauli_expectation(const StateVector& state,
                                              const PauliString& p) {
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  static const std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const auto phase = kIPow[p.y_count() & 3];
  const auto amps = state.amplitudes();
  std::complex<double> acc = 0.0;
  for (std::uint64_t k = 0; k < amps.size(); ++k) {
    const double sign = (std::popcount(k & z) & 1) ? -1.0 : 1.0;
    acc += std::conj(amps[k ^ x]) * (sign * amps[k]);
  }
  return phase * acc;
}

/// <psi|H|psi> in Hartree.
inline double expectation(const StateVector& state, const PauliHamiltonian& h) {
  if (state.num_qubits() != h.num_qubits())
    throw std::invalid_argument("qubit-count mismatch: state has " +
                                std::to_string(state.num_qubits()) +
                                ", Hamiltonian has " +
                                std::to_string(h.num_qubits()));
  std::complex<double> total = 0.0;
  double scale = 1.0;
  for (const auto& t : h.terms()) {
    total += t.coefficient * pauli_expectation(state, t.string);
    scale += std::abs(t.coefficient);
  }
  if (std::abs(total.imag()) > 1e-9 * scale)
    throw std::logic_error("expectation has non-negligible imaginary part");
  return total.real();
}

}  // namespace vqerl
