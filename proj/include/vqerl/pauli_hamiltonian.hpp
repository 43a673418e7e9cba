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

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vqerl {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

/// Tensor product of single-qubit Pauli operators. Character i of the text
/// form acts on qubit i (leftmost character = qubit 0).
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {}

  static PauliString from_str(std::string_view text) {
    std::vector<Pauli> ops;
    ops.reserve(text.size());
    for (char c : text) {
      switch (c) {
        case 'I': ops.push_back(Pauli::I); break;
        case 'X': ops.push_back(Pauli::X); break;
        case 'Y': ops.push_back(Pauli::Y); break;
        case 'Z': ops.push_back(Pauli::Z); break;
        default:
          throw std::invalid_argument("invalid Pauli label '" +
                                      std::string(1, c) + "'");
      }
    }
    return PauliString(std::move(ops));
  }

  std::size_t num_qubits() const { return ops_.size(); }
  Pauli operator[](std::size_t q) const { return ops_[q]; }
  const std::vector<Pauli>& ops() const { return ops_; }

  std::string str() const {
    std::string s;
    s.reserve(ops_.size());
    for (Pauli p : ops_) s.push_back(to_char(p));
    return s;
  }

  /// Bit q set when the operator on qubit q flips the computational basis
  /// state (X or Y).
  std::uint64_t x_mask() const {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < ops_.size(); ++q)
      if (ops_[q] == Pauli::X || ops_[q] == Pauli::Y) m |= std::uint64_t{1} << q;
    return m;
  }

  /// Bit q set when the operator on qubit q carries a Z-type sign (Z or Y).
  std::uint64_t z_mask() const {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < ops_.size(); ++q)
      if (ops_[q] == Pauli::Z || ops_[q] == Pauli::Y) m |= std::uint64_t{1} << q;
    return m;
  }

  int y_count() const {
    int n = 0;
    for (Pauli p : ops_) n += (p == Pauli::Y);
    return n;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> ops_;
};

struct PauliTerm {
  double coefficient = 0.0;  // Hartree
  PauliString string;
};

/// Thrown by parse_hamiltonian; carries the offending 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// H = sum_j c_j P_j with distinct strings and finite coefficients.
class PauliHamiltonian {
 public:
  static constexpr std::size_t kMaxQubits = 64;

  PauliHamiltonian(std::size_t num_qubits, std::vector<PauliTerm> terms)
      : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > kMaxQubits)
      throw std::invalid_argument("qubit count must be in [1, 64]");
    if (terms.empty())
      throw std::invalid_argument("Hamiltonian needs at least one term");
    std::map<PauliString, std::size_t> seen;
    for (auto& t : terms) {
      if (t.string.num_qubits() != num_qubits)
        throw std::invalid_argument("Pauli string length " +
                                    std::to_string(t.string.num_qubits()) +
                                    " does not match qubit count " +
                                    std::to_string(num_qubits));
      if (!std::isfinite(t.coefficient))
        throw std::invalid_argument("non-finite coefficient");
      auto [it, inserted] = seen.emplace(t.string, terms_.size());
      if (inserted)
        terms_.push_back(std::move(t));
      else
        terms_[it->second].coefficient += t.coefficient;
    }
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

 private:
  std::size_t num_qubits_;
  std::vector<PauliTerm> terms_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Chemistry documents sometimes carry U+2212 MINUS SIGN instead of '-'.
inline std::string normalize_minus(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x88 &&
        static_cast<unsigned char>(s[i + 2]) == 0x92) {
      out.push_back('-');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Parses the line format `<coefficient> <pauli-string>`; '#' starts a
/// comment line. Duplicate strings are merged by adding coefficients.
inline PauliHamiltonian parse_hamiltonian(std::string_view text) {
  std::vector<PauliTerm> terms;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream lines{std::string(text)};
  std::string raw;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string line = detail::normalize_minus(detail::trim(raw));
    if (line.empty() || line.front() == '#') continue;

    std::istringstream fields(line);
    std::string coeff_tok, string_tok, extra;
    fields >> coeff_tok >> string_tok;
    if (string_tok.empty())
      throw ParseError(line_no, "expected '<coefficient> <pauli-string>'");
    if (fields >> extra)
      throw ParseError(line_no, "unexpected trailing token '" + extra + "'");

    const char* first = coeff_tok.data();
    const char* last = first + coeff_tok.size();
    if (*first == '+') ++first;
    double coeff = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, coeff);
    if (ec != std::errc() || ptr != last || !std::isfinite(coeff))
      throw ParseError(line_no, "malformed coefficient '" + coeff_tok + "'");

    PauliString ps;
    try {
      ps = PauliString::from_str(string_tok);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (width == 0) {
      width = ps.num_qubits();
      if (width > PauliHamiltonian::kMaxQubits)
        throw ParseError(line_no, "more than 64 qubits");
    } else if (ps.num_qubits() != width) {
      throw ParseError(line_no, "inconsistent Pauli string length " +
                                    std::to_string(ps.num_qubits()) +
                                    " (expected " + std::to_string(width) + ")");
    }
    terms.push_back({coeff, std::move(ps)});
  }
  if (terms.empty()) throw ParseError(line_no, "document contains no terms");
  return PauliHamiltonian(width, std::move(terms));
}

inline PauliHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open Hamiltonian file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hamiltonian(buf.str());
}

/// Writes one term per line with round-trip coefficient precision.
inline std::string serialize(const PauliHamiltonian& h) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& t : h.terms()) out << t.coefficient << ' ' << t.string.str() << '\n';
  return out.str();
}

/// -sum_j |c_j|: each Pauli string has spectrum in {-1, +1}, so this never
/// exceeds the ground energy.
inline double lower_bound(const PauliHamiltonian& h) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += std::abs(t.coefficient);
  return -s;
}

inline constexpr std::size_t kDenseQubitLimit = 12;

/// Dense 2^n x 2^n matrix, built entry by entry from the 2x2 Pauli matrices
/// (tensor-product definition, qubit 0 = least significant index bit).
inline Eigen::MatrixXcd dense_matrix(const PauliHamiltonian& h) {
  const std::size_t n = h.num_qubits();
  if (n > kDenseQubitLimit)
    throw std::length_error("dense matrix refused: " + std::to_string(n) +
                            " qubits exceeds the limit of 12");
  using cd = std::complex<double>;
  // pauli[p][row][col]
  static const cd kPauli[4][2][2] = {
      {{1, 0}, {0, 1}},
      {{0, 1}, {1, 0}},
      {{0, cd(0, -1)}, {cd(0, 1), 0}},
      {{1, 0}, {0, -1}},
  };
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t row = 0;
      cd amp = t.coefficient;
      for (std::size_t q = 0; q < n; ++q) {
        const int p = static_cast<int>(t.string[q]);
        const int c = (col >> q) & 1;
        const int r = kPauli[p][0][c] != cd(0) ? 0 : 1;
        amp *= kPauli[p][r][c];
        row |= static_cast<std::size_t>(r) << q;
      }
      m(row, col) += amp;
    }
  }
  return m;
}

/// Minimum eigenvalue by dense Hermitian diagonalization (n <= 12).
inline double exact_ground_energy(const PauliHamiltonian& h) {
  const Eigen::MatrixXcd m = dense_matrix(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  return solver.eigenvalues().minCoeff();
}

}  // namespace vqerl
