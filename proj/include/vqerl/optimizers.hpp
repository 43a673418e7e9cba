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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqerl/circuit.hpp"

namespace vqerl {

inline double wrap_angle(double theta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

struct OptimizeRequest {
  CircuitState circuit;
  const PauliHamiltonian* hamiltonian = nullptr;
  std::vector<std::size_t> indices;  // rotation slot positions
  int max_iterations = 1;
};

struct OptimizeResult {
  std::vector<std::size_t> indices;
  std::vector<double> angles;  // aligned with indices, wrapped to [0, 2pi)
  double energy = 0.0;
  int evaluations = 0;
};

inline void apply_angles(CircuitState& c, const OptimizeResult& r) {
  for (std::size_t k = 0; k < r.indices.size(); ++k) c.set_angle(r.indices[k], r.angles[k]);
  c.set_energy(r.energy);
}

namespace detail {

inline void check_request(const OptimizeRequest& req) {
  if (req.hamiltonian == nullptr) throw std::invalid_argument("request has no Hamiltonian");
  if (req.indices.empty()) throw std::invalid_argument("no angles selected");
  if (req.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  for (auto i : req.indices)
    if (i >= req.circuit.size() || !req.circuit[i].is_rotation())
      throw std::invalid_argument("slot " + std::to_string(i) + " is not a rotation gate");
}

/// Energy as a function of the selected angles, with an evaluation counter.
class AngleObjective {
 public:
  explicit AngleObjective(const OptimizeRequest& req)
      : gates_(req.circuit.slots()), h_(*req.hamiltonian), indices_(req.indices),
        num_qubits_(req.circuit.num_qubits()) {}

  double operator()(const std::vector<double>& angles) {
    for (std::size_t k = 0; k < indices_.size(); ++k) gates_[indices_[k]].angle = angles[k];
    ++evaluations_;
    return expectation(simulate(num_qubits_, gates_), h_);
  }

  std::vector<double> current() const {
    std::vector<double> a;
    for (auto i : indices_) a.push_back(gates_[i].angle);
    return a;
  }

  int evaluations() const { return evaluations_; }

 private:
  std::vector<GateSpec> gates_;
  const PauliHamiltonian& h_;
  std::vector<std::size_t> indices_;
  std::size_t num_qubits_;
  int evaluations_ = 0;
};

inline OptimizeResult finish(AngleObjective& f, const std::vector<std::size_t>& indices,
                             std::vector<double> angles) {
  for (auto& a : angles) a = wrap_angle(a);
  OptimizeResult r;
  r.indices = indices;
  r.energy = f(angles);
  r.angles = std::move(angles);
  r.evaluations = f.evaluations();
  return r;
}

}  // namespace detail

struct SinusoidFit {
  double minimizer;  // argmin over the angle, wrapped to [0, 2pi)
  double amplitude;
  double minimum;
};

/// Closed-form minimizer of E(theta) = A cos(theta - phi) + C from samples at
/// theta0 and theta0 +/- pi/2. Flat directions (A < 1e-12) keep theta0.
inline SinusoidFit fit_sinusoid(double theta0, double e0, double e_plus, double e_minus) {
  const double y = 2 * e0 - e_plus - e_minus;
  const double x = e_plus - e_minus;
  const double amplitude = 0.5 * std::hypot(y, x);
  const double offset = 0.5 * (e_plus + e_minus);
  if (amplitude < 1e-12) return {wrap_angle(theta0), amplitude, e0};
  const double theta = theta0 - std::numbers::pi / 2 - std::atan2(y, x);
  return {wrap_angle(theta), amplitude, offset - amplitude};
}

/// Sequential single-angle minimization; one iteration is one sweep over all
/// selected angles. Stops early when a sweep gains less than 1e-12.
inline OptimizeResult rotosolve(const OptimizeRequest& req) {
  detail::check_request(req);
  detail::AngleObjective f(req);
  std::vector<double> theta = f.current();
  double energy = f(theta);
  for (int it = 0; it < req.max_iterations; ++it) {
    const double sweep_start = energy;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double t0 = theta[k];
      theta[k] = t0 + std::numbers::pi / 2;
      const double ep = f(theta);
      theta[k] = t0 - std::numbers::pi / 2;
      const double em = f(theta);
      const SinusoidFit fit = fit_sinusoid(t0, energy, ep, em);
      theta[k] = fit.minimizer;
      energy = std::min(energy, fit.minimum);
    }
    if (sweep_start - energy < 1e-12) break;
  }
  return detail::finish(f, req.indices, std::move(theta));
}

struct CobylaOptions {
  double rho_begin = 0.5;
  double rho_end = 1e-6;
};

/// Derivative-free minimization over unbounded variables using linear
/// interpolation on a simplex of n+1 points inside a shrinking trust region
/// (Powell's COBYLA with no constraints). `max_evaluations` bounds the number
/// of objective calls. Returns the best point seen.
inline std::vector<double> cobyla_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> x0, int max_evaluations, const CobylaOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) return x0;
  constexpr double kAlpha = 0.25;  // min acceptable simplex "width" / rho
  constexpr double kBeta = 2.1;    // max acceptable edge length / rho
  constexpr double kGamma = 0.5;   // geometry step length / rho
  constexpr double kDelta = 1.1;

  using Vec = Eigen::VectorXd;
  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    return objective(std::vector<double>(x.data(), x.data() + n));
  };

  double rho = opt.rho_begin;
  std::vector<Vec> pts(n + 1);
  std::vector<double> fv(n + 1);
  pts[0] = Eigen::Map<const Vec>(x0.data(), n);
  fv[0] = eval(pts[0]);
  Vec best_x = pts[0];
  double best_f = fv[0];
  auto remember = [&](const Vec& x, double fx) {
    if (fx < best_f) { best_f = fx; best_x = x; }
  };
  for (int j = 0; j < n; ++j) {
    if (evals >= max_evaluations) return std::vector<double>(best_x.data(), best_x.data() + n);
    pts[j + 1] = pts[0];
    pts[j + 1](j) += rho;
    fv[j + 1] = eval(pts[j + 1]);
    remember(pts[j + 1], fv[j + 1]);
  }

  bool geometry_step_pending = false;
  while (evals < max_evaluations) {
    // Pivot = best vertex.
    const int piv = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    std::swap(pts[0], pts[piv]);
    std::swap(fv[0], fv[piv]);

    Eigen::MatrixXd d(n, n);  // row j: vertex j+1 minus pivot
    Vec df(n);
    for (int j = 0; j < n; ++j) {
      d.row(j) = (pts[j + 1] - pts[0]).transpose();
      df(j) = fv[j + 1] - fv[0];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
    if (!lu.isInvertible()) {
      // Degenerate simplex: rebuild axis-aligned around the pivot.
      for (int j = 0; j < n && evals < max_evaluations; ++j) {
        pts[j + 1] = pts[0];
        pts[j + 1](j) += rho;
        fv[j + 1] = eval(pts[j + 1]);
        remember(pts[j + 1], fv[j + 1]);
      }
      continue;
    }
    const Eigen::MatrixXd inv = lu.inverse();  // column j: dual vector of vertex j+1
    const Vec grad = inv * df;

    // Simplex acceptability: edge lengths and distances to opposite faces.
    Vec veta(n), vsig(n);
    bool acceptable = true;
    for (int j = 0; j < n; ++j) {
      veta(j) = d.row(j).norm();
      vsig(j) = 1.0 / inv.col(j).norm();
      if (veta(j) > kBeta * rho || vsig(j) < kAlpha * rho) acceptable = false;
    }

    if (!acceptable && geometry_step_pending) {
      int l = 0;
      if (veta.maxCoeff(&l) <= kBeta * rho) vsig.minCoeff(&l);
      Vec step = kGamma * rho * vsig(l) * inv.col(l);
      if (grad.dot(step) > 0) step = -step;
      pts[l + 1] = pts[0] + step;
      fv[l + 1] = eval(pts[l + 1]);
      remember(pts[l + 1], fv[l + 1]);
      geometry_step_pending = false;
      continue;
    }

    // Trust-region step minimizing the linear model within radius rho.
    const double gnorm = grad.norm();
    bool reduce_rho = false;
    if (gnorm * rho < 1e-15 * std::max(1.0, std::abs(fv[0]))) {
      reduce_rho = true;
    } else {
      const Vec step = -rho / gnorm * grad;
      const Vec xn = pts[0] + step;
      const double fn = eval(xn);
      remember(xn, fn);
      const double predicted = rho * gnorm;
      const double actual = fv[0] - fn;

      // Vertex to drop: largest barycentric weight of the step, inflated for
      // vertices far from the new point.
      const Vec sigbar = (inv.transpose() * step).cwiseAbs();
      int drop = -1;
      double score_max = actual > 0 ? 0.0 : 1.0;
      for (int j = 0; j < n; ++j) {
        const double dist = (pts[j + 1] - xn).norm();
        const double score =
            sigbar(j) * std::max(1.0, std::pow(dist / (kDelta * rho), 2));
        if (score > score_max) { score_max = score; drop = j; }
      }
      if (drop < 0 && actual > 0) {
        // Improvement with a degenerate weight vector: swap out the farthest vertex.
        veta.maxCoeff(&drop);
      }
      if (drop >= 0) {
        pts[drop + 1] = xn;
        fv[drop + 1] = fn;
      }
      reduce_rho = !(actual > 0 && actual >= 0.1 * predicted);
    }

    if (reduce_rho) {
      if (!acceptable) {
        geometry_step_pending = true;
        continue;
      }
      if (rho <= opt.rho_end) break;
      rho = rho <= 1.5 * opt.rho_end ? opt.rho_end : 0.5 * rho;
    }
  }
  return std::vector<double>(best_x.data(), best_x.data() + n);
}

/// COBYLA-style minimization over the selected angles; max_iterations is the
/// objective-evaluation budget. Angles are wrapped to [0, 2pi) afterwards.
inline OptimizeResult derivative_free_minimize(const OptimizeRequest& req,
                                               const CobylaOptions& opt = {}) {
  detail::check_request(req);
  detail::AngleObjective f(req);
  const std::vector<double> x0 = f.current();
  std::vector<double> best = cobyla_minimize(
      [&](const std::vector<double>& a) { return f(a); }, x0, req.max_iterations, opt);
  return detail::finish(f, req.indices, std::move(best));
}

enum class OptimizerKind { Rotosolve, DerivativeFree };
enum class Strategy { Local, Global };

inline std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::Rotosolve ? "rotosolve" : "cobyla";
}
inline std::string to_string(Strategy s) { return s == Strategy::Local ? "local" : "global"; }

inline OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "rotosolve") return OptimizerKind::Rotosolve;
  if (s == "cobyla" || s == "derivative-free") return OptimizerKind::DerivativeFree;
  throw std::invalid_argument("unknown optimizer '" + s + "'");
}
inline Strategy strategy_from_string(const std::string& s) {
  if (s == "local") return Strategy::Local;
  if (s == "global") return Strategy::Global;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

/// Iteration budgets default to the published settings: Rotosolve 5 sweeps
/// (local) / 25 sweeps (global), COBYLA 100 evaluations.
struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::DerivativeFree;
  Strategy strategy = Strategy::Global;
  int local_window = 5;
  int rotosolve_local_iterations = 5;
  int rotosolve_global_iterations = 25;
  int cobyla_local_iterations = 100;
  int cobyla_global_iterations = 100;
  CobylaOptions cobyla;

  int budget() const {
    if (kind == OptimizerKind::Rotosolve)
      return strategy == Strategy::Local ? rotosolve_local_iterations
                                         : rotosolve_global_iterations;
    return strategy == Strategy::Local ? cobyla_local_iterations : cobyla_global_iterations;
  }
};

/// Slots optimized by a strategy: the last `window` rotations (local) or all
/// rotations (global).
inline std::vector<std::size_t> strategy_indices(const CircuitState& c, Strategy s,
                                                 int window = 5) {
  auto rot = c.rotation_slots();
  if (s == Strategy::Local && static_cast<int>(rot.size()) > window)
    rot.erase(rot.begin(), rot.end() - window);
  return rot;
}

/// Optimizes the strategy's angles. A circuit without rotations yields a
/// no-op result carrying the circuit's current energy.
inline OptimizeResult apply_strategy(const CircuitState& circuit, const PauliHamiltonian& h,
                                     const OptimizerConfig& cfg) {
  OptimizeRequest req{circuit, &h, strategy_indices(circuit, cfg.strategy, cfg.local_window),
                      cfg.budget()};
  if (req.indices.empty()) {
    OptimizeResult r;
    r.energy = circuit_energy(circuit, h);
    r.evaluations = 1;
    return r;
  }
  return cfg.kind == OptimizerKind::Rotosolve ? rotosolve(req)
                                              : derivative_free_minimize(req, cfg.cobyla);
}

}  // namespace vqerl
