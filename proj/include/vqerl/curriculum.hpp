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
#include <limits>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace vqerl {

inline constexpr double kChemicalAccuracy = 1.6e-3;  // Hartree

struct CurriculumProfile {
  std::string name;
  double initial_threshold = 0.0;
  int episodes_per_shift = 0;
  double amortization_initial = 0.0;
  double amortization_step = 0.0;
  int successes_per_decay = 0;
};

/// "exact-reference": tuned for runs that know the exact ground energy.
/// "lower-bound-proxy": wide initial threshold for runs guided by a lower
/// bound; its decay step is one tenth of the amortization radius.
inline CurriculumProfile make_profile(const std::string& name) {
  if (name == "exact-reference") return {name, 0.005, 2000, 1e-4, 1e-5, 50};
  if (name == "lower-bound-proxy") return {name, 4.0, 500, 0.005, 0.0005, 25};
  throw std::invalid_argument("unknown curriculum profile '" + name + "'");
}

/// Moving accuracy target. Every N episodes the threshold jumps to the best
/// error seen so far plus the full amortization radius; after the first such
/// shift, every S successful episodes shave one step off the radius and the
/// threshold follows it down towards the best error. The threshold never
/// drops below `floor`.
class ThresholdController {
 public:
  ThresholdController(CurriculumProfile profile, double floor = kChemicalAccuracy)
      : p_(std::move(profile)), floor_(floor) {
    if (!(p_.initial_threshold > 0 && p_.episodes_per_shift > 0 &&
          p_.amortization_initial > 0 && p_.amortization_step > 0 &&
          p_.successes_per_decay > 0))
      throw std::invalid_argument("curriculum profile values must be positive");
    if (!(floor >= 0)) throw std::invalid_argument("threshold floor must be >= 0");
    xi_ = std::max(floor_, p_.initial_threshold);
    delta_ = p_.amortization_initial;
  }

  double threshold() const { return xi_; }
  double amortization() const { return delta_; }
  double best_error() const { return best_; }
  double floor() const { return floor_; }
  int episodes() const { return episodes_; }
  int successes() const { return successes_; }
  int shifts() const { return shifts_; }
  const CurriculumProfile& profile() const { return p_; }

  /// `episode_min_error` is min_t (E_t - E_ref) over the finished episode.
  /// Returns the threshold for the next episode.
  double on_episode_end(double episode_min_error, bool success) {
    best_ = std::min(best_, episode_min_error);
    ++episodes_;
    if (shifts_ > 0 && success) {
      ++successes_;
      if (successes_ % p_.successes_per_decay == 0)
        delta_ = std::max(0.0, delta_ - p_.amortization_step);
    }
    if (episodes_ % p_.episodes_per_shift == 0) {
      delta_ = p_.amortization_initial;
      successes_ = 0;
      ++shifts_;
      xi_ = std::max(floor_, best_ + delta_);
    } else if (shifts_ > 0) {
      xi_ = std::max(floor_, std::min(xi_, best_ + delta_));
    }
    return xi_;
  }

  nlohmann::json to_json() const {
    return {{"threshold", xi_}, {"amortization", delta_}, {"best_error", best_},
            {"episodes", episodes_}, {"successes", successes_}, {"shifts", shifts_}};
  }

 private:
  CurriculumProfile p_;
  double floor_;
  double xi_ = 0.0;
  double delta_ = 0.0;
  double best_ = std::numeric_limits<double>::infinity();
  int episodes_ = 0;
  int successes_ = 0;
  int shifts_ = 0;
};

}  // namespace vqerl
