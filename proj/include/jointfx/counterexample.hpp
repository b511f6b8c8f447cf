/*
 * Copyright 2026 The jointfx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jointfx/scm.hpp"

namespace jointfx {

/// Boolean SCM over (X1, X2, Y) driven by one shared noise bit
/// U = U_1 = U_2 = U_Y ~ Bernoulli(p).
///
///   conjunctive:  X1 = U,  X2 = X1 AND U,  Y = X1 AND X2 AND U
///   collapsed:    X1 = U,  X2 = X1 AND U,  Y = X2 AND U
///
/// Both entail the same observational and single-intervention distributions
/// but differ under do(X1 = 0, X2 = 1).
class DiscreteScm {
 public:
  enum class Variant { conjunctive, collapsed };

  DiscreteScm(Variant variant, double p);

  Variant variant() const { return variant_; }
  double p() const { return p_; }
  std::string name() const { return variant_ == Variant::conjunctive ? "M_conj" : "M_coll"; }

  /// The three node names, in order X1, X2, Y.
  static CausalGraph graph();

 private:
  Variant variant_;
  double p_;
};

/// Joint distribution of the non-intervened variables; every assignment is
/// listed, including zero-probability ones.
struct ProbabilityTable {
  std::vector<std::string> variables;
  struct Entry {
    std::vector<int> values;
    double probability = 0.0;
  };
  std::vector<Entry> entries;

  double probability(const std::vector<int>& values) const;
  double total() const;
};

/// Exact probabilities by summing over the two atoms of the shared noise bit.
/// The regime must be observational, do(X_i = v) or do(X1 = v1, X2 = v2) with
/// levels in {0, 1}.
ProbabilityTable enumerate_distribution(const DiscreteScm& scm, const Regime& regime);

/// Half the L1 distance. Tables must list the same variables.
double total_variation(const ProbabilityTable& a, const ProbabilityTable& b);

struct RegimeComparison {
  std::string regime;
  ProbabilityTable conjunctive;
  ProbabilityTable collapsed;
  double max_abs_difference = 0.0;
};

struct UnidentifiabilityReport {
  double p = 0.0;
  /// Observational plus do(X1=0), do(X1=1), do(X2=0), do(X2=1).
  std::vector<RegimeComparison> shared;
  bool shared_regimes_agree = false;
  RegimeComparison joint;  // do(X1=0, X2=1)
  double joint_tv_distance = 0.0;
};

/// Throws std::invalid_argument unless 0 < p < 1.
UnidentifiabilityReport verify_unidentifiability(double p);

void print_report(std::ostream& out, const UnidentifiabilityReport& report);
void write_report_csv(std::ostream& out, const UnidentifiabilityReport& report,
                      const std::string& comment = {});

}  // namespace jointfx
