// Copyright 2026 The ECQP Authors
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

// Closed-form approximation ratios for semidefinite rounding of ECQP.

#ifndef ECQP_BOUNDS_HPP_
#define ECQP_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecqp/error.hpp"
#include "ecqp/facered.hpp"
#include "ecqp/rounding.hpp"

namespace ecqp {

struct BoundReport {
  int m = 1;
  int n = 1;
  double gamma = 0.0;
  std::vector<int> ranks;  // rank((F^k)^T F^k)
  int r0 = 1;
  int r_tilde = 1;         // min(r0, n + 1)
  double tseng = 1.0;      // (1-g)^2/(sqrt(m)+g)^2
  double new_ratio = 1.0;  // (1-g)^2/(sqrt(r_tilde)+g)^2
  int mu = 1;              // min(m + 1, max rank)
  int mu_bar = 1;          // min(r0 + 1, max rank)
  int r_bar = 1;           // min(r0, max rank)
  // Ratios derived from logarithmic bounds; empty when the log argument is
  // not above 1.
  std::optional<double> nv;           // 1/(2 ln(2(m+1) mu))
  std::optional<double> nv_improved;  // 1/(2 ln(2(m+1) mu_bar))
  std::optional<double> ye;           // (1-g)^2/(4 ln(4 m n maxrank))
  std::optional<double> ye_improved;  // (1-g)^2/(4 ln(4 m r_tilde r_bar))
  // The expected-value bound behind `ye` is known to need n + 1 in place
  // of n; `ye` is evaluated as printed.
  std::string note = "ye uses n as printed; its source proof supports n+1";
};

namespace detail {

inline std::optional<double> InverseLogRatio(double numerator, double factor, double arg) {
  if (!(arg > 1.0)) return std::nullopt;
  return numerator / (factor * std::log(arg));
}

}  // namespace detail

inline BoundReport BoundValues(int m, int n, double gamma, const std::vector<int>& ranks) {
  if (m < 1 || n < 1) throw InputError("BoundValues: m and n must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InputError("BoundValues: gamma must lie in [0, 1)");
  }
  if (ranks.empty()) throw InputError("BoundValues: ranks must be non-empty");
  for (int r : ranks) {
    if (r < 1) throw InputError("BoundValues: ranks must be >= 1");
  }
  BoundReport rep;
  rep.m = m;
  rep.n = n;
  rep.gamma = gamma;
  rep.ranks = ranks;
  rep.r0 = static_cast<int>(RankBound(m));
  rep.r_tilde = std::min(rep.r0, n + 1);
  rep.tseng = ApproximationRatio(gamma, m);
  rep.new_ratio = ApproximationRatio(gamma, rep.r_tilde);
  const int max_rank = *std::max_element(ranks.begin(), ranks.end());
  rep.mu = std::min(m + 1, max_rank);
  rep.mu_bar = std::min(rep.r0 + 1, max_rank);
  rep.r_bar = std::min(rep.r0, max_rank);
  const double one_minus = (1.0 - gamma) * (1.0 - gamma);
  const double md = m;
  rep.nv = detail::InverseLogRatio(1.0, 2.0, 2.0 * (md + 1.0) * rep.mu);
  rep.nv_improved = detail::InverseLogRatio(1.0, 2.0, 2.0 * (md + 1.0) * rep.mu_bar);
  rep.ye = detail::InverseLogRatio(one_minus, 4.0, 4.0 * md * n * max_rank);
  rep.ye_improved =
      detail::InverseLogRatio(one_minus, 4.0, 4.0 * md * rep.r_tilde * rep.r_bar);
  return rep;
}

enum class MuRule { kMPlusOne, kN, kRanks };

inline std::string ToString(MuRule r) {
  switch (r) {
    case MuRule::kMPlusOne: return "m-plus-1";
    case MuRule::kN: return "n";
    case MuRule::kRanks: return "ranks";
  }
  return "unknown";
}

inline MuRule MuRuleFromString(const std::string& s) {
  if (s == "m-plus-1") return MuRule::kMPlusOne;
  if (s == "n") return MuRule::kN;
  if (s == "ranks") return MuRule::kRanks;
  throw InputError("unknown mu rule '" + s + "' (expected m-plus-1, n or ranks)");
}

struct CrossoverRow {
  int m = 0;
  int r0 = 0;
  int mu = 0;
  double new_ratio = 0.0;
  double nv = 0.0;
  bool improves = false;  // new_ratio > nv
};

struct CrossoverTable {
  MuRule rule = MuRule::kMPlusOne;
  std::vector<CrossoverRow> rows;
  // Largest m such that new_ratio > nv for every 3 <= m' <= m; 2 if it
  // already fails at m = 3.
  int crossover = 2;
  // First m >= 3 where the improvement fails; 0 if none up to m_max.
  int first_failure = 0;
};

/// Compares new_ratio with nv for m = 1..m_max with r_tilde = r0 (n large).
/// `n` and `max_rank` feed the kN and kRanks rules: mu = min(m+1, n) or
/// min(m+1, max_rank).
inline CrossoverTable CrossoverSweep(int m_max, double gamma = 0.0,
                                     MuRule rule = MuRule::kMPlusOne, int n = 0,
                                     int max_rank = 0) {
  if (m_max < 2) throw InputError("CrossoverSweep: m_max must be >= 2");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("CrossoverSweep: gamma must lie in [0, 1)");
  if (rule == MuRule::kN && n < 1) throw InputError("CrossoverSweep: rule n needs n >= 1");
  if (rule == MuRule::kRanks && max_rank < 1) {
    throw InputError("CrossoverSweep: rule ranks needs max_rank >= 1");
  }
  CrossoverTable table;
  table.rule = rule;
  bool broken = false;
  for (int m = 1; m <= m_max; ++m) {
    CrossoverRow row;
    row.m = m;
    row.r0 = static_cast<int>(RankBound(m));
    switch (rule) {
      case MuRule::kMPlusOne: row.mu = m + 1; break;
      case MuRule::kN: row.mu = std::min(m + 1, n); break;
      case MuRule::kRanks: row.mu = std::min(m + 1, max_rank); break;
    }
    row.new_ratio = ApproximationRatio(gamma, row.r0);
    row.nv = 1.0 / (2.0 * std::log(2.0 * (m + 1.0) * row.mu));
    row.improves = row.new_ratio > row.nv;
    if (m >= 3 && !broken) {
      if (row.improves) {
        table.crossover = m;
      } else {
        broken = true;
        table.first_failure = m;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

inline void WriteBoundsCsvHeader(std::ostream& os) {
  os << "m,r0,tseng,new,nv,nv_improved,ye_improved\n";
}

inline void WriteBoundsCsvRow(std::ostream& os, const BoundReport& r) {
  auto field = [&os](const std::optional<double>& v) {
    if (v) {
      os << *v;
    } else {
      os << "NA";
    }
  };
  os << r.m << ',' << r.r0 << ',' << r.tseng << ',' << r.new_ratio << ',';
  field(r.nv);
  os << ',';
  field(r.nv_improved);
  os << ',';
  field(r.ye_improved);
  os << '\n';
}

}  // namespace ecqp

#endif  // ECQP_BOUNDS_HPP_
