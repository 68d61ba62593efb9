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

// End-to-end run reports: pipeline, optional oracle and invariant flags.

#ifndef ECQP_REPORT_HPP_
#define ECQP_REPORT_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "ecqp/json_io.hpp"
#include "ecqp/oracle.hpp"
#include "ecqp/pipeline.hpp"

namespace ecqp {

/// 64-bit FNV-1a.
inline std::uint64_t Fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Digest of the canonical (compact) JSON form of an instance, as 16 hex digits.
inline std::string InstanceDigest(const EcqpInstance& inst) {
  static const char* kHex = "0123456789abcdef";
  std::uint64_t h = Fnv1a(ToJson(inst).dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

struct RunFlags {
  bool sdp_optimal = false;
  bool gap_ok = false;             // gap <= gap_tol
  bool rank_ok = false;            // rank after reduction <= r0
  bool objective_drift_ok = false; // <= 1e-7 (1 + |v_sdp|)
  bool constraint_drift_ok = false;  // <= 1e-8
  bool certificate_holds = false;
  bool oracle_sandwich = true;     // v_sdp - 1e-6 <= oracle <= f(x) + 1e-9, when run

  bool all() const {
    return sdp_optimal && gap_ok && rank_ok && objective_drift_ok && constraint_drift_ok &&
           certificate_holds && oracle_sandwich;
  }
};

struct RunReport {
  std::string digest;
  int n = 0;
  int m = 0;
  double v_sdp = 0.0;
  double gap = 0.0;
  int rank_before = 0;
  int rank_after = 0;
  int r0 = 1;
  double objective_drift = 0.0;
  double constraint_drift = 0.0;
  RoundingCertificate certificate;
  std::optional<OracleEstimate> oracle;
  StageTimes times;
  double oracle_s = 0.0;
  RunFlags flags;
  std::string error;  // set when the pipeline threw
};

inline constexpr double kObjectiveDriftTol = 1e-7;
inline constexpr double kConstraintDriftTol = 1e-8;
inline constexpr double kOracleLowerSlack = 1e-6;
inline constexpr double kOracleUpperSlack = 1e-9;

/// Largest change in any constraint value B^k . X and E . X between the
/// relaxed and reduced solutions.
inline double ConstraintDrift(const ConicProgram& p, const SymMatrix& before, const SymMatrix& after) {
  double drift = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    const SymMatrix& c = p.constraint(i);
    drift = std::max(drift, std::abs(Inner(c, after) - Inner(c, before)));
  }
  return drift;
}

/// Runs the pipeline and, when `oracle_budget` is set, the multistart oracle.
/// Pipeline exceptions are recorded in `error` with all flags false.
inline RunReport MakeRunReport(const EcqpInstance& inst, const PipelineOptions& opts,
                               std::optional<OracleBudget> oracle_budget, std::uint64_t seed) {
  RunReport rep;
  rep.digest = InstanceDigest(inst);
  rep.n = inst.n();
  rep.m = inst.m();
  rep.r0 = static_cast<int>(RankBound(rep.m));
  PipelineResult res;
  try {
    res = RunPipeline(inst, opts);
  } catch (const CertificateViolation& e) {
    rep.error = e.what();
    rep.certificate = e.certificate();
    rep.flags.oracle_sandwich = false;
    return rep;
  } catch (const Error& e) {
    rep.error = e.what();
    rep.flags.oracle_sandwich = false;
    return rep;
  }
  rep.v_sdp = res.relaxed.v_sdp;
  rep.gap = res.relaxed.gap;
  rep.rank_before = res.reduction.initial_rank;
  rep.rank_after = res.reduced.rank;
  rep.objective_drift = std::abs(res.reduced.v_sdp - res.relaxed.v_sdp);
  rep.constraint_drift = ConstraintDrift(res.program, res.relaxed.X, res.reduced.X);
  rep.certificate = res.certificate;
  rep.times = res.times;

  rep.flags.sdp_optimal = res.relaxed.status == SdpStatus::kOptimal;
  rep.flags.gap_ok = rep.gap <= opts.sdp.gap_tol;
  rep.flags.rank_ok = rep.rank_after <= rep.r0;
  rep.flags.objective_drift_ok =
      rep.objective_drift <= kObjectiveDriftTol * (1.0 + std::abs(rep.v_sdp));
  rep.flags.constraint_drift_ok = rep.constraint_drift <= kConstraintDriftTol;
  rep.flags.certificate_holds = rep.certificate.holds(opts.rounding.feas_tol);

  if (oracle_budget) {
    const auto t0 = std::chrono::steady_clock::now();
    rep.oracle = BestFeasibleSearch(inst, seed, *oracle_budget);
    rep.oracle_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.flags.oracle_sandwich = rep.v_sdp - kOracleLowerSlack <= rep.oracle->best_value &&
                                rep.oracle->best_value <= rep.certificate.f_x + kOracleUpperSlack;
  }
  return rep;
}

inline Json ToJson(const OracleEstimate& o) {
  return {{"best_value", o.best_value},
          {"best_point", ToJson(o.best_point)},
          {"method", ToString(o.method)},
          {"samples", o.samples},
          {"is_exact", o.is_exact}};
}

inline Json ToJson(const RunFlags& f) {
  return {{"sdp_optimal", f.sdp_optimal},
          {"gap_ok", f.gap_ok},
          {"rank_ok", f.rank_ok},
          {"objective_drift_ok", f.objective_drift_ok},
          {"constraint_drift_ok", f.constraint_drift_ok},
          {"certificate_holds", f.certificate_holds},
          {"oracle_sandwich", f.oracle_sandwich},
          {"all", f.all()}};
}

/// Wall times are omitted unless `with_times`, so that reports of repeated
/// runs compare byte for byte.
inline Json ToJson(const RunReport& r, bool with_times) {
  Json j;
  j["digest"] = r.digest;
  j["n"] = r.n;
  j["m"] = r.m;
  j["v_sdp"] = r.v_sdp;
  j["gap"] = r.gap;
  j["rank_before"] = r.rank_before;
  j["rank_after"] = r.rank_after;
  j["r0"] = r.r0;
  j["objective_drift"] = r.objective_drift;
  j["constraint_drift"] = r.constraint_drift;
  j["certificate"] = ToJson(r.certificate);
  j["oracle"] = r.oracle ? ToJson(*r.oracle) : Json(nullptr);
  if (with_times) {
    j["times"] = {{"solve_s", r.times.solve_s},
                  {"reduce_s", r.times.reduce_s},
                  {"round_s", r.times.round_s},
                  {"oracle_s", r.oracle_s}};
  }
  j["flags"] = ToJson(r.flags);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace ecqp

#endif  // ECQP_REPORT_HPP_
