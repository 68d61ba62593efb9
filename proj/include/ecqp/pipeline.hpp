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

#ifndef ECQP_PIPELINE_HPP_
#define ECQP_PIPELINE_HPP_

#include <chrono>

#include "ecqp/facered.hpp"
#include "ecqp/model.hpp"
#include "ecqp/rounding.hpp"
#include "ecqp/sdp.hpp"

namespace ecqp {

struct PipelineOptions {
  SdpOptions sdp;
  FaceReductionOptions reduction;
  RoundingOptions rounding;
};

struct StageTimes {
  double solve_s = 0.0;
  double reduce_s = 0.0;
  double round_s = 0.0;
};

struct PipelineResult {
  ConicProgram program;
  SdpSolution relaxed;   // as returned by the solver
  SdpSolution reduced;   // rank <= r0
  FaceReductionTrace reduction;
  RoundingCertificate certificate;
  RankOneDecomposition decomposition;  // of the reduced solution against B*
  StageTimes times;
};

/// Relax, solve, reduce rank and round. Throws NumericalError if the solver
/// does not reach optimal status, CertificateViolation if rounding fails
/// its certificate.
inline PipelineResult RunPipeline(const EcqpInstance& inst, const PipelineOptions& opts = {}) {
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  RequireValid(inst);
  PipelineResult res;
  auto t0 = Clock::now();
  res.program = BuildRelaxation(Homogenize(inst));
  res.relaxed = SolveSdp(res.program, opts.sdp);
  auto t1 = Clock::now();
  res.times.solve_s = seconds(t0, t1);
  if (res.relaxed.status != SdpStatus::kOptimal) {
    throw NumericalError("SDP solver stopped with status " + ToString(res.relaxed.status));
  }
  res.reduced = ReduceRank(res.relaxed, res.program, opts.reduction, &res.reduction);
  auto t2 = Clock::now();
  res.times.reduce_s = seconds(t1, t2);
  res.certificate = RoundSolution(inst, res.reduced, opts.rounding, &res.decomposition);
  res.times.round_s = seconds(t2, Clock::now());
  return res;
}

}  // namespace ecqp

#endif  // ECQP_PIPELINE_HPP_
