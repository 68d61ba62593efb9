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

// ecqp: command-line front end.
//
// Exit codes: 0 success, 1 invariant or certificate failure, 2 input error,
// 3 solver failure.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ecqp/asqp.hpp"
#include "ecqp/bounds.hpp"
#include "ecqp/json_io.hpp"
#include "ecqp/oracle.hpp"
#include "ecqp/pipeline.hpp"
#include "ecqp/report.hpp"

namespace {

using namespace ecqp;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Flags {
  std::string in;
  std::string out;
  std::string solution;
  std::uint64_t seed = 1;
  int n = 3;
  int m = 2;
  double gamma_max = 0.5;
  bool ball = false;
  double gap_tol = 1e-8;
  double cert_tol = 1e-6;
  int budget = 200;
  std::string mu = "m-plus-1";
  std::string format = "json";
  std::string table_format = "csv";
  std::string m_range = "1..10";
  int m_max = 1000;
  double gamma = 0.0;
  int max_rank = 0;
  int count = 10;
  bool timings = false;
};

PipelineOptions MakeOptions(const Flags& f) {
  PipelineOptions o;
  o.sdp.gap_tol = f.gap_tol;
  o.rounding.cert_abs_tol = f.cert_tol;
  o.rounding.cert_rel_tol = f.cert_tol;
  return o;
}

EcqpInstance LoadOrGenerate(const Flags& f) {
  if (!f.in.empty()) return InstanceFromJson(ReadJson(f.in));
  RandomSpec spec;
  spec.gamma_max = f.gamma_max;
  spec.ball = f.ball;
  return RandomInstance(f.seed, f.n, f.m, spec);
}

std::pair<int, int> ParseRange(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw InputError("bad range '" + s + "' (expected a or a..b)");
  }
}

void WriteText(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

void RequireFormat(const Flags& f) {
  if (f.format != "json" && f.format != "csv") {
    throw InputError("--format must be json or csv");
  }
}

int CmdGen(const Flags& f) {
  WriteJson(ToJson(LoadOrGenerate(f)), f.out);
  return kExitOk;
}

int CmdSolve(const Flags& f) {
  const EcqpInstance inst = LoadOrGenerate(f);
  const SdpSolution sol = SolveRelaxation(inst, MakeOptions(f).sdp);
  WriteJson(ToJson(sol), f.out);
  return sol.status == SdpStatus::kOptimal ? kExitOk : kExitSolver;
}

int CmdRound(const Flags& f) {
  const EcqpInstance inst = LoadOrGenerate(f);
  const PipelineOptions opts = MakeOptions(f);
  RoundingCertificate cert;
  try {
    if (!f.solution.empty()) {
      const ConicProgram p = BuildRelaxation(Homogenize(inst));
      const SdpSolution sol = SolutionFromJson(ReadJson(f.solution), inst);
      if (sol.status != SdpStatus::kOptimal) {
        throw NumericalError("imported solution has status " + ToString(sol.status));
      }
      cert = RoundSolution(inst, ReduceRank(sol, p, opts.reduction), opts.rounding);
    } else {
      cert = RunPipeline(inst, opts).certificate;
    }
  } catch (const CertificateViolation& e) {
    WriteJson(ToJson(e.certificate()), f.out);
    std::cerr << "ecqp: " << e.what() << "\n";
    return kExitInvariant;
  }
  WriteJson(ToJson(cert), f.out);
  return kExitOk;
}

AsqpInstance RandomAsqp(std::uint64_t seed, int n) {
  if (n < 2) throw InputError("ASQP: n must be >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int nn = n * n;
  Matrix M(nn, nn);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) M(i, j) = normal(rng);
  AsqpInstance a;
  a.n = n;
  a.A = SymMatrix::Symmetrized(M);
  a.b = Vector(nn);
  for (int i = 0; i < nn; ++i) a.b(i) = normal(rng);
  return a;
}

int CmdAsqp(const Flags& f) {
  const AsqpInstance a = !f.in.empty() ? AsqpFromJson(ReadJson(f.in)) : RandomAsqp(f.seed, f.n);
  const AsqpResult r = SolveAsqp(a, MakeOptions(f));
  Json j = ToJson(r);
  bool ok = r.guarantee_holds;
  if (a.n <= 6) {
    OracleBudget budget;
    budget.starts = f.budget;
    const PolytopeExtrema ex = EstimatePolytopeExtrema(a, f.seed, budget);
    const AsqpQuality q = QualityMetrics(r.f_x, ex.p_lower, ex.p_upper, a.n, f.cert_tol);
    j["quality"] = {{"p_lower", ex.p_lower},
                    {"p_upper", ex.p_upper},
                    {"extrema_exact", ex.is_exact},
                    {"epsilon", q.epsilon},
                    {"one_minus_g", 1.0 - q.g_n},
                    {"within_guarantee", q.within_guarantee},
                    {"g_exceeds_inverse_cube", q.g_exceeds_inverse_cube},
                    {"improves_fu", q.improves_fu}};
    ok = ok && q.within_guarantee;
  }
  WriteJson(j, f.out);
  return ok ? kExitOk : kExitInvariant;
}

int CmdBoundsTable(Flags f) {
  f.format = f.table_format;
  RequireFormat(f);
  const auto [lo, hi] = ParseRange(f.m_range);
  if (lo < 1 || hi < lo) throw InputError("--m range must satisfy 1 <= a <= b");
  const int max_rank = f.max_rank > 0 ? f.max_rank : f.n;
  std::ostringstream os;
  os << std::setprecision(17);
  Json rows = Json::array();
  if (f.format == "csv") WriteBoundsCsvHeader(os);
  for (int m = lo; m <= hi; ++m) {
    const BoundReport r = BoundValues(m, f.n, f.gamma, std::vector<int>{max_rank});
    if (f.format == "csv") {
      WriteBoundsCsvRow(os, r);
    } else {
      auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
      rows.push_back({{"m", r.m},
                      {"r0", r.r0},
                      {"r_tilde", r.r_tilde},
                      {"tseng", r.tseng},
                      {"new", r.new_ratio},
                      {"nv", opt(r.nv)},
                      {"nv_improved", opt(r.nv_improved)},
                      {"ye", opt(r.ye)},
                      {"ye_improved", opt(r.ye_improved)},
                      {"note", r.note}});
    }
  }
  if (f.format == "csv") {
    WriteText(os.str(), f.out);
  } else {
    WriteJson(rows, f.out);
  }
  return kExitOk;
}

int CmdCrossover(const Flags& f) {
  RequireFormat(f);
  const MuRule rule = MuRuleFromString(f.mu);
  const CrossoverTable t = CrossoverSweep(f.m_max, f.gamma, rule, f.n, f.max_rank);
  if (f.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(17) << "m,r0,mu,new,nv,improves\n";
    for (const auto& r : t.rows) {
      os << r.m << ',' << r.r0 << ',' << r.mu << ',' << r.new_ratio << ',' << r.nv << ','
         << (r.improves ? 1 : 0) << '\n';
    }
    WriteText(os.str(), f.out);
  } else {
    WriteJson({{"mu", ToString(t.rule)},
               {"gamma", f.gamma},
               {"m_max", f.m_max},
               {"crossover", t.crossover},
               {"first_failure", t.first_failure}},
              f.out);
  }
  std::cerr << "crossover (mu = " << ToString(t.rule) << "): m = " << t.crossover << "\n";
  return kExitOk;
}

std::optional<OracleBudget> BudgetFrom(const Flags& f) {
  if (f.budget <= 0) return std::nullopt;
  OracleBudget b;
  b.starts = f.budget;
  return b;
}

int CmdVerify(const Flags& f) {
  const EcqpInstance inst = LoadOrGenerate(f);
  const RunReport rep = MakeRunReport(inst, MakeOptions(f), BudgetFrom(f), f.seed);
  WriteJson(ToJson(rep, f.timings), f.out);
  if (!rep.error.empty()) std::cerr << "ecqp: " << rep.error << "\n";
  return rep.flags.all() ? kExitOk : kExitInvariant;
}

int ThreadCount() {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("ECQP_THREADS")) {
    try {
      threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw InputError("ECQP_THREADS must be a positive integer");
    }
  }
  return threads;
}

int CmdBench(const Flags& f) {
  RequireFormat(f);
  if (f.count < 1) throw InputError("--count must be >= 1");
  const PipelineOptions opts = MakeOptions(f);
  const std::optional<OracleBudget> budget = BudgetFrom(f);
  std::vector<RunReport> reports(static_cast<std::size_t>(f.count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < f.count; i = next++) {
      Flags g = f;
      g.seed = f.seed + static_cast<std::uint64_t>(i);
      reports[static_cast<std::size_t>(i)] = MakeRunReport(LoadOrGenerate(g), opts, budget, g.seed);
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min(ThreadCount(), f.count);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool ok = true;
  for (const auto& r : reports) ok = ok && r.flags.all();
  if (f.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(17)
       << "seed,digest,n,m,v_sdp,f_x,bound,rank_before,rank_after,solve_s,reduce_s,round_s,ok\n";
    for (int i = 0; i < f.count; ++i) {
      const RunReport& r = reports[static_cast<std::size_t>(i)];
      os << f.seed + static_cast<std::uint64_t>(i) << ',' << r.digest << ',' << r.n << ',' << r.m
         << ',' << r.v_sdp << ',' << r.certificate.f_x << ',' << r.certificate.bound << ','
         << r.rank_before << ',' << r.rank_after << ',' << r.times.solve_s << ','
         << r.times.reduce_s << ',' << r.times.round_s << ',' << (r.flags.all() ? 1 : 0) << '\n';
    }
    WriteText(os.str(), f.out);
  } else {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(ToJson(r, true));
    WriteJson(arr, f.out);
  }
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECQP semidefinite relaxation, rank reduction and rounding"};
  app.require_subcommand(1);
  Flags f;

  auto add_instance = [&f](CLI::App* c) {
    c->add_option("--in", f.in, "instance JSON (otherwise a random instance)");
    c->add_option("--seed", f.seed, "random seed")->capture_default_str();
    c->add_option("--n", f.n, "dimension")->capture_default_str();
    c->add_option("--m", f.m, "number of ellipsoids")->capture_default_str();
    c->add_option("--gamma-max", f.gamma_max, "upper bound on ||g^k||")->capture_default_str();
    c->add_flag("--ball", f.ball, "trust-region instances: F^k = I, g^k = 0");
  };
  auto add_solver = [&f](CLI::App* c) {
    c->add_option("--gap-tol", f.gap_tol, "relative duality gap target")->capture_default_str();
    c->add_option("--cert-tol", f.cert_tol, "certificate tolerance (absolute and relative)")
        ->capture_default_str();
  };
  auto add_out = [&f](CLI::App* c) { c->add_option("--out", f.out, "output file (default stdout)"); };

  CLI::App* gen = app.add_subcommand("gen", "write a random instance");
  add_instance(gen);
  add_out(gen);

  CLI::App* solve = app.add_subcommand("solve", "solve the semidefinite relaxation");
  add_instance(solve);
  add_solver(solve);
  add_out(solve);

  CLI::App* round = app.add_subcommand("round", "full pipeline with certificate");
  add_instance(round);
  add_solver(round);
  add_out(round);
  round->add_option("--solution", f.solution, "round an imported solution JSON instead of solving");

  CLI::App* asqp = app.add_subcommand("asqp", "quadratic program over doubly stochastic matrices");
  asqp->add_option("--in", f.in, "ASQP JSON (otherwise random with --n, --seed)");
  asqp->add_option("--seed", f.seed, "random seed")->capture_default_str();
  asqp->add_option("--n", f.n, "assignment size")->capture_default_str();
  asqp->add_option("--budget", f.budget, "random starts for the extrema estimate")
      ->capture_default_str();
  add_solver(asqp);
  add_out(asqp);

  CLI::App* bounds = app.add_subcommand("bounds-table", "approximation bounds over a range of m");
  bounds->add_option("--m", f.m_range, "range a..b")->capture_default_str();
  bounds->add_option("--gamma", f.gamma, "gamma")->capture_default_str();
  bounds->add_option("--n", f.n, "dimension")->capture_default_str();
  bounds->add_option("--max-rank", f.max_rank, "max rank of (F^k)^T F^k (default n)");
  bounds->add_option("--format", f.table_format, "csv or json")->capture_default_str();
  add_out(bounds);

  CLI::App* cross = app.add_subcommand("crossover", "sweep m until the new ratio stops improving");
  cross->add_option("--mu", f.mu, "m-plus-1, n or ranks")->capture_default_str();
  cross->add_option("--m", f.m_max, "largest m")->capture_default_str();
  cross->add_option("--gamma", f.gamma, "gamma")->capture_default_str();
  cross->add_option("--n", f.n, "dimension for --mu n")->capture_default_str();
  cross->add_option("--max-rank", f.max_rank, "max rank for --mu ranks");
  cross->add_option("--format", f.format, "json or csv")->capture_default_str();
  add_out(cross);

  CLI::App* verify = app.add_subcommand("verify", "pipeline, oracle and invariant flags");
  add_instance(verify);
  add_solver(verify);
  add_out(verify);
  verify->add_option("--budget", f.budget, "oracle starts (0 disables the oracle)")
      ->capture_default_str();
  verify->add_flag("--timings", f.timings, "include wall times");

  CLI::App* bench = app.add_subcommand("bench", "batch of seeded instances");
  bench->add_option("--seed", f.seed, "first seed")->capture_default_str();
  bench->add_option("--count", f.count, "number of instances")->capture_default_str();
  bench->add_option("--n", f.n, "dimension")->capture_default_str();
  bench->add_option("--m", f.m, "number of ellipsoids")->capture_default_str();
  bench->add_option("--gamma-max", f.gamma_max, "upper bound on ||g^k||")->capture_default_str();
  bench->add_flag("--ball", f.ball, "trust-region instances");
  bench->add_option("--budget", f.budget, "oracle starts (0 disables the oracle)")
      ->capture_default_str();
  bench->add_option("--format", f.format, "json or csv")->capture_default_str();
  add_solver(bench);
  add_out(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return CmdGen(f);
    if (*solve) return CmdSolve(f);
    if (*round) return CmdRound(f);
    if (*asqp) return CmdAsqp(f);
    if (*bounds) return CmdBoundsTable(f);
    if (*cross) return CmdCrossover(f);
    if (*verify) return CmdVerify(f);
    if (*bench) return CmdBench(f);
  } catch (const Error& e) {
    std::cerr << "ecqp: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kInput: return kExitInput;
      case ErrorKind::kNumerical: return kExitSolver;
      case ErrorKind::kInvariant: return kExitInvariant;
    }
  }
  return kExitInput;
}
