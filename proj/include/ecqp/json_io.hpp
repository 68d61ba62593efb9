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

// JSON readers and writers for instances, relaxation solutions,
// certificates and ASQP runs. Matrices are arrays of rows.

#ifndef ECQP_JSON_IO_HPP_
#define ECQP_JSON_IO_HPP_

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ecqp/asqp.hpp"
#include "ecqp/model.hpp"
#include "ecqp/rounding.hpp"
#include "ecqp/sdp.hpp"
#include "json.hpp"

namespace ecqp {

using Json = nlohmann::json;

inline constexpr double kJsonSymmetryTol = 1e-12;

inline Json ToJson(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json ToJson(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(std::move(row));
  }
  return j;
}

namespace detail {

inline const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("JSON: missing field '") + key + "'");
  }
  return j.at(key);
}

inline double Number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("JSON: '") + what + "' must be a number");
  return j.get<double>();
}

inline int Integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string("JSON: '") + what + "' must be an integer");
  return j.get<int>();
}

}  // namespace detail

inline Vector VectorFromJson(const Json& j, const char* what = "vector") {
  if (!j.is_array()) throw InputError(std::string("JSON: '") + what + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::Number(j[i], what);
  return v;
}

/// `cols` is used for empty row lists, where the width cannot be read.
inline Matrix MatrixFromJson(const Json& j, const char* what = "matrix", Eigen::Index cols = -1) {
  if (!j.is_array()) throw InputError(std::string("JSON: '") + what + "' must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, std::max<Eigen::Index>(cols, 0));
  if (!j[0].is_array()) throw InputError(std::string("JSON: '") + what + "' rows must be arrays");
  const Eigen::Index width = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, width);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != width) {
      throw InputError(std::string("JSON: '") + what + "' is ragged");
    }
    for (Eigen::Index k = 0; k < width; ++k) m(i, k) = detail::Number(row[static_cast<std::size_t>(k)], what);
  }
  return m;
}

inline Json ToJson(const EcqpInstance& inst) {
  Json j;
  j["n"] = inst.n();
  j["m"] = inst.m();
  j["A"] = ToJson(inst.A.matrix());
  j["b"] = ToJson(inst.b);
  Json ells = Json::array();
  for (const auto& e : inst.ellipsoids) ells.push_back({{"F", ToJson(e.F)}, {"g", ToJson(e.g)}});
  j["ellipsoids"] = std::move(ells);
  j["offset"] = inst.offset;
  return j;
}

inline EcqpInstance InstanceFromJson(const Json& j) {
  EcqpInstance inst;
  const int n = detail::Integer(detail::Field(j, "n"), "n");
  if (n < 1) throw InputError("JSON: n must be >= 1");
  inst.A = SymMatrix::FromMatrix(MatrixFromJson(detail::Field(j, "A"), "A"), kJsonSymmetryTol);
  inst.b = VectorFromJson(detail::Field(j, "b"), "b");
  const Json& ells = detail::Field(j, "ellipsoids");
  if (!ells.is_array()) throw InputError("JSON: 'ellipsoids' must be an array");
  for (const Json& e : ells) {
    Ellipsoid el;
    el.F = MatrixFromJson(detail::Field(e, "F"), "F", n);
    el.g = VectorFromJson(detail::Field(e, "g"), "g");
    inst.ellipsoids.push_back(std::move(el));
  }
  if (j.contains("offset")) inst.offset = detail::Number(j.at("offset"), "offset");
  if (inst.n() != n) throw InputError("JSON: 'n' does not match the size of A");
  if (j.contains("m") && detail::Integer(j.at("m"), "m") != inst.m()) {
    throw InputError("JSON: 'm' does not match the number of ellipsoids");
  }
  RequireValid(inst);
  return inst;
}

inline Json ToJson(const SdpSolution& sol) {
  Json j;
  j["X"] = ToJson(sol.X.matrix());
  j["v_sdp"] = sol.v_sdp;
  j["gap"] = sol.gap;
  j["status"] = ToString(sol.status);
  j["rank"] = sol.rank;
  j["dual_objective"] = sol.dual_objective;
  j["primal_residual"] = sol.primal_residual;
  j["dual_residual"] = sol.dual_residual;
  j["complementarity"] = sol.complementarity;
  j["iterations"] = sol.iterations;
  return j;
}

/// Imports a solution for `inst`. Only X, gap and status are read; the
/// remaining fields are recomputed from X.
inline SdpSolution SolutionFromJson(const Json& j, const EcqpInstance& inst) {
  const ConicProgram p = BuildRelaxation(Homogenize(inst));
  const SymMatrix X = SymMatrix::FromMatrix(MatrixFromJson(detail::Field(j, "X"), "X"), 1e-9);
  const SdpStatus status = SdpStatusFromString(detail::Field(j, "status").get<std::string>());
  const double gap = detail::Number(detail::Field(j, "gap"), "gap");
  return SolutionFromPrimal(p, X, status, gap);
}

inline Json ToJson(const RoundingCertificate& c) {
  Json j;
  j["x"] = ToJson(c.x);
  j["x_bar"] = ToJson(c.x_bar);
  j["tau_bar"] = c.tau_bar;
  j["tau_lower_bound"] = c.tau_lower_bound;
  j["gamma"] = c.gamma;
  j["m"] = c.m;
  j["n"] = c.n;
  j["r0"] = c.r0;
  j["r_used"] = c.r_used;
  j["r_tilde"] = c.r_tilde;
  j["ratio"] = c.ratio;
  j["v_sdp"] = c.v_sdp;
  j["v_bstar"] = c.v_bstar;
  j["f_x"] = c.f_x;
  j["bound"] = c.bound;
  j["cert_tol"] = c.cert_tol;
  j["residuals"] = ToJson(c.residuals);
  j["max_residual"] = c.max_residual;
  j["selected_index"] = c.selected_index;
  j["selected_value"] = c.selected_value;
  j["trivial"] = c.trivial;
  j["holds"] = c.holds();
  return j;
}

inline Json ToJson(const AsqpInstance& a) {
  return {{"n", a.n}, {"A", ToJson(a.A.matrix())}, {"b", ToJson(a.b)}};
}

inline AsqpInstance AsqpFromJson(const Json& j) {
  AsqpInstance a;
  a.n = detail::Integer(detail::Field(j, "n"), "n");
  a.A = SymMatrix::FromMatrix(MatrixFromJson(detail::Field(j, "A"), "A"), kJsonSymmetryTol);
  a.b = VectorFromJson(detail::Field(j, "b"), "b");
  RequireValid(a);
  return a;
}

inline Json ToJson(const AsqpResult& r) {
  Json j;
  j["n"] = r.n;
  j["x"] = ToJson(r.x);
  j["y"] = ToJson(r.y);
  j["f_x"] = r.f_x;
  j["h0"] = r.h0;
  j["v_sdp_shifted"] = r.v_sdp_shifted;
  j["g_n"] = r.g_n;
  j["fu_bound"] = r.fu_bound;
  j["guarantee_rhs"] = r.guarantee_rhs;
  j["guarantee_holds"] = r.guarantee_holds;
  j["max_sum_error"] = r.max_sum_error;
  j["min_entry"] = r.min_entry;
  j["max_entry"] = r.max_entry;
  j["certificate"] = ToJson(r.pipeline.certificate);
  return j;
}

inline Json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

/// Writes to `path`, or to stdout when `path` is empty or "-".
inline void WriteJson(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

}  // namespace ecqp

#endif  // ECQP_JSON_IO_HPP_
