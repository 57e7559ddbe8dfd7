#pragma once

// JSON round-tripping for algebras, elements, states, sum elements,
// witnesses and SDP problems. Doubles are written with enough digits to
// round-trip exactly.

#include "opsys/opsys.hpp"

#include <json.hpp>

namespace opsys::io {

using json = nlohmann::json;

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      m(r, c) = e.is_number() ? cplx(e.get<double>(), 0.0) : cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline json to_json(const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline RVector vector_from_json(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json blocks_to_json(const std::vector<CMatrix>& bl) {
  json out = json::array();
  for (const auto& b : bl) out.push_back(to_json(b));
  return out;
}

inline std::vector<CMatrix> blocks_from_json(const json& j) {
  std::vector<CMatrix> out;
  for (const auto& b : j) out.push_back(matrix_from_json(b));
  return out;
}

inline json to_json(const FdAlgebra& a) { return {{"block_sizes", a.block_sizes()}, {"label", a.label()}}; }

inline FdAlgebra algebra_from_json(const json& j) {
  if (j.is_array()) return build_algebra(j.get<std::vector<int>>());
  auto sizes = j.at("block_sizes").get<std::vector<int>>();
  if (j.contains("label")) return FdAlgebra(sizes, j["label"].get<std::string>());
  return build_algebra(sizes);
}

inline json to_json(const AlgElement& x) {
  return {{"algebra", to_json(x.algebra)}, {"level", x.level}, {"blocks", blocks_to_json(x.blocks)}};
}

inline AlgElement element_from_json(const json& j) {
  return AlgElement(algebra_from_json(j.at("algebra")), j.value("level", 1), blocks_from_json(j.at("blocks")));
}

/// States carry their tensor factors; "level" is k for states on M_k ⊗ A.
inline json to_json(const State& s) {
  json factors = json::array();
  for (const auto& f : s.algebra.factors()) factors.push_back(to_json(f));
  const auto& f0 = s.algebra.factor(0);
  const int level = s.algebra.num_factors() == 2 && f0.num_blocks() == 1 ? f0.block_size(0) : 1;
  return {{"algebra", s.algebra.combined().label()},
          {"factors", factors},
          {"level", level},
          {"blocks", blocks_to_json(s.blocks)}};
}

inline State state_from_json(const json& j) {
  std::vector<FdAlgebra> fs;
  for (const auto& f : j.at("factors")) fs.push_back(algebra_from_json(f));
  return State(TensorAlgebra(fs), blocks_from_json(j.at("blocks")));
}

inline json to_json(const SumElement& x) { return {{"level", x.level}, {"a", to_json(x.a)}, {"b", to_json(x.b)}}; }

inline SumElement sum_from_json(const json& j) {
  SumElement x(element_from_json(j.at("a")), element_from_json(j.at("b")));
  if (j.contains("level") && j["level"].get<int>() != x.level)
    throw std::invalid_argument("sum element: level does not match components");
  return x;
}

inline json to_json(const CompatiblePair& p) {
  return {{"alpha", to_json(p.alpha)}, {"beta", to_json(p.beta)}, {"marginal_gap", p.marginal_gap}};
}

inline CompatiblePair pair_from_json(const json& j) {
  return make_pair(state_from_json(j.at("alpha")), state_from_json(j.at("beta")));
}

inline json to_json(const TensorCertificate& c) {
  return {{"observable", to_json(c.observable)}, {"violation", c.violation}, {"min_eigenvalue", c.min_eigenvalue}};
}

inline json to_json(const TensorCompatibility& t) {
  json j = {{"verdict", to_string(t.verdict)}, {"marginal_gap", t.marginal_gap}, {"detail", t.detail}};
  if (t.joint) j["joint"] = to_json(*t.joint);
  if (t.certificate) j["certificate"] = to_json(*t.certificate);
  return j;
}

inline json to_json(const SeparatingResult& s) {
  return {{"element", to_json(s.element)}, {"value", s.value}, {"min_eigenvalue", s.min_eigenvalue}};
}

inline json to_json(const MonogamyWitness& w) {
  return {{"pair", to_json(w.pair)}, {"marginal", to_json(w.marginal)}, {"separating", to_json(w.separating)}};
}

inline json to_json(const sdp::InfeasibilityCertificate& c) {
  return {{"lmi_duals", blocks_to_json(c.lmi_duals)},
          {"eq_multipliers", to_json(c.eq_multipliers)},
          {"value", c.value},
          {"stationarity_residual", c.stationarity_residual},
          {"margin", c.margin}};
}

inline sdp::InfeasibilityCertificate certificate_from_json(const json& j) {
  sdp::InfeasibilityCertificate c;
  c.lmi_duals = blocks_from_json(j.at("lmi_duals"));
  c.eq_multipliers = vector_from_json(j.at("eq_multipliers"));
  c.value = j.value("value", 0.0);
  c.stationarity_residual = j.value("stationarity_residual", 0.0);
  c.margin = j.value("margin", 0.0);
  return c;
}

inline json to_json(const sdp::SdpProblem& p) {
  json lmis = json::array();
  for (const auto& l : p.lmis()) {
    json terms = json::array();
    for (const auto& [v, m] : l.expr.terms) terms.push_back({{"var", v}, {"coef", to_json(m)}});
    lmis.push_back({{"name", l.name}, {"constant", to_json(l.expr.constant)}, {"terms", terms}});
  }
  json eqs = json::array();
  for (const auto& e : p.equalities()) eqs.push_back({{"coeffs", e.coeffs}, {"rhs", e.rhs}});
  json j = {{"num_vars", p.num_vars()}, {"lmis", lmis}, {"equalities", eqs}};
  j["objective"] = p.has_objective() ? to_json(p.objective()) : json(nullptr);
  j["objective_constant"] = p.objective_constant();
  return j;
}

inline sdp::SdpProblem problem_from_json(const json& j) {
  sdp::SdpProblem p;
  p.set_num_vars(j.at("num_vars").get<int>());
  for (const auto& l : j.at("lmis")) {
    sdp::AffineMatrix e(matrix_from_json(l.at("constant")));
    for (const auto& t : l.at("terms")) e.terms.emplace_back(t.at("var").get<int>(), matrix_from_json(t.at("coef")));
    p.add_lmi(std::move(e), l.value("name", ""));
  }
  for (const auto& e : j.at("equalities"))
    p.add_equality(e.at("coeffs").get<std::vector<std::pair<int, double>>>(), e.at("rhs").get<double>());
  if (j.contains("objective") && !j["objective"].is_null())
    p.set_objective_vector(vector_from_json(j["objective"]), j.value("objective_constant", 0.0));
  return p;
}

inline json to_json(const sdp::SdpResult& r) {
  json j = {{"status", sdp::to_string(r.status)},
            {"x", to_json(r.x)},
            {"objective_value", r.objective_value},
            {"primal_residual", r.primal_residual},
            {"dual_residual", r.dual_residual},
            {"gap", r.gap},
            {"min_slack_eigenvalue", r.min_slack_eigenvalue},
            {"iterations", r.iterations},
            {"detail", r.detail}};
  if (r.feasibility_margin) j["feasibility_margin"] = *r.feasibility_margin;
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

}  // namespace opsys::io
