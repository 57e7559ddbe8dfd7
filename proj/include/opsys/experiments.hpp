#pragma once

// Seeded end-to-end experiments E1-E5 and their reports.
//
//   E1  level-1 agreement of the coproduct and min cones
//   E2  level-2 separation: monogamy witness and separating element
//   E3  graded norm ratio sweep (coproduct vs min, bound 2)
//   E4  marginal infeasibility certificates for monogamy pairs
//   E5  pure-state separability and commutative separability sweeps

#include "opsys/opsys.hpp"
#include "opsys/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <sstream>
#include <string>
#include <vector>

namespace opsys::experiments {

using io::json;

enum class Outcome { Pass = 0, Fail = 1, Indeterminate = 2 };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    default: return "indeterminate";
  }
}

struct ExperimentConfig {
  std::string id = "E1";
  /// Algebra families as block-size lists; pairs for E2/E4 use consecutive
  /// entries of `pairs`.
  std::vector<std::vector<int>> algebras;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  std::vector<int> levels;
  int samples = 0;
  std::uint64_t seed = 42;
  double tol = kCoproductTol;
  double bound = 1.0;
  double max_indeterminate_rate = 0.01;
  std::string out;
};

inline ExperimentConfig default_config(const std::string& id) {
  ExperimentConfig c;
  c.id = id;
  if (id == "E1") {
    c.algebras = {{2}, {2, 1}, {2, 3}};
    c.samples = 500;
  } else if (id == "E2") {
    c.pairs = {{{2}, {2}}};
  } else if (id == "E3") {
    c.levels = {1, 2};
    c.samples = 100;
  } else if (id == "E4") {
    c.pairs = {{{2}, {2}}, {{2, 1}, {2}}, {{2, 3}, {2}}};
    c.samples = 5;
  } else if (id == "E5") {
    c.samples = 100;
  } else {
    throw std::invalid_argument("unknown experiment id " + id);
  }
  return c;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c = default_config(j.value("experiment", j.value("id", std::string("E1"))));
  if (j.contains("algebras")) c.algebras = j["algebras"].get<std::vector<std::vector<int>>>();
  if (j.contains("pairs")) {
    c.pairs.clear();
    for (const auto& p : j["pairs"]) c.pairs.emplace_back(p.at(0).get<std::vector<int>>(), p.at(1).get<std::vector<int>>());
  }
  if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
  c.samples = j.value("samples", c.samples);
  c.seed = j.value("seed", c.seed);
  c.tol = j.value("tol", c.tol);
  c.bound = j.value("bound", c.bound);
  c.max_indeterminate_rate = j.value("max_indeterminate_rate", c.max_indeterminate_rate);
  c.out = j.value("out", c.out);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json pairs = json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back({a, b});
  return {{"experiment", c.id},       {"algebras", c.algebras}, {"pairs", pairs},
          {"levels", c.levels},       {"samples", c.samples},   {"seed", c.seed},
          {"tol", c.tol},             {"bound", c.bound},       {"max_indeterminate_rate", c.max_indeterminate_rate}};
}

struct Report {
  json config;
  json records = json::array();
  json summary = json::object();
  Outcome outcome = Outcome::Pass;
  std::string timestamp;

  json to_json() const {
    return {{"config", config},
            {"records", records},
            {"summary", summary},
            {"verdict", to_string(outcome)},
            {"environment",
             {{"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"timestamp", timestamp}}}};
  }

  /// metric,value rows.
  std::string summary_csv() const {
    std::ostringstream os;
    os << "experiment,metric,value\n";
    const std::string id = config.value("experiment", std::string());
    // nested objects become dotted metric names
    const json flat = summary.flatten();
    for (const auto& [path, v] : flat.items()) {
      std::string k = path.substr(1);
      std::replace(k.begin(), k.end(), '/', '.');
      os << id << ',' << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    os << id << ",verdict," << to_string(outcome) << '\n';
    return os.str();
  }
};

/// Per-instance seed from (seed, stream, index); splitmix64 finalizer.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Outcome combine(Outcome a, Outcome b) {
  if (a == Outcome::Fail || b == Outcome::Fail) return Outcome::Fail;
  if (a == Outcome::Indeterminate || b == Outcome::Indeterminate) return Outcome::Indeterminate;
  return Outcome::Pass;
}

inline std::string label_of(const std::vector<int>& sizes) { return build_algebra(sizes).label(); }

// E1: at level 1 the coproduct and min cones coincide.
inline Report run_e1(const ExperimentConfig& cfg) {
  Report rep;
  json per_family = json::object();
  int total = 0, agree = 0, disagree = 0, indeterminate = 0;
  for (std::size_t f = 0; f < cfg.algebras.size(); ++f) {
    FdAlgebra A = build_algebra(cfg.algebras[f]);
    int fa = 0, fd = 0, fi = 0;
    for (int i = 0; i < cfg.samples; ++i) {
      Rng rng(instance_seed(cfg.seed, f, i));
      SumElement x(random_self_adjoint(A, 1, rng), random_self_adjoint(A, 1, rng));
      const bool pmin = is_positive_min(x);
      CoproductResult c = is_positive_coproduct(x, cfg.tol);
      std::string status;
      if (c.verdict == Verdict::Unknown) {
        ++fi;
        status = "indeterminate";
      } else if ((c.verdict == Verdict::Yes) == pmin) {
        ++fa;
        status = "agree";
      } else {
        ++fd;
        status = "disagree";
      }
      rep.records.push_back({{"family", A.label()},
                             {"index", i},
                             {"min_positive", pmin},
                             {"min_eigenvalue", joint_element(x).min_eigenvalue()},
                             {"coproduct", to_string(c.verdict)},
                             {"coproduct_margin", c.margin},
                             {"status", status}});
    }
    per_family[A.label()] = {{"agree", fa}, {"disagree", fd}, {"indeterminate", fi}};
    total += cfg.samples;
    agree += fa;
    disagree += fd;
    indeterminate += fi;
  }
  rep.summary = {{"instances", total}, {"agree", agree}, {"disagree", disagree}, {"indeterminate", indeterminate},
                 {"families", per_family}};
  if (disagree > 0)
    rep.outcome = Outcome::Fail;
  else if (indeterminate > cfg.max_indeterminate_rate * total)
    rep.outcome = Outcome::Indeterminate;
  return rep;
}

// E2: a min-positive element at level 2 that is not coproduct-positive.
inline Report run_e2(const ExperimentConfig& cfg) {
  Report rep;
  int passed = 0, failed = 0, undecided = 0;
  double worst_value = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < cfg.pairs.size(); ++p) {
    FdAlgebra A = build_algebra(cfg.pairs[p].first), B = build_algebra(cfg.pairs[p].second);
    json rec = {{"A", A.label()}, {"B", B.label()}};
    try {
      MonogamyWitness w = monogamy_witness(A, B, cfg.bound);
      const SumElement& x = w.separating.element;
      const bool pmin = is_positive_min(x);
      CompatibleWitness cw = compatible_witness(x, cfg.tol);
      const double cert = w.marginal.certificate ? w.marginal.certificate->violation : 0.0;
      const bool ok = pmin && cw.value <= -1e-3 && w.pair.marginal_gap <= 1e-9 && cert >= 1e-3 &&
                      cw.pair.marginal_gap <= 1e-8;
      rec.update({{"witness", io::to_json(w)},
                  {"min_positive", pmin},
                  {"compatible_witness", io::to_json(cw.pair)},
                  {"compatible_witness_value", cw.value},
                  {"certificate_violation", cert},
                  {"status", ok ? "pass" : "fail"}});
      worst_value = std::max(worst_value, cw.value);
      (ok ? passed : failed)++;
    } catch (const SolverIndeterminateError& e) {
      rec.update({{"status", "indeterminate"}, {"detail", e.what()}});
      ++undecided;
    } catch (const std::exception& e) {
      rec.update({{"status", "fail"}, {"detail", e.what()}});
      ++failed;
    }
    rep.records.push_back(rec);
  }
  rep.summary = {{"pairs", cfg.pairs.size()}, {"passed", passed}, {"failed", failed}, {"indeterminate", undecided},
                 {"worst_witness_value", worst_value}};
  rep.outcome = failed ? Outcome::Fail : (undecided ? Outcome::Indeterminate : Outcome::Pass);
  return rep;
}

// E3: with a odd for the grading diag(1,-1) on M2, ‖a+b‖_coproduct ≤ 2‖a+b‖_min.
inline Report run_e3(const ExperimentConfig& cfg) {
  Report rep;
  FdAlgebra M2({2});
  const Grading g = standard_grading_m2();
  double max_ratio = 0.0;
  int violations = 0, undecided = 0, total = 0;
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    const int k = cfg.levels[li];
    for (int i = 0; i < cfg.samples; ++i) {
      Rng rng(instance_seed(cfg.seed, 100 + li, i));
      AlgElement a = grading_project(random_element(M2, k, rng), g, Parity::Odd);
      AlgElement b = random_element(M2, k, rng);
      SumElement x(a, b);
      ++total;
      json rec = {{"level", k}, {"index", i}};
      NormResult nc = norm_coproduct_detail(x);
      NormResult ncm = norm_coproduct_detail(SumElement(-a, b));
      if (nc.status != sdp::SdpStatus::Optimal || ncm.status != sdp::SdpStatus::Optimal) {
        ++undecided;
        rec.update({{"status", "indeterminate"}, {"detail", nc.detail + ncm.detail}});
        rep.records.push_back(rec);
        continue;
      }
      const double nm = norm_min(x), nmm = norm_min(SumElement(-a, b));
      const double ratio = nc.value / nm;
      const bool ok = nm <= nc.value + 1e-7 && nc.value <= 2.0 * nm + 1e-6 && std::abs(nm - nmm) <= 1e-8 &&
                      std::abs(nc.value - ncm.value) <= 1e-8;
      max_ratio = std::max(max_ratio, ratio);
      if (!ok) ++violations;
      rec.update({{"norm_min", nm},
                  {"norm_coproduct", nc.value},
                  {"ratio", ratio},
                  {"symmetry_min", std::abs(nm - nmm)},
                  {"symmetry_coproduct", std::abs(nc.value - ncm.value)},
                  {"status", ok ? "pass" : "fail"}});
      rep.records.push_back(rec);
    }
  }
  rep.summary = {{"instances", total}, {"max_ratio", max_ratio}, {"violations", violations},
                 {"indeterminate", undecided}};
  rep.outcome = violations ? Outcome::Fail : (undecided ? Outcome::Indeterminate : Outcome::Pass);
  return rep;
}

// E4: monogamy pairs admit no joint state; random compatible pairs do.
inline Report run_e4(const ExperimentConfig& cfg) {
  Report rep;
  int certified = 0, failed = 0, undecided = 0, controls_ok = 0, controls = 0;
  double min_violation = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < cfg.pairs.size(); ++p) {
    FdAlgebra A = build_algebra(cfg.pairs[p].first), B = build_algebra(cfg.pairs[p].second);
    CompatiblePair pair = monogamy_pair(A, B);
    TensorCompatibility t = is_tensor_compatible(pair, cfg.tol);
    const double viol = t.certificate ? t.certificate->violation : 0.0;
    const bool ok = t.verdict == Verdict::No && viol >= 1e-3 && pair.marginal_gap <= 1e-9;
    json rec = {{"kind", "monogamy"}, {"A", A.label()}, {"B", B.label()}, {"result", io::to_json(t)},
                {"pair", io::to_json(pair)}, {"status", ok ? "pass" : (t.verdict == Verdict::Unknown ? "indeterminate" : "fail")}};
    if (t.verdict == Verdict::Unknown)
      ++undecided;
    else if (ok)
      ++certified;
    else
      ++failed;
    if (t.certificate) min_violation = std::min(min_violation, viol);
    rep.records.push_back(rec);

    for (int i = 0; i < cfg.samples; ++i) {
      Rng rng(instance_seed(cfg.seed, 200 + p, i));
      CompatiblePair rp = sample_compatible_pair(A, B, 2, rng);
      TensorCompatibility rt = is_tensor_compatible(rp, cfg.tol);
      ++controls;
      const bool cok = rt.verdict == Verdict::Yes && rt.joint &&
                       reduce(*rt.joint, {0, 1}).distance_l1(rp.alpha) <= 1e-6 &&
                       reduce(*rt.joint, {0, 2}).distance_l1(rp.beta) <= 1e-6;
      if (cok) ++controls_ok;
      rep.records.push_back({{"kind", "control"}, {"A", A.label()}, {"B", B.label()}, {"index", i},
                             {"verdict", to_string(rt.verdict)}, {"status", cok ? "pass" : "fail"}});
    }
  }
  rep.summary = {{"monogamy_pairs", cfg.pairs.size()}, {"certified", certified}, {"failed", failed},
                 {"indeterminate", undecided}, {"min_violation", min_violation}, {"controls", controls},
                 {"controls_joint_found", controls_ok}};
  // A random control without a joint state is not a contradiction, so only
  // the monogamy pairs decide the verdict.
  rep.outcome = failed ? Outcome::Fail : (undecided ? Outcome::Indeterminate : Outcome::Pass);
  return rep;
}

// E5: pure-state criterion and separability when one side is commutative.
inline Report run_e5(const ExperimentConfig& cfg) {
  Report rep;
  FdAlgebra M2({2}), C2({1, 1});
  int failures = 0;

  State bell = bell_state(M2, M2);
  const auto bell_class = classify_puresep(bell).verdict;
  const auto bell_sep = separability_status(bell, Cut{{0}}).status;
  const bool bell_ok = bell_class == PureSepClass::Entangled && bell_sep == Separability::Entangled;
  if (!bell_ok) ++failures;
  rep.records.push_back({{"kind", "bell"}, {"puresep", to_string(bell_class)}, {"separability", to_string(bell_sep)},
                         {"status", bell_ok ? "pass" : "fail"}});

  double max_recon = 0.0;
  int products_ok = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    Rng rng(instance_seed(cfg.seed, 300, i));
    State phi = random_pure_state(TensorAlgebra({M2}), rng);
    State psi = random_state(M2, rng);
    PureSepResult r = classify_puresep(product_state(phi, psi));
    const double err = r.reconstruction_error.value_or(std::numeric_limits<double>::infinity());
    max_recon = std::max(max_recon, err);
    const bool ok = r.verdict == PureSepClass::Product && err <= 1e-8;
    if (ok)
      ++products_ok;
    else
      ++failures;
  }

  double max_decomp = 0.0;
  int commutative_ok = 0;
  for (int i = 0; i < cfg.samples; ++i) {
    Rng rng(instance_seed(cfg.seed, 301, i));
    State g = random_state(TensorAlgebra(C2, M2), rng);
    SeparabilityResult r = separability_status(g, Cut{{0}});
    double err = std::numeric_limits<double>::infinity();
    if (r.decomposition) err = recompose(*r.decomposition).distance_l1(g);
    max_decomp = std::max(max_decomp, err);
    const bool ok = r.status == Separability::Separable && err <= 1e-10;
    if (ok)
      ++commutative_ok;
    else
      ++failures;
  }

  State mixed = product_state(normalized_trace(M2), normalized_trace(M2));
  const auto mixed_class = classify_puresep(mixed).verdict;
  if (mixed_class != PureSepClass::Inconclusive) ++failures;
  rep.records.push_back({{"kind", "maximally_mixed"}, {"puresep", to_string(mixed_class)}});

  rep.summary = {{"bell_entangled", bell_ok},
                 {"products_reconstructed", products_ok},
                 {"max_reconstruction_error", max_recon},
                 {"commutative_separable", commutative_ok},
                 {"max_decomposition_error", max_decomp},
                 {"failures", failures}};
  rep.outcome = failures ? Outcome::Fail : Outcome::Pass;
  return rep;
}

inline Report run(const ExperimentConfig& cfg) {
  Report rep;
  if (cfg.id == "E1")
    rep = run_e1(cfg);
  else if (cfg.id == "E2")
    rep = run_e2(cfg);
  else if (cfg.id == "E3")
    rep = run_e3(cfg);
  else if (cfg.id == "E4")
    rep = run_e4(cfg);
  else if (cfg.id == "E5")
    rep = run_e5(cfg);
  else
    throw std::invalid_argument("unknown experiment id " + cfg.id);
  rep.config = to_json(cfg);
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  rep.timestamp = buf;
  return rep;
}

}  // namespace opsys::experiments
