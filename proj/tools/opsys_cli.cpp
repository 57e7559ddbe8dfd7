// Command-line front end: positivity checks, norms, marginal problems,
// monogamy witnesses and the seeded experiments.
//
// Exit codes: 0 pass, 1 fail, 2 indeterminate (3 on usage or input errors).

#include "opsys/experiments.hpp"
#include "opsys/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using opsys::io::json;
namespace ex = opsys::experiments;

struct Common {
  std::string config;
  std::uint64_t seed = 42;
  double tol = opsys::kCoproductTol;
  std::string out;
  bool seed_set = false;
  bool tol_set = false;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return json::parse(in);
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << j.dump(2) << '\n';
}

std::string csv_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".csv");
  return p.string();
}

opsys::FdAlgebra algebra_or(const json& cfg, const char* key, std::vector<int> fallback) {
  return cfg.contains(key) ? opsys::io::algebra_from_json(cfg[key]) : opsys::build_algebra(fallback);
}

/// Element from the config ("element" or "a"/"b"), else a random
/// self-adjoint one drawn from the seed.
opsys::SumElement element_from(const json& cfg, const Common& c) {
  if (cfg.contains("element")) return opsys::io::sum_from_json(cfg["element"]);
  if (cfg.contains("a") && cfg.contains("b"))
    return opsys::SumElement(opsys::io::element_from_json(cfg["a"]), opsys::io::element_from_json(cfg["b"]));
  opsys::Rng rng(c.seed);
  const int k = cfg.value("level", 1);
  auto A = algebra_or(cfg, "A", {2}), B = algebra_or(cfg, "B", {2});
  return opsys::SumElement(opsys::random_self_adjoint(A, k, rng), opsys::random_self_adjoint(B, k, rng));
}

int cmd_check_pos(const Common& c) {
  json cfg = load_config(c.config);
  opsys::SumElement x = element_from(cfg, c);
  json rep = {{"element", opsys::io::to_json(x)}};
  const bool pmin = opsys::is_positive_min(x);
  opsys::CoproductResult r = opsys::is_positive_coproduct(x, c.tol);
  rep["min_positive"] = pmin;
  rep["coproduct"] = opsys::to_string(r.verdict);
  rep["coproduct_margin"] = r.margin;
  if (r.lambda) rep["lambda"] = opsys::io::to_json(*r.lambda);
  if (r.verdict == opsys::Verdict::No) {
    opsys::CompatibleWitness w = opsys::compatible_witness(x, c.tol);
    rep["witness"] = {{"pair", opsys::io::to_json(w.pair)}, {"value", w.value}};
  }
  emit(rep, c.out);
  return r.verdict == opsys::Verdict::Yes ? 0 : (r.verdict == opsys::Verdict::No ? 1 : 2);
}

int cmd_norm(const Common& c) {
  json cfg = load_config(c.config);
  opsys::SumElement x = [&] {
    if (cfg.contains("element") || cfg.contains("a")) return element_from(cfg, c);
    opsys::Rng rng(c.seed);
    const int k = cfg.value("level", 1);
    auto A = algebra_or(cfg, "A", {2}), B = algebra_or(cfg, "B", {2});
    return opsys::SumElement(opsys::random_element(A, k, rng), opsys::random_element(B, k, rng));
  }();
  opsys::NormResult nc = opsys::norm_coproduct_detail(x);
  const double nm = opsys::norm_min(x);
  json rep = {{"element", opsys::io::to_json(x)},
              {"norm_min", nm},
              {"norm_max", opsys::norm_max(x)},
              {"coproduct_status", opsys::sdp::to_string(nc.status)}};
  if (nc.status == opsys::sdp::SdpStatus::Optimal) {
    rep["norm_coproduct"] = nc.value;
    rep["ratio"] = nc.value / nm;
  }
  emit(rep, c.out);
  return nc.status == opsys::sdp::SdpStatus::Optimal ? 0 : 2;
}

int cmd_marginal(const Common& c) {
  json cfg = load_config(c.config);
  opsys::CompatiblePair pair = [&] {
    if (cfg.contains("alpha") && cfg.contains("beta"))
      return opsys::make_pair(opsys::io::state_from_json(cfg["alpha"]), opsys::io::state_from_json(cfg["beta"]));
    auto A = algebra_or(cfg, "A", {2}), B = algebra_or(cfg, "B", {2});
    if (cfg.value("random", false)) {
      opsys::Rng rng(c.seed);
      return opsys::sample_compatible_pair(A, B, cfg.value("level", 2), rng);
    }
    return opsys::monogamy_pair(A, B);
  }();
  opsys::TensorCompatibility t = opsys::is_tensor_compatible(pair, c.tol);
  json rep = {{"pair", opsys::io::to_json(pair)}, {"result", opsys::io::to_json(t)}};
  emit(rep, c.out);
  return t.verdict == opsys::Verdict::Yes ? 0 : (t.verdict == opsys::Verdict::No ? 1 : 2);
}

int cmd_witness(const Common& c) {
  json cfg = load_config(c.config);
  auto A = algebra_or(cfg, "A", {2}), B = algebra_or(cfg, "B", {2});
  try {
    opsys::MonogamyWitness w = opsys::monogamy_witness(A, B, cfg.value("bound", 1.0));
    const opsys::SumElement& x = w.separating.element;
    opsys::CompatibleWitness cw = opsys::compatible_witness(x, c.tol);
    const bool ok = opsys::is_positive_min(x) && cw.value <= -1e-3;
    json rep = {{"witness", opsys::io::to_json(w)},
                {"min_positive", opsys::is_positive_min(x)},
                {"compatible_witness", opsys::io::to_json(cw.pair)},
                {"compatible_witness_value", cw.value},
                {"verdict", ok ? "pass" : "fail"}};
    emit(rep, c.out);
    return ok ? 0 : 1;
  } catch (const opsys::SolverIndeterminateError& e) {
    emit({{"verdict", "indeterminate"}, {"detail", e.what()}}, c.out);
    return 2;
  }
}

int cmd_experiment(const Common& c, const std::string& id) {
  json cfg = load_config(c.config);
  if (!id.empty()) cfg["experiment"] = id;
  ex::ExperimentConfig ec = ex::config_from_json(cfg);
  if (c.seed_set) ec.seed = c.seed;
  if (c.tol_set) ec.tol = c.tol;
  if (!c.out.empty()) ec.out = c.out;
  ex::Report rep = ex::run(ec);
  emit(rep.to_json(), ec.out);
  if (!ec.out.empty()) {
    std::ofstream f(csv_path(ec.out));
    f << rep.summary_csv();
  } else {
    std::cerr << rep.summary_csv();
  }
  return static_cast<int>(rep.outcome);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-system structures on A ⊕₁ B for finite-dimensional C*-algebras"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON configuration file");
    sub->add_option("--seed", c.seed, "random seed")->each([&c](const std::string&) { c.seed_set = true; });
    sub->add_option("--tol", c.tol, "feasibility tolerance")->each([&c](const std::string&) { c.tol_set = true; });
    sub->add_option("--out", c.out, "output file (JSON); experiments also write a .csv summary");
  };
  auto* check = app.add_subcommand("check-pos", "min and coproduct positivity of a sum element");
  auto* norm = app.add_subcommand("norm", "min and coproduct norms of a sum element");
  auto* marginal = app.add_subcommand("marginal", "tensor compatibility of a pair of states");
  auto* witness = app.add_subcommand("witness", "monogamy witness and separating element");
  auto* experiment = app.add_subcommand("experiment", "run a seeded experiment (E1-E5)");
  std::string id;
  experiment->add_option("--id", id, "experiment id, overrides the config");
  for (auto* s : {check, norm, marginal, witness, experiment}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  try {
    if (check->parsed()) return cmd_check_pos(c);
    if (norm->parsed()) return cmd_norm(c);
    if (marginal->parsed()) return cmd_marginal(c);
    if (witness->parsed()) return cmd_witness(c);
    if (experiment->parsed()) return cmd_experiment(c, id);
  } catch (const opsys::SolverIndeterminateError& e) {
    std::cerr << "indeterminate: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}
