#pragma once

// Modeling layer for block-structured Hermitian SDPs.
//
// All decision variables are real scalars x ∈ R^n. Hermitian matrix
// variables are groups of n² scalars. Constraints are
//
//   LMI blocks     F_j(x) = F_j0 + Σ_i x_i F_ji ⪰ 0   (Hermitian F_ji)
//   equalities     a_e · x = b_e
//
// and the objective is min c · x (empty c means pure feasibility). A PSD
// matrix variable X ⪰ 0 is an LMI whose terms are the coordinate basis.

#include "opsys/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opsys::sdp {

/// Matrix-valued affine function of the scalar variables.
struct AffineMatrix {
  CMatrix constant;
  std::vector<std::pair<int, CMatrix>> terms;

  AffineMatrix() = default;
  explicit AffineMatrix(CMatrix c) : constant(std::move(c)) {}
  static AffineMatrix zero(Eigen::Index rows, Eigen::Index cols) { return AffineMatrix(CMatrix::Zero(rows, cols)); }

  Eigen::Index rows() const { return constant.rows(); }
  Eigen::Index cols() const { return constant.cols(); }

  AffineMatrix& operator+=(const AffineMatrix& o) {
    if (o.rows() != rows() || o.cols() != cols()) throw std::invalid_argument("AffineMatrix: shape mismatch");
    constant += o.constant;
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
  AffineMatrix& operator+=(const CMatrix& c) {
    constant += c;
    return *this;
  }
  AffineMatrix& operator*=(double s) {
    constant *= s;
    for (auto& t : terms) t.second *= s;
    return *this;
  }
  friend AffineMatrix operator+(AffineMatrix x, const AffineMatrix& y) { return x += y; }
  friend AffineMatrix operator+(AffineMatrix x, const CMatrix& c) { return x += c; }
  friend AffineMatrix operator*(double s, AffineMatrix x) { return x *= s; }
  friend AffineMatrix operator-(AffineMatrix x) { return x *= -1.0; }
  friend AffineMatrix operator-(AffineMatrix x, const AffineMatrix& y) { return x += -y; }

  /// Applies a real-linear map to the constant and every coefficient.
  template <class F>
  AffineMatrix mapped(F&& f) const {
    AffineMatrix out(f(constant));
    out.terms.reserve(terms.size());
    for (const auto& [v, m] : terms) out.terms.emplace_back(v, f(m));
    return out;
  }

  /// Coefficients are real-linear in x, so the adjoint distributes.
  AffineMatrix adjoint() const {
    return mapped([](const CMatrix& m) { return CMatrix(m.adjoint()); });
  }

  /// m ⊗ (·)
  AffineMatrix kron_left(const CMatrix& m) const {
    return mapped([&m](const CMatrix& x) { return kron(m, x); });
  }
  /// (·) ⊗ m
  AffineMatrix kron_right(const CMatrix& m) const {
    return mapped([&m](const CMatrix& x) { return kron(x, m); });
  }

  /// Embeds into a zero matrix of the given size at (row, col).
  AffineMatrix placed(Eigen::Index total_rows, Eigen::Index total_cols, Eigen::Index row, Eigen::Index col) const {
    return mapped([&](const CMatrix& x) {
      CMatrix out = CMatrix::Zero(total_rows, total_cols);
      out.block(row, col, x.rows(), x.cols()) = x;
      return out;
    });
  }

  CMatrix evaluate(const RVector& x) const {
    CMatrix out = constant;
    for (const auto& [v, m] : terms) out += x(v) * m;
    return out;
  }
};

/// Handle to an n×n Hermitian matrix variable stored as n² real scalars:
/// diagonal entries, then (Re, Im) of each strict upper entry.
struct HermitianVar {
  int offset = 0;
  int n = 0;

  int num_scalars() const { return n * n; }

  /// Coordinate basis element for scalar index q ∈ [0, n²).
  CMatrix basis(int q) const {
    CMatrix e = CMatrix::Zero(n, n);
    if (q < n) {
      e(q, q) = 1.0;
      return e;
    }
    int idx = (q - n) / 2;
    const bool imag = (q - n) % 2 == 1;
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        if (idx-- == 0) {
          if (imag) {
            e(j, k) = cplx(0.0, 1.0);
            e(k, j) = cplx(0.0, -1.0);
          } else {
            e(j, k) = 1.0;
            e(k, j) = 1.0;
          }
          return e;
        }
      }
    }
    throw std::out_of_range("HermitianVar::basis");
  }

  AffineMatrix expr() const {
    AffineMatrix out = AffineMatrix::zero(n, n);
    for (int q = 0; q < num_scalars(); ++q) out.terms.emplace_back(offset + q, basis(q));
    return out;
  }

  CMatrix value(const RVector& x) const { return expr().evaluate(x); }
};

struct LmiBlock {
  AffineMatrix expr;
  std::string name;
};

struct LinearEquality {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

class SdpProblem {
 public:
  int num_vars() const { return num_vars_; }
  const std::vector<LmiBlock>& lmis() const { return lmis_; }
  const std::vector<LinearEquality>& equalities() const { return equalities_; }
  /// Objective coefficients padded to num_vars().
  RVector objective() const {
    RVector c = RVector::Zero(num_vars_);
    if (has_objective_) c.head(objective_.size()) = objective_;
    return c;
  }
  double objective_constant() const { return objective_constant_; }
  bool has_objective() const { return has_objective_; }

  int add_scalar() { return num_vars_++; }

  HermitianVar add_hermitian(int n) {
    if (n < 1) throw std::invalid_argument("SdpProblem: matrix variable size must be positive");
    HermitianVar v{num_vars_, n};
    num_vars_ += n * n;
    return v;
  }

  /// Hermitian matrix variable constrained to be PSD.
  HermitianVar add_psd_block(int n, std::string name = {}) {
    HermitianVar v = add_hermitian(n);
    add_lmi(v.expr(), std::move(name));
    return v;
  }

  void add_lmi(AffineMatrix expr, std::string name = {}) {
    if (expr.rows() != expr.cols() || expr.rows() == 0) throw std::invalid_argument("SdpProblem: LMI must be square");
    auto herm_defect = [](const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); };
    const double tol = 1e-12;
    double scale = std::max(1.0, expr.constant.cwiseAbs().maxCoeff());
    if (herm_defect(expr.constant) > tol * scale) throw std::invalid_argument("SdpProblem: LMI constant not Hermitian");
    for (const auto& [v, m] : expr.terms) {
      if (v < 0 || v >= num_vars_) throw std::invalid_argument("SdpProblem: LMI references unknown variable");
      if (herm_defect(m) > tol * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("SdpProblem: LMI coefficient not Hermitian");
    }
    lmis_.push_back({std::move(expr), std::move(name)});
  }

  void add_equality(std::vector<std::pair<int, double>> coeffs, double rhs) {
    for (const auto& [v, a] : coeffs)
      if (v < 0 || v >= num_vars_) throw std::invalid_argument("SdpProblem: equality references unknown variable");
    equalities_.push_back({std::move(coeffs), rhs});
  }

  /// Re tr(weight · expr) = rhs.
  void add_trace_equality(const AffineMatrix& expr, const CMatrix& weight, double rhs) {
    std::vector<std::pair<int, double>> coeffs;
    for (const auto& [v, m] : expr.terms) coeffs.emplace_back(v, real_pairing(weight, m));
    add_equality(std::move(coeffs), rhs - real_pairing(weight, expr.constant));
  }

  /// Every entry of expr equals the matching entry of target (expr Hermitian).
  void add_matrix_equality(const AffineMatrix& expr, const CMatrix& target) {
    const Eigen::Index n = expr.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j; k < n; ++k) {
        CMatrix w = CMatrix::Zero(n, n);
        if (j == k) {
          w(j, j) = 1.0;
          add_trace_equality(expr, w, target(j, j).real());
        } else {
          // Re tr(w X) with w = E_kj picks X_jk.
          w(k, j) = 1.0;
          add_trace_equality(expr, w, target(j, k).real());
          w(k, j) = cplx(0.0, -1.0);
          add_trace_equality(expr, w, target(j, k).imag());
        }
      }
    }
  }

  void set_objective(int var, double coef) {
    ensure_objective();
    objective_(var) = coef;
  }

  void add_to_objective(int var, double coef) {
    ensure_objective();
    objective_(var) += coef;
  }

  /// Adds Re tr(weight · expr) to the objective.
  void add_trace_objective(const AffineMatrix& expr, const CMatrix& weight) {
    ensure_objective();
    for (const auto& [v, m] : expr.terms) objective_(v) += real_pairing(weight, m);
    objective_constant_ += real_pairing(weight, expr.constant);
  }

  void set_objective_vector(RVector c, double constant = 0.0) {
    if (c.size() != num_vars_) throw std::invalid_argument("SdpProblem: objective size mismatch");
    objective_ = std::move(c);
    objective_constant_ = constant;
    has_objective_ = true;
  }

  /// Assembles the objective value at x.
  double objective_value(const RVector& x) const {
    return has_objective_ ? objective().dot(x) + objective_constant_ : 0.0;
  }

  /// Used by deserialization and tests that build problems from raw parts.
  void set_num_vars(int n) {
    if (n < num_vars_) throw std::invalid_argument("SdpProblem: cannot shrink variable count");
    num_vars_ = n;
  }

 private:
  void ensure_objective() {
    if (!has_objective_) {
      objective_ = RVector::Zero(num_vars_);
      has_objective_ = true;
    } else if (objective_.size() < num_vars_) {
      RVector c = RVector::Zero(num_vars_);
      c.head(objective_.size()) = objective_;
      objective_ = c;
    }
  }

  int num_vars_ = 0;
  std::vector<LmiBlock> lmis_;
  std::vector<LinearEquality> equalities_;
  RVector objective_;
  double objective_constant_ = 0.0;
  bool has_objective_ = false;
};

enum class SdpStatus { Optimal, Feasible, Infeasible, Unknown };

inline std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Infeasible: return "infeasible";
    default: return "unknown";
  }
}

/// Farkas certificate: Hermitian D_j ⪰ 0 per LMI and multipliers y with
///   Σ_j Re tr(F_ji D_j) = Σ_e y_e a_ei   for every variable i,
///   value = Σ_j Re tr(F_j0 D_j) + b · y < 0.
/// Pairing any feasible x gives 0 ≤ Σ_j Re tr(F_j(x) D_j) = value, a
/// contradiction. Normalized so that Σ_j tr D_j = 1 (or ‖y‖ = 1 when all
/// D_j vanish).
struct InfeasibilityCertificate {
  std::vector<CMatrix> lmi_duals;
  RVector eq_multipliers;
  double value = 0.0;
  double stationarity_residual = 0.0;
  double margin = 0.0;
};

struct SdpResult {
  SdpStatus status = SdpStatus::Unknown;
  RVector x;
  double objective_value = 0.0;
  /// F_j(x) for every LMI.
  std::vector<CMatrix> slacks;
  /// Dual matrices (pairing Re tr) and equality multipliers at optimality.
  std::vector<CMatrix> lmi_duals;
  RVector eq_multipliers;
  std::optional<InfeasibilityCertificate> certificate;
  /// Achieved tolerances.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double min_slack_eigenvalue = 0.0;
  /// check_feasible only: the largest uniform eigenvalue margin found.
  std::optional<double> feasibility_margin;
  int iterations = 0;
  std::string detail;
};

struct SolverOptions {
  double tol_primal = 1e-8;
  double tol_gap = 1e-7;
  double tol_psd = 1e-8;
  int max_iter = 100;
  bool verbose = false;
};

}  // namespace opsys::sdp
