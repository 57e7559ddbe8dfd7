#pragma once

// Finite-dimensional C*-algebras in the canonical form ⊕_i M_{n_i}, their
// elements at matrix level k (M_k(A) = M_k ⊗ A, ancilla index most
// significant), tensor products and inner Z2-gradings.

#include "opsys/errors.hpp"
#include "opsys/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace opsys {

class FdAlgebra {
 public:
  FdAlgebra() : FdAlgebra(std::vector<int>{1}) {}

  explicit FdAlgebra(std::vector<int> block_sizes, std::string label = {})
      : block_sizes_(std::move(block_sizes)), label_(std::move(label)) {
    if (block_sizes_.empty()) throw std::invalid_argument("FdAlgebra: empty block list");
    for (int n : block_sizes_)
      if (n < 1) throw std::invalid_argument("FdAlgebra: block sizes must be positive");
    if (label_.empty()) label_ = default_label(block_sizes_);
  }

  const std::vector<int>& block_sizes() const { return block_sizes_; }
  int num_blocks() const { return static_cast<int>(block_sizes_.size()); }
  int block_size(int i) const { return block_sizes_.at(i); }
  const std::string& label() const { return label_; }

  /// Complex dimension Σ n_i².
  int total_dim() const {
    int d = 0;
    for (int n : block_sizes_) d += n * n;
    return d;
  }

  /// Dimension of the defining representation, Σ n_i.
  int rep_dim() const {
    int d = 0;
    for (int n : block_sizes_) d += n;
    return d;
  }

  bool is_commutative() const {
    return std::all_of(block_sizes_.begin(), block_sizes_.end(), [](int n) { return n == 1; });
  }

  int max_block_size() const { return *std::max_element(block_sizes_.begin(), block_sizes_.end()); }

  /// Index of the first block of size ≥ 2, or -1 for commutative algebras.
  int first_noncommutative_block() const {
    for (int i = 0; i < num_blocks(); ++i)
      if (block_sizes_[i] >= 2) return i;
    return -1;
  }

  /// Algebras compare by structure; labels are cosmetic.
  friend bool operator==(const FdAlgebra& x, const FdAlgebra& y) {
    return x.block_sizes_ == y.block_sizes_;
  }

  static std::string default_label(const std::vector<int>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (i) out += "+";
      out += sizes[i] == 1 ? std::string("C") : "M" + std::to_string(sizes[i]);
    }
    return out;
  }

 private:
  std::vector<int> block_sizes_;
  std::string label_;
};

inline FdAlgebra build_algebra(const std::vector<int>& block_sizes) {
  return FdAlgebra(block_sizes);
}

inline FdAlgebra matrix_algebra(int k) { return FdAlgebra({k}); }

/// M_k(A) viewed as a single algebra with blocks k·n_i.
inline FdAlgebra level_lift(const FdAlgebra& a, int k) {
  if (k < 1) throw std::invalid_argument("level_lift: level must be positive");
  std::vector<int> sizes;
  for (int n : a.block_sizes()) sizes.push_back(k * n);
  return FdAlgebra(sizes, k == 1 ? a.label() : "M" + std::to_string(k) + "(" + a.label() + ")");
}

/// Element of M_k(A): block i is a (k·n_i)×(k·n_i) matrix in M_k ⊗ M_{n_i}.
struct AlgElement {
  FdAlgebra algebra;
  int level = 1;
  std::vector<CMatrix> blocks;

  AlgElement() = default;
  AlgElement(FdAlgebra alg, int k, std::vector<CMatrix> bl)
      : algebra(std::move(alg)), level(k), blocks(std::move(bl)) {
    validate();
  }

  static AlgElement zero(const FdAlgebra& alg, int k = 1) {
    std::vector<CMatrix> bl;
    for (int n : alg.block_sizes()) bl.push_back(CMatrix::Zero(k * n, k * n));
    return AlgElement(alg, k, std::move(bl));
  }

  static AlgElement unit(const FdAlgebra& alg, int k = 1) {
    std::vector<CMatrix> bl;
    for (int n : alg.block_sizes()) bl.push_back(identity(k * n));
    return AlgElement(alg, k, std::move(bl));
  }

  /// μ ⊗ 1_A for a scalar-level matrix μ ∈ M_k.
  static AlgElement scalar(const FdAlgebra& alg, const CMatrix& mu) {
    std::vector<CMatrix> bl;
    for (int n : alg.block_sizes()) bl.push_back(kron(mu, identity(n)));
    return AlgElement(alg, static_cast<int>(mu.rows()), std::move(bl));
  }

  int block_dim(int i) const { return level * algebra.block_size(i); }

  void validate() const {
    if (level < 1) throw std::invalid_argument("AlgElement: level must be positive");
    if (static_cast<int>(blocks.size()) != algebra.num_blocks())
      throw std::invalid_argument("AlgElement: block count does not match algebra " + algebra.label());
    for (int i = 0; i < algebra.num_blocks(); ++i)
      if (blocks[i].rows() != block_dim(i) || blocks[i].cols() != block_dim(i))
        throw std::invalid_argument("AlgElement: block shape does not match level × block size");
  }

  AlgElement adjoint() const {
    AlgElement out = *this;
    for (auto& b : out.blocks) b = b.adjoint().eval();
    return out;
  }

  double self_adjoint_defect() const {
    double d = 0.0;
    for (const auto& b : blocks) d = std::max(d, opsys::self_adjoint_defect(b));
    return d;
  }

  bool is_self_adjoint(double tol = kDefaultSelfAdjointTol) const { return self_adjoint_defect() <= tol; }

  double norm() const {
    double n = 0.0;
    for (const auto& b : blocks) n = std::max(n, operator_norm(b));
    return n;
  }

  double min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) m = std::min(m, opsys::min_eigenvalue(b));
    return m;
  }

  AlgElement& operator+=(const AlgElement& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += o.blocks[i];
    return *this;
  }
  AlgElement& operator-=(const AlgElement& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] -= o.blocks[i];
    return *this;
  }
  AlgElement& operator*=(cplx s) {
    for (auto& b : blocks) b *= s;
    return *this;
  }
  friend AlgElement operator+(AlgElement x, const AlgElement& y) { return x += y; }
  friend AlgElement operator-(AlgElement x, const AlgElement& y) { return x -= y; }
  friend AlgElement operator*(AlgElement x, cplx s) { return x *= s; }
  friend AlgElement operator*(cplx s, AlgElement x) { return x *= s; }
  friend AlgElement operator-(AlgElement x) { return x *= -1.0; }

  friend AlgElement operator*(const AlgElement& x, const AlgElement& y) {
    x.check_compatible(y);
    AlgElement out = x;
    for (std::size_t i = 0; i < out.blocks.size(); ++i) out.blocks[i] = x.blocks[i] * y.blocks[i];
    return out;
  }

  void check_compatible(const AlgElement& o) const {
    if (!(algebra == o.algebra) || level != o.level)
      throw std::invalid_argument("AlgElement: algebra or level mismatch");
  }
};

inline double distance(const AlgElement& x, const AlgElement& y) { return (x - y).norm(); }

/// True iff x is positive in M_k(A): every block has spectrum ≥ -tol.
inline bool is_positive_alg(const AlgElement& x, double tol = 0.0) {
  if (x.self_adjoint_defect() > std::max(tol, kDefaultSelfAdjointTol))
    throw std::invalid_argument("is_positive_alg: element is not self-adjoint");
  return x.min_eigenvalue() >= -tol;
}

/// Tensor product A_0 ⊗ ... ⊗ A_{n-1} of finite-dimensional algebras. Blocks
/// are indexed lexicographically by tuples of factor block indices; inside a
/// block, factor 0 is the most significant Kronecker index.
class TensorAlgebra {
 public:
  TensorAlgebra() = default;
  explicit TensorAlgebra(std::vector<FdAlgebra> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("TensorAlgebra: no factors");
    for (const auto& f : factors_) block_counts_.push_back(f.num_blocks());
  }
  TensorAlgebra(const FdAlgebra& a, const FdAlgebra& b) : TensorAlgebra(std::vector<FdAlgebra>{a, b}) {}

  const std::vector<FdAlgebra>& factors() const { return factors_; }
  const FdAlgebra& factor(int f) const { return factors_.at(f); }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int num_blocks() const { return product(block_counts_); }

  std::vector<int> block_tuple(int block) const { return unravel(block, block_counts_); }
  int block_index(const std::vector<int>& tuple) const { return ravel(tuple, block_counts_); }

  /// Sizes of the matrix factors inside a given block.
  std::vector<int> inner_dims(int block) const {
    auto t = block_tuple(block);
    std::vector<int> dims(t.size());
    for (std::size_t f = 0; f < t.size(); ++f) dims[f] = factors_[f].block_size(t[f]);
    return dims;
  }

  FdAlgebra combined() const {
    std::vector<int> sizes;
    for (int b = 0; b < num_blocks(); ++b) sizes.push_back(product(inner_dims(b)));
    std::string label;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      if (f) label += "⊗";
      label += factors_[f].num_blocks() > 1 ? "[" + factors_[f].label() + "]" : factors_[f].label();
    }
    return FdAlgebra(sizes, label);
  }

  /// Subsystem consisting of the given factor indices, in order.
  TensorAlgebra sub(const std::vector<int>& which) const {
    std::vector<FdAlgebra> fs;
    for (int f : which) fs.push_back(factors_.at(f));
    return TensorAlgebra(fs);
  }

  friend bool operator==(const TensorAlgebra& x, const TensorAlgebra& y) {
    return x.factors_ == y.factors_;
  }

 private:
  std::vector<FdAlgebra> factors_;
  std::vector<int> block_counts_;
};

inline TensorAlgebra concat(const TensorAlgebra& x, const TensorAlgebra& y) {
  auto fs = x.factors();
  fs.insert(fs.end(), y.factors().begin(), y.factors().end());
  return TensorAlgebra(fs);
}

namespace detail {

// Places x (acting on the kept factors of a block) into the full block as
// x ⊗ 1 on the remaining factors, respecting factor order.
inline CMatrix embed_into_factors(const CMatrix& x, std::span<const int> dims,
                                  const std::vector<bool>& acts) {
  std::vector<int> sub_dims;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (acts[f]) sub_dims.push_back(dims[f]);
  const int total = product(dims);
  CMatrix out = CMatrix::Zero(total, total);
  std::vector<int> sr(sub_dims.size()), sc(sub_dims.size());
  for (int r = 0; r < total; ++r) {
    auto rd = unravel(r, dims);
    for (int c = 0; c < total; ++c) {
      auto cd = unravel(c, dims);
      bool ok = true;
      std::size_t k = 0;
      for (std::size_t f = 0; f < dims.size() && ok; ++f) {
        if (acts[f]) {
          sr[k] = rd[f];
          sc[k] = cd[f];
          ++k;
        } else if (rd[f] != cd[f]) {
          ok = false;
        }
      }
      if (ok) out(r, c) = x(ravel(sr, sub_dims), ravel(sc, sub_dims));
    }
  }
  return out;
}

}  // namespace detail

/// a ↦ a ⊗ 1_B, at the level of a. Block (i, j) of M_k(A ⊗ B) is
/// M_k ⊗ M_{n_i} ⊗ M_{m_j}.
inline AlgElement embed_left(const AlgElement& a, const FdAlgebra& b) {
  a.validate();
  const int k = a.level;
  TensorAlgebra ab(a.algebra, b);
  std::vector<CMatrix> blocks;
  for (int blk = 0; blk < ab.num_blocks(); ++blk) {
    auto t = ab.block_tuple(blk);
    blocks.push_back(kron(a.blocks[t[0]], identity(b.block_size(t[1]))));
  }
  return AlgElement(ab.combined(), k, std::move(blocks));
}

/// b ↦ 1_A ⊗ b, at the level of b.
inline AlgElement embed_right(const FdAlgebra& a, const AlgElement& b) {
  b.validate();
  const int k = b.level;
  TensorAlgebra ab(a, b.algebra);
  std::vector<CMatrix> blocks;
  for (int blk = 0; blk < ab.num_blocks(); ++blk) {
    auto t = ab.block_tuple(blk);
    std::vector<int> dims{k, a.block_size(t[0]), b.algebra.block_size(t[1])};
    blocks.push_back(detail::embed_into_factors(b.blocks[t[1]], dims, {true, false, true}));
  }
  return AlgElement(ab.combined(), k, std::move(blocks));
}

/// Inner Z2-grading σ(x) = u x u* with u a self-adjoint unitary per block.
struct Grading {
  FdAlgebra algebra;
  std::vector<CMatrix> unitaries;

  Grading() = default;
  Grading(FdAlgebra alg, std::vector<CMatrix> us) : algebra(std::move(alg)), unitaries(std::move(us)) {}

  /// Throws std::invalid_argument unless every u_i is a self-adjoint unitary.
  void validate(double tol = 1e-9) const {
    if (static_cast<int>(unitaries.size()) != algebra.num_blocks())
      throw std::invalid_argument("Grading: one sign unitary per block required");
    for (int i = 0; i < algebra.num_blocks(); ++i) {
      const auto& u = unitaries[i];
      const int n = algebra.block_size(i);
      if (u.rows() != n || u.cols() != n) throw std::invalid_argument("Grading: unitary shape mismatch");
      if ((u - u.adjoint()).norm() > tol) throw std::invalid_argument("Grading: u is not self-adjoint");
      if ((u * u - identity(n)).norm() > tol) throw std::invalid_argument("Grading: u^2 != 1");
    }
  }

  AlgElement apply(const AlgElement& x) const {
    if (!(x.algebra == algebra)) throw std::invalid_argument("Grading: algebra mismatch");
    AlgElement out = x;
    for (int i = 0; i < algebra.num_blocks(); ++i) {
      CMatrix u = kron(identity(x.level), unitaries[i]);
      out.blocks[i] = u * x.blocks[i] * u.adjoint();
    }
    return out;
  }
};

/// The grading of M_2 by u = diag(1, -1): diagonal matrices are even,
/// off-diagonal ones odd.
inline Grading standard_grading_m2() {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = -1.0;
  return Grading(matrix_algebra(2), {u});
}

enum class Parity { Even, Odd };

inline AlgElement grading_project(const AlgElement& x, const Grading& g, Parity parity) {
  g.validate();
  AlgElement sx = g.apply(x);
  return parity == Parity::Even ? (x + sx) * 0.5 : (x - sx) * 0.5;
}

inline bool is_odd(const AlgElement& x, const Grading& g, double tol = 1e-10) {
  return grading_project(x, g, Parity::Even).norm() <= tol;
}

}  // namespace opsys
