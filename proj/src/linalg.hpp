#pragma once

// Internal linear-algebra helpers shared by graph_env and flows.

#include <Eigen/Dense>
#include <cmath>
#include <Eigen/Sparse>
#include <cstddef>
#include <memory>
#include <vector>

namespace rwde::detail {

using Triplet = Eigen::Triplet<double>;

/// Systems up to this size go through dense partial-pivot LU.
inline constexpr std::size_t kDenseLimit = 400;

/// Square system A x = b assembled from triplets. Dense LU for small n,
/// sparse LU otherwise. The sparse symbolic analysis is reused while the
/// pattern stays the same, which is the common case when the same graph is
/// solved for many sampled environments.
class LinearSystem {
 public:
  explicit LinearSystem(std::size_t n) : n_(n) {}

  std::size_t size() const noexcept { return n_; }

  /// Factorizes A; returns false if A is numerically singular.
  bool factorize(const std::vector<Triplet>& entries) {
    if (n_ <= kDenseLimit) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
      for (const auto& t : entries) a(t.row(), t.col()) += t.value();
      dense_.compute(a);
      const double rc = dense_.rcond();
      return rc > 1e-15 && std::isfinite(rc);
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    if (!analyzed_ || a.nonZeros() != nnz_) {
      sparse_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      sparse_->analyzePattern(a);
      analyzed_ = true;
      nnz_ = a.nonZeros();
    }
    sparse_->factorize(a);
    return sparse_->info() == Eigen::Success;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (n_ <= kDenseLimit) return dense_.solve(b);
    return sparse_->solve(b);
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const {
    if (n_ <= kDenseLimit) return dense_.solve(b);
    return sparse_->solve(b);
  }

 private:
  std::size_t n_;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
  bool analyzed_ = false;
  Eigen::Index nnz_ = 0;
};

}  // namespace rwde::detail
