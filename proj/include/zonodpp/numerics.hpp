#ifndef ZONODPP_NUMERICS_HPP
#define ZONODPP_NUMERICS_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace zonodpp {

// Relative tolerance for rank / linear-dependence decisions, applied to the
// largest |R| diagonal of a column-pivoted QR.
inline constexpr double kRankTol = 1e-10;

// Full-rank r x n feature matrix A with r < n. Columns are the items; an
// r-subset of independent columns is a basis of the linear matroid M[A].
// Immutable after construction, safe to share across threads.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd entries);

  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  const Eigen::MatrixXd& matrix() const { return a_; }

  // Submatrix A_{:P} of the columns indexed by `cols` (order preserved).
  Eigen::MatrixXd columns(std::span<const int> cols) const;

 private:
  Eigen::MatrixXd a_;
};

// Sorted r-subset of column indices with |det A_{:B}| > 0.
struct Basis {
  std::vector<int> indices;

  bool operator==(const Basis&) const = default;
  bool operator<(const Basis& other) const { return indices < other.indices; }
  bool contains(int i) const;
  bool contains_all(std::span<const int> subset) const;
};

struct BasisHash {
  std::size_t operator()(const Basis& b) const;
};

// Validates index range, sortedness/distinctness, cardinality r and
// column independence. Throws std::invalid_argument on violation.
Basis make_basis(const FeatureMatrix& a, std::vector<int> indices);

// Symmetric idempotent n x n kernel with trace r. Invariants are checked at
// construction (symmetry 1e-10, idempotence 1e-8, trace 1e-8).
class ProjectionKernel {
 public:
  ProjectionKernel(Eigen::MatrixXd k, int rank);

  int size() const { return static_cast<int>(k_.rows()); }
  int rank() const { return rank_; }
  const Eigen::MatrixXd& matrix() const { return k_; }

 private:
  Eigen::MatrixXd k_;
  int rank_;
};

// K = A^T (A A^T)^{-1} A. Throws NumericalError if A A^T is singular.
ProjectionKernel build_projection_kernel(const FeatureMatrix& a);

// Squared volume of the parallelotope spanned by the columns indexed by
// `cols`: det(A_{:P}^T A_{:P}). Zero when |P| > r or the columns are
// dependent. Computed from a column-pivoted QR of A_{:P}, not the Gram
// matrix, so near-degenerate parallelotopes do not lose half the digits.
// Note: this is the det(A^T A)-based quantity; det K_P equals it up to the
// constant factor det(A A^T) for |P| = r.
double squared_volume(const FeatureMatrix& a, std::span<const int> cols);

// log of squared_volume; -infinity for dependent columns. Used by the
// samplers so determinant ratios stay representable at large r.
double log_squared_volume(const FeatureMatrix& a, std::span<const int> cols);

// det(A A^T): the Cauchy-Binet normalization, equal to the sum of squared
// basis volumes.
double cauchy_binet_total(const FeatureMatrix& a);

}  // namespace zonodpp

#endif
