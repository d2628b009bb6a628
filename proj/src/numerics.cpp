#include "zonodpp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zonodpp/errors.hpp"

namespace zonodpp {

namespace {

// Rank of a matrix from column-pivoted QR with relative tolerance kRankTol.
int qr_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  if (diag.size() == 0) return 0;
  const double thresh = diag.maxCoeff() * kRankTol;
  if (thresh == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag[i] > thresh) ++rank;
  }
  return rank;
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd entries) : a_(std::move(entries)) {
  const int r = static_cast<int>(a_.rows());
  const int n = static_cast<int>(a_.cols());
  if (r < 1 || n < 1) {
    throw std::invalid_argument("feature matrix must be nonempty");
  }
  if (r >= n) {
    throw std::invalid_argument("feature matrix needs r < n, got r=" +
                                std::to_string(r) + " n=" + std::to_string(n));
  }
  if (!a_.allFinite()) {
    throw std::invalid_argument("feature matrix has non-finite entries");
  }
  if (qr_rank(a_) != r) {
    throw std::invalid_argument("feature matrix rows are linearly dependent");
  }
}

Eigen::MatrixXd FeatureMatrix::columns(std::span<const int> cols) const {
  Eigen::MatrixXd sub(a_.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const int c = cols[j];
    if (c < 0 || c >= this->cols()) {
      throw std::invalid_argument("column index out of range: " +
                                  std::to_string(c));
    }
    sub.col(static_cast<Eigen::Index>(j)) = a_.col(c);
  }
  return sub;
}

bool Basis::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

bool Basis::contains_all(std::span<const int> subset) const {
  return std::all_of(subset.begin(), subset.end(),
                     [this](int i) { return contains(i); });
}

std::size_t BasisHash::operator()(const Basis& b) const {
  // FNV-1a over the index sequence; bases are short so this is cheap.
  std::size_t h = 1469598103934665603ull;
  for (int i : b.indices) {
    h ^= static_cast<std::size_t>(i);
    h *= 1099511628211ull;
  }
  return h;
}

Basis make_basis(const FeatureMatrix& a, std::vector<int> indices) {
  if (static_cast<int>(indices.size()) != a.rows()) {
    throw std::invalid_argument("basis must have exactly r indices");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= a.cols()) {
      throw std::invalid_argument("basis index out of range");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("basis indices must be strictly increasing");
    }
  }
  if (squared_volume(a, indices) <= 0.0) {
    throw std::invalid_argument("basis columns are linearly dependent");
  }
  return Basis{std::move(indices)};
}

ProjectionKernel::ProjectionKernel(Eigen::MatrixXd k, int rank)
    : k_(std::move(k)), rank_(rank) {
  if (k_.rows() != k_.cols()) {
    throw NumericalError("projection kernel must be square");
  }
  if (rank_ < 1 || rank_ > static_cast<int>(k_.rows())) {
    throw NumericalError("projection kernel rank out of range");
  }
  const double sym = (k_ - k_.transpose()).cwiseAbs().maxCoeff();
  if (sym > 1e-10) {
    throw NumericalError("projection kernel is not symmetric, max asym " +
                         std::to_string(sym));
  }
  const double idem = (k_ * k_ - k_).cwiseAbs().maxCoeff();
  if (idem > 1e-8) {
    throw NumericalError("projection kernel is not idempotent, residual " +
                         std::to_string(idem));
  }
  const double tr = k_.trace();
  if (std::abs(tr - static_cast<double>(rank_)) > 1e-8) {
    throw NumericalError("projection kernel trace " + std::to_string(tr) +
                         " != rank " + std::to_string(rank_));
  }
}

ProjectionKernel build_projection_kernel(const FeatureMatrix& a) {
  const Eigen::MatrixXd gram = a.matrix() * a.matrix().transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("A A^T is numerically singular");
  }
  Eigen::MatrixXd k = a.matrix().transpose() * ldlt.solve(a.matrix());
  // Symmetrize before the invariant check; the solve introduces tiny
  // asymmetry at machine precision.
  k = 0.5 * (k + k.transpose());
  return ProjectionKernel(std::move(k), a.rows());
}

double squared_volume(const FeatureMatrix& a, std::span<const int> cols) {
  const double lv = log_squared_volume(a, cols);
  return std::isinf(lv) ? 0.0 : std::exp(lv);
}

double log_squared_volume(const FeatureMatrix& a, std::span<const int> cols) {
  const Eigen::Index p = static_cast<Eigen::Index>(cols.size());
  if (p == 0) return 0.0;  // empty product, volume 1
  if (p > a.rows()) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd sub = a.columns(cols);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  const double thresh = diag.size() > 0 ? diag.maxCoeff() * kRankTol : 0.0;
  double log_sq = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (diag[i] <= thresh) {
      return -std::numeric_limits<double>::infinity();
    }
    log_sq += 2.0 * std::log(diag[i]);
  }
  return log_sq;
}

double cauchy_binet_total(const FeatureMatrix& a) {
  const Eigen::MatrixXd gram = a.matrix() * a.matrix().transpose();
  return gram.determinant();
}

}  // namespace zonodpp
