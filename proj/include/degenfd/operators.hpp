#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "degenfd/grid.hpp"
#include "degenfd/random.hpp"

namespace degenfd {

using Matrix = Eigen::MatrixXd;

/// F(M) = sup_a inf_b ( -Tr(A_ab M) ) over a finite family of symmetric,
/// (lambda, Lambda)-elliptic, diagonally dominant coefficient matrices.
///
/// Diagonal dominance (a_ii >= sum_{j != i} |a_ij|) is what makes the
/// term-by-term stencil assembly in apply_F_hessian monotone.
class IsaacsOperator {
 public:
  IsaacsOperator(std::vector<std::vector<Matrix>> families, double lambda, double Lambda)
      : families_(std::move(families)), lambda_(lambda), Lambda_(Lambda) {
    validate();
    flatten();
  }

  /// F(M) = -Tr(M), i.e. F(D^2 u) = -Laplacian u. In 1D this is -u''.
  static IsaacsOperator negative_laplacian(std::size_t dim) {
    return IsaacsOperator({{Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))}},
                          1.0, 1.0);
  }

  std::size_t dim() const noexcept { return dim_; }
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  const std::vector<std::vector<Matrix>>& families() const noexcept { return families_; }
  bool has_cross_terms() const noexcept { return cross_; }
  std::size_t pair_count() const noexcept { return dim_ * (dim_ - 1) / 2; }

  // Flat coefficient layout per matrix: d diagonal entries, then a_ij for i < j.
  std::size_t coeff_stride() const noexcept { return dim_ + pair_count(); }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<const std::size_t> family_offsets() const noexcept { return offsets_; }

 private:
  void validate() {
    if (!(lambda_ > 0.0) || !(Lambda_ >= lambda_))
      throw InputError("ellipticity constants must satisfy 0 < lambda <= Lambda");
    if (families_.empty()) throw InputError("Isaacs operator needs at least one family");
    dim_ = 0;
    for (const auto& fam : families_) {
      if (fam.empty()) throw InputError("Isaacs operator has an empty inner family");
      for (const Matrix& A : fam) {
        if (A.rows() != A.cols() || A.rows() == 0) throw InputError("coefficient matrix must be square");
        if (dim_ == 0) dim_ = static_cast<std::size_t>(A.rows());
        if (static_cast<std::size_t>(A.rows()) != dim_)
          throw InputError("coefficient matrices have inconsistent dimensions");
        if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10)
          throw InputError("coefficient matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < lambda_ - 1e-10 || eig.eigenvalues().maxCoeff() > Lambda_ + 1e-10)
          throw InputError("coefficient matrix eigenvalues fall outside [lambda, Lambda]");
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
          const double off = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
          if (A(i, i) < off - 1e-12) throw InputError("coefficient matrix is not diagonally dominant");
        }
      }
    }
    if (dim_ > kMaxDim) throw InputError("operator dimension exceeds the supported maximum");
  }

  void flatten() {
    cross_ = false;
    offsets_.push_back(0);
    for (const auto& fam : families_) {
      for (const Matrix& A : fam) {
        for (std::size_t i = 0; i < dim_; ++i) coeffs_.push_back(A(i, i));
        for (std::size_t i = 0; i < dim_; ++i)
          for (std::size_t j = i + 1; j < dim_; ++j) {
            coeffs_.push_back(A(i, j));
            cross_ = cross_ || A(i, j) != 0.0;
          }
      }
      offsets_.push_back(offsets_.back() + fam.size());
    }
  }

  std::vector<std::vector<Matrix>> families_;
  double lambda_, Lambda_;
  std::size_t dim_ = 0;
  bool cross_ = false;
  std::vector<double> coeffs_;
  std::vector<std::size_t> offsets_;
};

/// sup_a inf_b of -Tr(A_ab M).
inline double isaacs_eval(const IsaacsOperator& F, const Matrix& M) {
  if (static_cast<std::size_t>(M.rows()) != F.dim() || static_cast<std::size_t>(M.cols()) != F.dim())
    throw InputError("matrix dimension does not match the operator");
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& fam : F.families()) {
    double inf = std::numeric_limits<double>::infinity();
    for (const Matrix& A : fam) inf = std::min(inf, -(A.cwiseProduct(M.transpose())).sum());
    sup = std::max(sup, inf);
  }
  return sup;
}

namespace detail {
inline void require_interior(const GridFunction& u, std::size_t node) {
  if (node >= u.size()) throw StencilError("node index out of range", node);
  if (!u.grid().is_interior(node)) throw StencilError("stencil requested at a boundary node", node);
}
}  // namespace detail

/// (u(x + h e_i) + u(x - h e_i) - 2 u(x)) / h^2
inline double hessian_diag(const GridFunction& u, std::size_t node, std::size_t axis) {
  detail::require_interior(u, node);
  if (axis >= u.grid().dim()) throw InputError("axis out of range");
  const std::size_t s = u.grid().stride(axis);
  const double h = u.grid().h();
  return (u[node + s] + u[node - s] - 2.0 * u[node]) / (h * h);
}

/// Monotone seven-point approximation of d^2u / dx_i dx_j.
///
/// sign = +1 samples the diagonal x +- h(e_i + e_j) and has non-negative
/// weights on it, so it is the variant to pair with a non-negative
/// coefficient a_ij; sign = -1 samples x +- h(e_i - e_j) and carries the
/// opposite signs, for a_ij < 0. Both are exact on quadratics.
inline double hessian_cross(const GridFunction& u, std::size_t node, std::size_t i, std::size_t j, int sign) {
  detail::require_interior(u, node);
  const Grid& g = u.grid();
  if (i >= g.dim() || j >= g.dim() || i == j) throw InputError("cross derivative needs two distinct axes");
  if (sign != 1 && sign != -1) throw InputError("cross stencil sign must be +1 or -1");
  const std::size_t si = g.stride(i), sj = g.stride(j);
  const double h2 = g.h() * g.h();
  const double axis = u[node + si] + u[node - si] + u[node + sj] + u[node - sj];
  if (sign > 0) return (2.0 * u[node] + u[node + si + sj] + u[node - si - sj] - axis) / (2.0 * h2);
  return -(2.0 * u[node] + u[node + si - sj] + u[node - si + sj] - axis) / (2.0 * h2);
}

/// F(D_h^2 u(x)): each -a_ij d_ij term uses the stencil whose sign matches a_ij.
inline double apply_F_hessian(const IsaacsOperator& F, const GridFunction& u, std::size_t node) {
  detail::require_interior(u, node);
  const Grid& g = u.grid();
  const std::size_t d = g.dim();
  if (F.dim() != d) throw InputError("operator dimension does not match the grid");
  const double* v = u.data();
  const double h2 = g.h() * g.h();
  const double c = v[node];

  std::array<double, kMaxDim> diag{};
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t s = g.stride(a);
    diag[a] = (v[node + s] + v[node - s] - 2.0 * c) / h2;
  }
  std::array<double, kMaxDim*(kMaxDim - 1) / 2> plus{}, minus{};
  if (F.has_cross_terms()) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j, ++p) {
        const std::size_t si = g.stride(i), sj = g.stride(j);
        const double axis = v[node + si] + v[node - si] + v[node + sj] + v[node - sj];
        plus[p] = (2.0 * c + v[node + si + sj] + v[node - si - sj] - axis) / (2.0 * h2);
        minus[p] = -(2.0 * c + v[node + si - sj] + v[node - si + sj] - axis) / (2.0 * h2);
      }
  }

  const auto coeffs = F.coefficients();
  const auto offsets = F.family_offsets();
  const std::size_t stride = F.coeff_stride();
  const std::size_t pairs = F.pair_count();
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t fam = 0; fam + 1 < offsets.size(); ++fam) {
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t m = offsets[fam]; m < offsets[fam + 1]; ++m) {
      const double* a = coeffs.data() + m * stride;
      double val = 0.0;
      for (std::size_t i = 0; i < d; ++i) val -= a[i] * diag[i];
      for (std::size_t p = 0; p < pairs; ++p) {
        const double aij = a[d + p];
        if (aij != 0.0) val -= 2.0 * aij * (aij > 0.0 ? plus[p] : minus[p]);
      }
      inf = std::min(inf, val);
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

/// Upwind |D_h u(x)|^2 = h^-2 sum_i max(u(x) - u(x + h e_i), u(x) - u(x - h e_i), 0)^2.
inline double upwind_grad_sq(const GridFunction& u, std::size_t node) {
  detail::require_interior(u, node);
  const Grid& g = u.grid();
  const double* v = u.data();
  const double c = v[node];
  double sum = 0.0;
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const double m = std::max({c - v[node + s], c - v[node - s], 0.0});
    sum += m * m;
  }
  return sum / (g.h() * g.h());
}

struct EllipticityViolation {
  std::size_t node;
  std::string description;
};

struct DegenerateEllipticityReport {
  std::size_t trials = 0;
  std::vector<EllipticityViolation> violations;
  bool passed() const noexcept { return violations.empty(); }
};

/// Randomised check that a pointwise discrete operator is degenerate
/// elliptic: raising u at the evaluation node never decreases it, raising u at
/// any other node of its 3^d box never increases it.
inline DegenerateEllipticityReport check_operator_ellipticity(
    const std::function<double(const GridFunction&, std::size_t)>& op, const Grid& grid, std::size_t trials,
    std::uint64_t seed, double slack = 1e-12) {
  DegenerateEllipticityReport report;
  report.trials = trials;
  Rng rng(seed);
  const auto interior = grid.interior_nodes();
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  std::uniform_real_distribution<double> bump(1e-3, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    GridFunction u = random_grid_function(grid, rng);
    const std::size_t x = interior[pick(rng)];
    const double base = op(u, x);

    GridFunction up = u;
    up[x] += bump(rng);
    if (op(up, x) < base - slack) report.violations.push_back({x, "decreased when the centre value was raised"});

    const auto nbrs = box_neighbors(grid, x);
    std::uniform_int_distribution<std::size_t> pick_nbr(0, nbrs.size() - 1);
    const std::size_t y = nbrs[pick_nbr(rng)];
    GridFunction raised = u;
    raised[y] += bump(rng);
    if (op(raised, x) > base + slack)
      report.violations.push_back({x, "increased when neighbour " + std::to_string(y) + " was raised"});
  }
  return report;
}

}  // namespace degenfd
