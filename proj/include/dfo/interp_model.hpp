#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "dfo/errors.hpp"
#include "dfo/objective.hpp"

namespace dfo {

// ---------------------------------------------------------------------------
// Quadratic monomial basis
// ---------------------------------------------------------------------------

enum class MonomialKind { Constant, Linear, SquareHalf, Cross };

struct Monomial {
  MonomialKind kind;
  int i = -1;
  int j = -1;
};

// Term order is fixed: 1, x_1..x_n, x_1^2/2..x_n^2/2, cross x_i x_j (i<j,
// lexicographic). Evaluating all terms at 0 yields (1, 0, ..., 0).
struct PolynomialBasis {
  int dim = 0;
  std::vector<Monomial> terms;

  static PolynomialBasis linear(int n) {
    PolynomialBasis b;
    b.dim = n;
    b.terms.push_back({MonomialKind::Constant});
    for (int i = 0; i < n; ++i) b.terms.push_back({MonomialKind::Linear, i});
    return b;
  }

  static PolynomialBasis quadratic(int n) {
    PolynomialBasis b = linear(n);
    for (int i = 0; i < n; ++i) b.terms.push_back({MonomialKind::SquareHalf, i});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) b.terms.push_back({MonomialKind::Cross, i, j});
    return b;
  }

  int size() const { return static_cast<int>(terms.size()); }  // q+1

  double eval_term(int t, const Vector& s) const {
    const Monomial& m = terms[static_cast<std::size_t>(t)];
    switch (m.kind) {
      case MonomialKind::Constant: return 1.0;
      case MonomialKind::Linear: return s[m.i];
      case MonomialKind::SquareHalf: return 0.5 * s[m.i] * s[m.i];
      case MonomialKind::Cross: return s[m.i] * s[m.j];
    }
    return 0.0;
  }

  Vector eval_all(const Vector& s) const {
    Vector row(size());
    for (int t = 0; t < size(); ++t) row[t] = eval_term(t, s);
    return row;
  }

  // gradient of the polynomial with given coefficients, at shifted point s
  Vector eval_gradient(const Vector& coeffs, const Vector& s) const {
    Vector g = Vector::Zero(dim);
    for (int t = 0; t < size(); ++t) {
      const Monomial& m = terms[static_cast<std::size_t>(t)];
      double a = coeffs[t];
      switch (m.kind) {
        case MonomialKind::Constant: break;
        case MonomialKind::Linear: g[m.i] += a; break;
        case MonomialKind::SquareHalf: g[m.i] += a * s[m.i]; break;
        case MonomialKind::Cross:
          g[m.i] += a * s[m.j];
          g[m.j] += a * s[m.i];
          break;
      }
    }
    return g;
  }
};

// determined quadratic set size (n+1)(n+2)/2
inline int determined_size(int n) { return (n + 1) * (n + 2) / 2; }

// ---------------------------------------------------------------------------
// Interpolation set and model
// ---------------------------------------------------------------------------

struct InterpolationSet {
  Vector center;
  std::vector<Vector> points;
  std::vector<double> values;
  double radius = 0.0;  // radius of the containing ball around center

  int dim() const { return static_cast<int>(center.size()); }
  int size() const { return static_cast<int>(points.size()); }  // p+1

  void update_radius() {
    radius = 0.0;
    for (const auto& y : points) radius = std::max(radius, (y - center).norm());
  }

  bool contains_exact(const Vector& y) const {
    for (const auto& p : points)
      if (p.size() == y.size() && p == y) return true;
    return false;
  }
};

struct QuadraticModel {
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix H;  // stored symmetric
  double kappa_bhm_cap = 1e6;

  double value_at_step(const Vector& s) const {
    return c + g.dot(s) + 0.5 * s.dot(H * s);
  }
  double value(const Vector& x) const { return value_at_step(x - center); }
  Vector gradient(const Vector& x) const { return g + H * (x - center); }
};

struct RankReport {
  bool full_rank = false;
  int rank = 0;
  std::vector<int> dependent_indices;  // minimal row-removal set
  double tolerance_used = 0.0;
};

// ---------------------------------------------------------------------------
// Interpolation matrix and rank assessment
// ---------------------------------------------------------------------------

// Entry (i,j) = phi_j(y_i - center). Shifting to the set's center keeps the
// system well conditioned at small radii; the interpolant is unchanged.
inline Matrix interpolation_matrix(const PolynomialBasis& basis, const InterpolationSet& Y) {
  Matrix M(Y.size(), basis.size());
  for (int i = 0; i < Y.size(); ++i) {
    if (Y.points[static_cast<std::size_t>(i)].size() != basis.dim)
      throw DimensionMismatch("interpolation_matrix: point/basis dimension mismatch");
    M.row(i) = basis.eval_all(Y.points[static_cast<std::size_t>(i)] - Y.center).transpose();
  }
  return M;
}

inline constexpr double kRankRelTol = 1e-10;

inline RankReport check_rank(const Matrix& M) {
  RankReport report;
  if (M.rows() == 0 || M.cols() == 0) return report;  // rank 0, not full

  Eigen::BDCSVD<Matrix> svd(M);
  const double smax = svd.singularValues()[0];
  report.tolerance_used = kRankRelTol * smax;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > report.tolerance_used) ++rank;
  report.rank = rank;
  report.full_rank = rank == static_cast<int>(std::min(M.rows(), M.cols()));

  if (rank < M.rows()) {
    // Pivoted QR on M^T orders rows by independence; the trailing
    // (rows - rank) rows form a minimal removal set.
    Eigen::ColPivHouseholderQR<Matrix> qr(M.transpose());
    const auto& perm = qr.colsPermutation().indices();
    for (int k = rank; k < M.rows(); ++k)
      report.dependent_indices.push_back(perm[k]);
    std::sort(report.dependent_indices.begin(), report.dependent_indices.end());
  }
  return report;
}

namespace detail {

// Radius-normalized copy used internally for conditioning. Pure rescaling:
// rank and dependence structure are unchanged in exact arithmetic.
inline double set_scale(const InterpolationSet& Y) {
  double s = Y.radius;
  for (const auto& y : Y.points) s = std::max(s, (y - Y.center).norm());
  return s > 0 ? s : 1.0;
}

inline Matrix scaled_matrix(const PolynomialBasis& basis, const InterpolationSet& Y,
                            double scale) {
  Matrix M(Y.size(), basis.size());
  for (int i = 0; i < Y.size(); ++i)
    M.row(i) =
        basis.eval_all((Y.points[static_cast<std::size_t>(i)] - Y.center) / scale).transpose();
  return M;
}

// One round of dependence analysis: returns the indices implicated in a
// linear dependence among the rows of M, or empty when M has full row rank.
inline std::vector<int> dependence_support(const Matrix& M) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M.transpose());
  qr.setThreshold(kRankRelTol);
  const int rank = static_cast<int>(qr.rank());
  if (rank >= M.rows()) return {};

  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> pivots(perm.data(), perm.data() + rank);
  const int dep = perm[rank];  // first non-pivot row

  Matrix P(M.cols(), rank);
  for (int k = 0; k < rank; ++k) P.col(k) = M.row(pivots[static_cast<std::size_t>(k)]);
  Vector coef = P.colPivHouseholderQr().solve(M.row(dep).transpose());

  std::vector<int> support{dep};
  const double cmax = std::max(coef.cwiseAbs().maxCoeff(), 1.0);
  for (int k = 0; k < rank; ++k)
    if (std::abs(coef[k]) > 1e-8 * cmax) support.push_back(pivots[static_cast<std::size_t>(k)]);
  std::sort(support.begin(), support.end());
  return support;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Minimum-Frobenius-norm model fit
// ---------------------------------------------------------------------------

// Fits m(x) = c + g'(x-center) + (x-center)'H(x-center)/2 through all set
// points, minimizing ||H - H_ref||_F among all interpolants. Dual KKT system
// in radius-normalized coordinates:
//   [ A   1  Yh ] [lambda]   [ f - quad(H_ref) ]
//   [ 1'  0  0  ] [  c   ] = [ 0 ]
//   [ Yh' 0  0  ] [  g   ]   [ 0 ]
// with A_ij = (yh_i' yh_j)^2 / 4 and H = H_ref + sum_i lambda_i yh_i yh_i' / 2.
inline QuadraticModel fit_min_frobenius(const InterpolationSet& Y, const Matrix& H_ref,
                                        double kappa_bhm_cap = 1e6) {
  const int n = Y.dim();
  const int p1 = Y.size();
  if (p1 < n + 1)
    throw RankDeficient("fit_min_frobenius: need at least n+1 points, got " +
                        std::to_string(p1));
  if (p1 > determined_size(n))
    throw RankDeficient("fit_min_frobenius: more points than basis terms");

  const PolynomialBasis basis = PolynomialBasis::quadratic(n);
  const double scale = detail::set_scale(Y);
  const Matrix M = detail::scaled_matrix(basis, Y, scale);
  const RankReport rank = check_rank(M);
  if (rank.rank < p1)
    throw RankDeficient("fit_min_frobenius: interpolation matrix is row rank deficient (rank " +
                        std::to_string(rank.rank) + " of " + std::to_string(p1) + ")");

  Matrix Yh(p1, n);
  for (int i = 0; i < p1; ++i)
    Yh.row(i) = ((Y.points[static_cast<std::size_t>(i)] - Y.center) / scale).transpose();

  const Matrix Href_s = H_ref.size() > 0 ? Matrix(H_ref * (scale * scale))
                                         : Matrix(Matrix::Zero(n, n));

  Vector r(p1);
  double fmax = 0.0;
  for (int i = 0; i < p1; ++i) {
    const Vector yi = Yh.row(i).transpose();
    r[i] = Y.values[static_cast<std::size_t>(i)] - 0.5 * yi.dot(Href_s * yi);
    fmax = std::max(fmax, std::abs(Y.values[static_cast<std::size_t>(i)]));
  }

  const int dim = p1 + 1 + n;
  Matrix K = Matrix::Zero(dim, dim);
  Matrix G = Yh * Yh.transpose();
  K.topLeftCorner(p1, p1) = 0.25 * G.array().square().matrix();
  K.block(0, p1, p1, 1).setOnes();
  K.block(0, p1 + 1, p1, n) = Yh;
  K.block(p1, 0, 1, p1).setOnes();
  K.block(p1 + 1, 0, n, p1) = Yh.transpose();

  Vector rhs = Vector::Zero(dim);
  rhs.head(p1) = r;

  Eigen::PartialPivLU<Matrix> lu(K);
  Vector sol = lu.solve(rhs);
  sol += lu.solve(rhs - K * sol);  // one refinement step
  if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
    Eigen::FullPivLU<Matrix> flu(K);
    if (!flu.isInvertible())
      throw NumericalFailure("fit_min_frobenius: singular KKT system");
    sol = flu.solve(rhs);
    sol += flu.solve(rhs - K * sol);
    if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
      throw NumericalFailure("fit_min_frobenius: KKT solve failed");
  }

  const Vector lambda = sol.head(p1);
  QuadraticModel model;
  model.center = Y.center;
  model.kappa_bhm_cap = kappa_bhm_cap;
  model.c = sol[p1];

  Matrix Hs = Href_s;
  for (int i = 0; i < p1; ++i)
    Hs += 0.5 * lambda[i] * (Yh.row(i).transpose() * Yh.row(i));
  Hs = 0.5 * (Hs + Hs.transpose()).eval();  // enforce exact symmetry

  model.g = sol.tail(n) / scale;
  model.H = Hs / (scale * scale);

  // interpolation residual check (skipped if the Hessian cap bites below)
  double resid = 0.0;
  for (int i = 0; i < p1; ++i)
    resid = std::max(resid, std::abs(model.value(Y.points[static_cast<std::size_t>(i)]) -
                                     Y.values[static_cast<std::size_t>(i)]));

  Eigen::SelfAdjointEigenSolver<Matrix> eig(model.H);
  const double hnorm = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (hnorm > kappa_bhm_cap) {
    // Assumption-style bound on ||H||: scale down and refit c, g by least
    // squares on the residual.
    model.H *= kappa_bhm_cap / hnorm;
    Matrix L(p1, n + 1);
    Vector rr(p1);
    for (int i = 0; i < p1; ++i) {
      const Vector s = Y.points[static_cast<std::size_t>(i)] - Y.center;
      L(i, 0) = 1.0;
      L.row(i).tail(n) = (s / scale).transpose();
      rr[i] = Y.values[static_cast<std::size_t>(i)] - 0.5 * s.dot(model.H * s);
    }
    Vector cg = L.colPivHouseholderQr().solve(rr);
    model.c = cg[0];
    model.g = cg.tail(n) / scale;
    return model;
  }

  if (resid > 1e-10 * (1.0 + fmax))
    throw NumericalFailure("fit_min_frobenius: interpolation residual " +
                           std::to_string(resid) + " exceeds tolerance");
  return model;
}

// ---------------------------------------------------------------------------
// Lagrange polynomials and poisedness
// ---------------------------------------------------------------------------

// Coefficient vectors (basis order, centered at the set's center) of the
// Lagrange polynomials l_j with l_j(y_i) = delta_ij. Minimum-norm solution
// when the system is underdetermined.
inline std::vector<Vector> lagrange_polynomials(const InterpolationSet& Y,
                                                const PolynomialBasis& basis) {
  const int p1 = Y.size();
  const double scale = detail::set_scale(Y);
  const Matrix M = detail::scaled_matrix(basis, Y, scale);
  const RankReport report = check_rank(M);
  if (report.rank < p1)
    throw RankDeficient("lagrange_polynomials: set is not poised (rank " +
                        std::to_string(report.rank) + " of " + std::to_string(p1) + ")");

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  std::vector<Vector> coeffs;
  coeffs.reserve(static_cast<std::size_t>(p1));
  for (int j = 0; j < p1; ++j) {
    Vector ej = Vector::Zero(p1);
    ej[j] = 1.0;
    Vector a = cod.solve(ej);
    // unscale: a term of degree d picks up scale^-d
    for (int t = 0; t < basis.size(); ++t) {
      switch (basis.terms[static_cast<std::size_t>(t)].kind) {
        case MonomialKind::Constant: break;
        case MonomialKind::Linear: a[t] /= scale; break;
        default: a[t] /= scale * scale; break;
      }
    }
    coeffs.push_back(std::move(a));
  }
  return coeffs;
}

inline double eval_polynomial(const PolynomialBasis& basis, const Vector& coeffs,
                              const Vector& center, const Vector& x) {
  return coeffs.dot(basis.eval_all(x - center));
}

namespace detail {

// deterministic low-discrepancy points in [0,1)^n (Weyl / R_d sequence)
inline Vector weyl_point(int n, int k) {
  // generalized golden ratio gamma_n: x^(n+1) = x + 1
  double gamma = 1.5;
  for (int it = 0; it < 64; ++it) gamma = std::pow(1.0 + gamma, 1.0 / (n + 1));
  Vector u(n);
  double a = 1.0;
  for (int i = 0; i < n; ++i) {
    a /= gamma;
    double v = 0.5 + a * (k + 1);
    u[i] = v - std::floor(v);
  }
  return u;
}

}  // namespace detail

// Estimate of the poisedness constant: max_j max_{x in B(center,delta)}
// |l_j(x)| via axis probes, 500 quasi-random samples and one local polish.
// A lower bound on the true Lambda, clamped to >= 1.
inline double poisedness_constant(const InterpolationSet& Y, const PolynomialBasis& basis,
                                  const Vector& ball_center, double delta) {
  const auto lagrange = lagrange_polynomials(Y, basis);
  const int n = Y.dim();

  std::vector<Vector> probes;
  probes.push_back(ball_center);
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = delta;
    probes.push_back(ball_center + e);
    probes.push_back(ball_center - e);
  }
  for (const auto& y : Y.points)
    if ((y - ball_center).norm() <= delta * (1.0 + 1e-12)) probes.push_back(y);
  for (int k = 0; k < 500; ++k) {
    Vector s = 2.0 * detail::weyl_point(n, k) - Vector::Ones(n);
    s *= delta;
    if (s.norm() > delta) s *= delta / s.norm();
    probes.push_back(ball_center + s);
  }

  double best = 1.0;
  for (std::size_t j = 0; j < lagrange.size(); ++j) {
    const Vector& a = lagrange[j];
    Vector xbest = probes.front();
    double vbest = -1.0;
    for (const auto& x : probes) {
      double v = std::abs(eval_polynomial(basis, a, Y.center, x));
      if (v > vbest) {
        vbest = v;
        xbest = x;
      }
    }
    // local polish: ascent on |l_j|, projected onto the ball
    Vector x = xbest;
    double fx = vbest;
    double step = 0.25 * delta;
    for (int it = 0; it < 40 && step > 1e-12 * delta; ++it) {
      double sign = eval_polynomial(basis, a, Y.center, x) >= 0 ? 1.0 : -1.0;
      Vector grad = sign * basis.eval_gradient(a, x - Y.center);
      double gn = grad.norm();
      if (gn == 0) break;
      Vector xt = x + (step / gn) * grad;
      Vector d = xt - ball_center;
      if (d.norm() > delta) xt = ball_center + d * (delta / d.norm());
      double ft = std::abs(eval_polynomial(basis, a, Y.center, xt));
      if (ft > fx) {
        x = xt;
        fx = ft;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, fx);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Rank repair
// ---------------------------------------------------------------------------

// Assess-and-regain poisedness: optionally insert z, then while the matrix is
// row rank deficient, find a dependence among the rows and remove the
// implicated point with the largest f-value (ties: the later point goes).
inline InterpolationSet repair_poisedness(
    InterpolationSet Y, const PolynomialBasis& basis, const std::optional<Vector>& z,
    const std::function<double(const Vector&)>& f_lookup) {
  const int n = Y.dim();

  if (z) {
    if (!Y.contains_exact(*z)) {
      Y.points.push_back(*z);
      if (!f_lookup) throw std::invalid_argument("repair_poisedness: z given without f_lookup");
      Y.values.push_back(f_lookup(*z));
      Y.update_radius();
    }
  }

  const double scale = detail::set_scale(Y);
  for (int round = 0; round <= Y.size(); ++round) {
    Matrix M = detail::scaled_matrix(basis, Y, scale);
    std::vector<int> support = detail::dependence_support(M);
    if (support.empty()) return Y;  // full row rank

    if (Y.size() <= n + 1)
      throw IrreparableSet("repair_poisedness: fewer than n+1 points would remain");

    int victim = support.front();
    for (int idx : support) {
      const double fv = Y.values[static_cast<std::size_t>(idx)];
      const double fbest = Y.values[static_cast<std::size_t>(victim)];
      if (fv > fbest || (fv == fbest && idx > victim)) victim = idx;
    }
    Y.points.erase(Y.points.begin() + victim);
    Y.values.erase(Y.values.begin() + victim);
  }
  throw IrreparableSet("repair_poisedness: removal loop did not restore full rank");
}

}  // namespace dfo
