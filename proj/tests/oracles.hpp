// Test-only oracles, independent of the library's implementation paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "dfo/interp_model.hpp"
#include "dfo/multiobjective.hpp"
#include "dfo/objective.hpp"

namespace oracles {

using dfo::Matrix;
using dfo::Vector;

// ---------------------------------------------------------------------------
// Dense equality-constrained least-squares fit in basis space:
//   min (a - abar)' W (a - abar)  s.t.  M a = f
// where a are quadratic-basis coefficients and W weights the Frobenius norm
// (1 on x_i^2/2 terms, 2 on cross terms). Solves the same program as
// fit_min_frobenius through a completely different route.
// ---------------------------------------------------------------------------

struct DenseFit {
  double c;
  Vector g;
  Matrix H;
};

inline DenseFit dense_min_frobenius(const dfo::InterpolationSet& Y, const Matrix& H_ref) {
  const int n = Y.dim();
  const dfo::PolynomialBasis basis = dfo::PolynomialBasis::quadratic(n);
  const int q1 = basis.size();
  const int p1 = Y.size();
  const Matrix M = dfo::interpolation_matrix(basis, Y);
  Vector f(p1);
  for (int i = 0; i < p1; ++i) f[i] = Y.values[(std::size_t)i];

  Vector w = Vector::Zero(q1);
  Vector abar = Vector::Zero(q1);
  for (int t = 0; t < q1; ++t) {
    const auto& mono = basis.terms[(std::size_t)t];
    if (mono.kind == dfo::MonomialKind::SquareHalf) {
      w[t] = 1.0;
      abar[t] = H_ref(mono.i, mono.i);
    } else if (mono.kind == dfo::MonomialKind::Cross) {
      w[t] = 2.0;
      abar[t] = H_ref(mono.i, mono.j);
    }
  }

  const int dim = q1 + p1;
  Matrix K = Matrix::Zero(dim, dim);
  K.topLeftCorner(q1, q1) = (2.0 * w).asDiagonal();
  K.topRightCorner(q1, p1) = M.transpose();
  K.bottomLeftCorner(p1, q1) = M;
  Vector rhs(dim);
  rhs.head(q1) = 2.0 * w.cwiseProduct(abar);
  rhs.tail(p1) = f;

  Vector sol = Eigen::FullPivLU<Matrix>(K).solve(rhs);
  DenseFit out;
  out.c = sol[0];
  out.g = sol.segment(1, n);
  out.H = Matrix::Zero(n, n);
  for (int t = 0; t < q1; ++t) {
    const auto& mono = basis.terms[(std::size_t)t];
    if (mono.kind == dfo::MonomialKind::SquareHalf) out.H(mono.i, mono.i) = sol[t];
    if (mono.kind == dfo::MonomialKind::Cross) {
      out.H(mono.i, mono.j) = sol[t];
      out.H(mono.j, mono.i) = sol[t];
    }
  }
  // oracle model is centered at Y.center like the library's
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo hypervolume (minimization, box [0, ref])
// ---------------------------------------------------------------------------

inline double mc_hypervolume(const std::vector<dfo::ObjectiveVector>& front,
                             const dfo::ObjectiveVector& ref, std::int64_t samples,
                             std::uint64_t seed) {
  const int m = ref.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  // flatten for a tight loop
  std::vector<double> pts;
  for (const auto& p : front) {
    bool inside = true;
    for (int i = 0; i < m; ++i)
      if (p.values[(std::size_t)i] > ref.values[(std::size_t)i]) inside = false;
    if (inside)
      for (int i = 0; i < m; ++i) pts.push_back(p.values[(std::size_t)i]);
  }
  const std::size_t np = pts.size() / (std::size_t)m;
  if (np == 0) return 0.0;

  double box = 1.0;
  for (int i = 0; i < m; ++i) box *= ref.values[(std::size_t)i];

  std::int64_t hits = 0;
  double u[3];
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i) u[i] = ref.values[(std::size_t)i] * uni(rng);
    for (std::size_t j = 0; j < np; ++j) {
      const double* p = &pts[j * (std::size_t)m];
      bool dom = true;
      for (int i = 0; i < m; ++i)
        if (p[i] > u[i]) {
          dom = false;
          break;
        }
      if (dom) {
        ++hits;
        break;
      }
    }
  }
  return box * double(hits) / double(samples);
}

// brute-force all-pairs non-dominated filter
inline std::vector<int> brute_force_front(const std::vector<dfo::ObjectiveVector>& pts) {
  std::vector<int> front;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size() && keep; ++j)
      if (i != j && dfo::dominates(pts[j], pts[i])) keep = false;
    if (keep) front.push_back((int)i);
  }
  return front;
}

// ---------------------------------------------------------------------------
// Finite differences and a few analytic derivatives
// ---------------------------------------------------------------------------

inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h) {
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rosenbrock2(const Vector& x) {
  const double a = x[1] - x[0] * x[0];
  const double b = 1.0 - x[0];
  return 100.0 * a * a + b * b;
}

inline Vector rosenbrock2_grad(const Vector& x) {
  Vector g(2);
  const double a = x[1] - x[0] * x[0];
  g[0] = -400.0 * x[0] * a - 2.0 * (1.0 - x[0]);
  g[1] = 200.0 * a;
  return g;
}

// Grid oracle for the biobjective toy (x^2, (1-x)^2) on [0,1]: every x is
// Pareto optimal, so a dense 1-D grid yields the true front; its exact HV
// approaches 5/6 from below. Also returns the HV of the five paper-weight
// scalarization minimizers, a lower bound any archive must reach.
struct ToyOracle {
  double front_hv = 0.0;       // dense-grid true front
  double minimizers_hv = 0.0;  // the 5 weighted-sum minimizers only
};

inline ToyOracle toy_grid_oracle(int grid_points = 200001) {
  ToyOracle out;
  std::vector<dfo::ObjectiveVector> curve;
  curve.reserve((std::size_t)grid_points);
  for (int k = 0; k < grid_points; ++k) {
    const double x = double(k) / (grid_points - 1);
    curve.push_back({{x * x, (1.0 - x) * (1.0 - x)}});
  }
  dfo::ObjectiveVector ref{{1.0, 1.0}};
  out.front_hv = dfo::hypervolume(curve, ref);

  std::vector<dfo::ObjectiveVector> sols;
  for (int i = 0; i <= 4; ++i) {
    const double w1 = 0.25 * i, w2 = 1.0 - 0.25 * i;
    double best = std::numeric_limits<double>::infinity();
    double bx = 0.0;
    for (int k = 0; k < grid_points; ++k) {
      const double x = double(k) / (grid_points - 1);
      const double v = w1 * x * x + w2 * (1.0 - x) * (1.0 - x);
      if (v < best) {
        best = v;
        bx = x;
      }
    }
    sols.push_back({{bx * bx, (1.0 - bx) * (1.0 - bx)}});
  }
  out.minimizers_hv = dfo::hypervolume(sols, ref);
  return out;
}

}  // namespace oracles
