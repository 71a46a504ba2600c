#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dfo/errors.hpp"

namespace dfo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Bounds {
  Vector lo;
  Vector hi;
};

// Black-box minimization problem: f, dimension, start point, optional
// known minimum and box bounds. The callable must be deterministic.
struct ObjectiveProblem {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> eval;
  Vector x0;
  std::optional<double> f_opt_hint;
  std::optional<Bounds> bounds;

  // Candidate points are clipped into the box before evaluation.
  Vector clip(Vector x) const {
    if (bounds) {
      for (int i = 0; i < x.size(); ++i)
        x[i] = std::min(bounds->hi[i], std::max(bounds->lo[i], x[i]));
    }
    return x;
  }
};

struct EvalRecord {
  std::int64_t index;  // 1-based, strictly increasing
  Vector x;
  double value;
  double time_s;  // monotonic, relative to ledger creation
};

namespace detail {
inline std::string point_key(const Vector& x) {
  // exact bit pattern; used for in-run deduplication
  return std::string(reinterpret_cast<const char*>(x.data()),
                     sizeof(double) * static_cast<std::size_t>(x.size()));
}
}  // namespace detail

// Per-run evaluation meter. One ledger per solver run; never shared.
class EvaluationLedger {
 public:
  explicit EvaluationLedger(std::optional<std::int64_t> budget = std::nullopt)
      : budget_(budget), start_(std::chrono::steady_clock::now()) {}

  std::int64_t count() const { return static_cast<std::int64_t>(history_.size()); }
  std::optional<std::int64_t> budget() const { return budget_; }
  const std::vector<EvalRecord>& history() const { return history_; }

  bool exhausted() const { return budget_ && count() >= *budget_; }
  std::int64_t remaining() const {
    return budget_ ? *budget_ - count() : std::numeric_limits<std::int64_t>::max();
  }

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Cached value for a previously evaluated point (exact bit match).
  std::optional<double> lookup(const Vector& x) const {
    auto it = cache_.find(detail::point_key(x));
    if (it == cache_.end()) return std::nullopt;
    return it->second;
  }

  void record(const Vector& x, double value) {
    EvalRecord rec;
    rec.index = count() + 1;
    rec.x = x;
    rec.value = value;
    rec.time_s = elapsed_s();
    history_.push_back(std::move(rec));
    cache_.emplace(detail::point_key(x), value);
  }

  void write_history_csv(std::ostream& os, bool dump_points = false) const;

 private:
  std::optional<std::int64_t> budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<EvalRecord> history_;
  std::unordered_map<std::string, double> cache_;
};

// Metered evaluation: clips to bounds, charges the budget, appends history.
inline double evaluate(const ObjectiveProblem& problem, EvaluationLedger& ledger,
                       const Vector& x) {
  if (x.size() != problem.dim)
    throw DimensionMismatch("evaluate: point has length " + std::to_string(x.size()) +
                            ", problem '" + problem.name + "' has dim " +
                            std::to_string(problem.dim));
  if (ledger.exhausted())
    throw BudgetExhausted("evaluate: budget of " + std::to_string(*ledger.budget()) +
                          " evaluations exhausted");
  Vector xc = problem.clip(x);
  double value = problem.eval(xc);
  ledger.record(xc, value);
  return value;
}

namespace fmt {
// shortest round-trip representation; identical runs produce identical text
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace fmt

inline void EvaluationLedger::write_history_csv(std::ostream& os, bool dump_points) const {
  os << "eval_index,time_s,f_value";
  if (dump_points && !history_.empty())
    for (int i = 0; i < history_.front().x.size(); ++i) os << ",x" << i + 1;
  os << "\n";
  for (const auto& rec : history_) {
    os << rec.index << "," << fmt::num(rec.time_s) << "," << fmt::num(rec.value);
    if (dump_points)
      for (int i = 0; i < rec.x.size(); ++i) os << "," << fmt::num(rec.x[i]);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Analytic test bed
// ---------------------------------------------------------------------------

namespace problems {

inline double sphere(const Vector& x) { return x.squaredNorm(); }

inline double ellipsoid(const Vector& x) {
  double f = 0;
  for (int i = 0; i < x.size(); ++i) f += (i + 1) * x[i] * x[i];
  return f;
}

inline double schwefel12(const Vector& x) {
  double f = 0, s = 0;
  for (int i = 0; i < x.size(); ++i) {
    s += x[i];
    f += s * s;
  }
  return f;
}

inline double rosenbrock_chained(const Vector& x) {
  double f = 0;
  for (int i = 0; i + 1 < x.size(); ++i) {
    double a = x[i + 1] - x[i] * x[i];
    double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

// pairwise-decoupled extension; its only stationary point is the minimum
inline double rosenbrock_extended(const Vector& x) {
  double f = 0;
  for (int i = 0; i + 1 < x.size(); i += 2) {
    double a = x[i + 1] - x[i] * x[i];
    double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

inline double trid(const Vector& x) {
  double f = 0;
  for (int i = 0; i < x.size(); ++i) f += (x[i] - 1.0) * (x[i] - 1.0);
  for (int i = 1; i < x.size(); ++i) f -= x[i] * x[i - 1];
  return f;
}

inline double powell_singular(const Vector& x) {
  double f = 0;
  for (int i = 0; i + 3 < x.size(); i += 4) {
    double a = x[i] + 10.0 * x[i + 1];
    double b = x[i + 2] - x[i + 3];
    double c = x[i + 1] - 2.0 * x[i + 2];
    double d = x[i] - x[i + 3];
    f += a * a + 5.0 * b * b + c * c * c * c + 10.0 * d * d * d * d;
  }
  return f;
}

inline double tridia(const Vector& x) {
  double f = (x[0] - 1.0) * (x[0] - 1.0);
  for (int i = 1; i < x.size(); ++i) {
    double r = 2.0 * x[i] - x[i - 1];
    f += (i + 1) * r * r;
  }
  return f;
}

inline double zakharov(const Vector& x) {
  double q = 0, s = 0;
  for (int i = 0; i < x.size(); ++i) {
    q += x[i] * x[i];
    s += 0.5 * (i + 1) * x[i];
  }
  return q + s * s + s * s * s * s;
}

inline double dqrtic(const Vector& x) {
  double f = 0;
  for (int i = 0; i < x.size(); ++i) {
    double r = x[i] - (i + 1);
    f += r * r * r * r;
  }
  return f;
}

inline double discrete_bv(const Vector& x) {
  const int n = static_cast<int>(x.size());
  const double h = 1.0 / (n + 1);
  double f = 0;
  for (int i = 0; i < n; ++i) {
    double xm = i > 0 ? x[i - 1] : 0.0;
    double xp = i < n - 1 ? x[i + 1] : 0.0;
    double t = (i + 1) * h;
    double u = x[i] + t + 1.0;
    double r = 2.0 * x[i] - xm - xp + 0.5 * h * h * u * u * u;
    f += r * r;
  }
  return f;
}

inline double broyden_tridiag(const Vector& x) {
  const int n = static_cast<int>(x.size());
  double f = 0;
  for (int i = 0; i < n; ++i) {
    double xm = i > 0 ? x[i - 1] : 0.0;
    double xp = i < n - 1 ? x[i + 1] : 0.0;
    double r = (3.0 - 2.0 * x[i]) * x[i] - xm - 2.0 * xp + 1.0;
    f += r * r;
  }
  return f;
}

inline double arwhead(const Vector& x) {
  const int n = static_cast<int>(x.size());
  double f = 0;
  for (int i = 0; i + 1 < n; ++i) {
    double a = x[i] * x[i] + x[n - 1] * x[n - 1];
    f += a * a - 4.0 * x[i] + 3.0;
  }
  return f;
}

inline double absval(const Vector& x) { return x.cwiseAbs().sum(); }

}  // namespace problems

namespace detail {

inline ObjectiveProblem make_problem(std::string name, int n,
                                     std::function<double(const Vector&)> f, Vector x0,
                                     double fopt) {
  ObjectiveProblem p;
  p.name = std::move(name);
  p.dim = n;
  p.eval = std::move(f);
  p.x0 = std::move(x0);
  p.f_opt_hint = fopt;
  return p;
}

inline Vector powell_x0(int n) {
  Vector x(n);
  for (int i = 0; i + 3 < n; i += 4) {
    x[i] = 3.0;
    x[i + 1] = -1.0;
    x[i + 2] = 0.0;
    x[i + 3] = 1.0;
  }
  return x;
}

inline Vector rosen_x0(int n) {
  Vector x(n);
  for (int i = 0; i < n; i += 2) {
    x[i] = -1.2;
    if (i + 1 < n) x[i + 1] = 1.0;
  }
  return x;
}

inline Vector bv_x0(int n) {
  Vector x(n);
  const double h = 1.0 / (n + 1);
  for (int i = 0; i < n; ++i) {
    double t = (i + 1) * h;
    x[i] = t * (t - 1.0);
  }
  return x;
}

inline double trid_opt(int n) { return -n * (n + 4.0) * (n - 1.0) / 6.0; }

}  // namespace detail

// The 13-problem analytic suite. Dimension histogram matches the paper's
// table: {5:1, 8:1, 15:3, 20:4, 25:2, 30:2}. Every minimum is known.
inline std::vector<ObjectiveProblem> benchmark_suite() {
  using namespace problems;
  using namespace detail;
  std::vector<ObjectiveProblem> suite;
  suite.push_back(make_problem("trid5", 5, trid, Vector::Zero(5), trid_opt(5)));
  suite.push_back(make_problem("powell_singular8", 8, powell_singular, powell_x0(8), 0.0));
  suite.push_back(make_problem("sphere15", 15, sphere, Vector::Constant(15, 2.0), 0.0));
  suite.push_back(make_problem("ellipsoid15", 15, ellipsoid, Vector::Ones(15), 0.0));
  suite.push_back(make_problem("schwefel12_15", 15, schwefel12, Vector::Constant(15, 0.5), 0.0));
  suite.push_back(make_problem("ext_rosenbrock20", 20, rosenbrock_extended, rosen_x0(20), 0.0));
  suite.push_back(make_problem("tridia20", 20, tridia, Vector::Ones(20), 0.0));
  suite.push_back(make_problem("zakharov20", 20, zakharov, Vector::Constant(20, 0.5), 0.0));
  suite.push_back(make_problem("dqrtic20", 20, dqrtic, Vector::Zero(20), 0.0));
  suite.push_back(make_problem("discrete_bv25", 25, discrete_bv, bv_x0(25), 0.0));
  suite.push_back(make_problem("broyden_tridiag25", 25, broyden_tridiag,
                               Vector::Constant(25, -1.0), 0.0));
  suite.push_back(make_problem("arwhead30", 30, arwhead, Vector::Ones(30), 0.0));
  suite.push_back(make_problem("trid30", 30, trid, Vector::Zero(30), trid_opt(30)));
  return suite;
}

// Suite plus small demo problems addressable by name from the CLI.
inline std::vector<ObjectiveProblem> problem_registry() {
  using namespace problems;
  using namespace detail;
  auto reg = benchmark_suite();
  reg.push_back(make_problem("sphere2", 2, sphere, (Vector(2) << 3.0, 4.0).finished(), 0.0));
  reg.push_back(
      make_problem("rosenbrock2", 2, rosenbrock_chained, (Vector(2) << -1.2, 1.0).finished(), 0.0));
  reg.push_back(make_problem("absval2", 2, absval, Vector::Ones(2), 0.0));
  return reg;
}

inline const ObjectiveProblem* find_problem(const std::vector<ObjectiveProblem>& set,
                                            const std::string& name) {
  for (const auto& p : set)
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace dfo
