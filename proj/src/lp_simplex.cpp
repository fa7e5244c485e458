// Dense two-phase tableau simplex with Bland's rule. Intended for small
// problems (tests, cross-checks); cost is O(rows * columns) per pivot.
#include <cmath>
#include <limits>

#include "reccoord/lp.hpp"

namespace reccoord::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// How an original variable is recovered from standard-form columns.
struct Mapping {
  enum class Kind { Shifted, Mirrored, Split } kind = Kind::Shifted;
  int col = -1;       // primary standard column
  int neg_col = -1;   // second column for free variables
  double anchor = 0;  // lower bound (Shifted) or upper bound (Mirrored)
};

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs slot holds -objective.
  double& cost(int c) { return at(rows_, c); }

  void pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> a_;
};

enum class Outcome { Optimal, Unbounded };

// Minimizes over columns [0, active_cols) with Bland's rule.
Outcome run_simplex(Tableau& t, std::vector<int>& basis, int active_cols) {
  for (;;) {
    int enter = -1;
    for (int c = 0; c < active_cols; ++c) {
      if (t.cost(c) < -kCostTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) return Outcome::Optimal;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs(r) / a;
      if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && leave >= 0 && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) return Outcome::Unbounded;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve_dense_simplex(const LpProblem& problem) {
  const auto& vars = problem.variables();
  const auto& cons = problem.constraints();

  // Standard form: min c'y, A y = b, y >= 0.
  std::vector<Mapping> map(vars.size());
  std::vector<double> cost;
  int ncols = 0;
  struct Row {
    std::vector<std::pair<int, double>> coefs;
    double rhs;
  };
  std::vector<Row> rows;
  double const_obj = problem.objective_offset();

  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    Mapping& m = map[j];
    if (v.lower > -kInf) {
      m.kind = Mapping::Kind::Shifted;
      m.anchor = v.lower;
      m.col = ncols++;
      cost.push_back(v.cost);
      const_obj += v.cost * v.lower;
      if (v.upper < kInf) rows.push_back({{{m.col, 1.0}}, v.upper - v.lower});
    } else if (v.upper < kInf) {
      m.kind = Mapping::Kind::Mirrored;
      m.anchor = v.upper;
      m.col = ncols++;
      cost.push_back(-v.cost);
      const_obj += v.cost * v.upper;
    } else {
      m.kind = Mapping::Kind::Split;
      m.col = ncols++;
      m.neg_col = ncols++;
      cost.push_back(v.cost);
      cost.push_back(-v.cost);
    }
  }
  // Bound rows get a slack each; they are all "<=" rows.
  const std::size_t bound_rows = rows.size();
  for (std::size_t i = 0; i < bound_rows; ++i) {
    rows[i].coefs.emplace_back(ncols++, 1.0);
    cost.push_back(0.0);
  }
  for (const auto& c : cons) {
    Row row{{}, c.rhs};
    for (const auto& term : c.terms) {
      const Mapping& m = map[term.var.index];
      switch (m.kind) {
        case Mapping::Kind::Shifted:
          row.coefs.emplace_back(m.col, term.coef);
          row.rhs -= term.coef * m.anchor;
          break;
        case Mapping::Kind::Mirrored:
          row.coefs.emplace_back(m.col, -term.coef);
          row.rhs -= term.coef * m.anchor;
          break;
        case Mapping::Kind::Split:
          row.coefs.emplace_back(m.col, term.coef);
          row.coefs.emplace_back(m.neg_col, -term.coef);
          break;
      }
    }
    if (c.relation != Relation::Equal) {
      row.coefs.emplace_back(ncols++, c.relation == Relation::LessEqual ? 1.0 : -1.0);
      cost.push_back(0.0);
    }
    rows.push_back(std::move(row));
  }

  const int m = static_cast<int>(rows.size());
  const int n = ncols;
  // Artificial columns n .. n+m-1.
  Tableau t(m, n + m);
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    const double sign = rows[r].rhs < 0 ? -1.0 : 1.0;
    for (const auto& [c, a] : rows[r].coefs) t.at(r, c) += sign * a;
    t.rhs(r) = sign * rows[r].rhs;
    t.at(r, n + r) = 1.0;
    basis[r] = n + r;
  }

  LpSolution sol;
  // Phase 1: minimize the sum of artificials.
  for (int c = 0; c <= n + m; ++c) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += t.at(r, c);
    if (c < n) t.cost(c) = -s;
    else if (c == n + m) t.cost(c) = -s;
    else t.cost(c) = 0.0;
  }
  run_simplex(t, basis, n + m);
  const double infeas = -t.cost(n + m);
  double scale = 1.0;
  for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
  if (infeas > 1e-9 * scale) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  // Drive remaining artificials out of the basis; redundant rows keep them at 0.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (int c = 0; c < n; ++c) {
      if (std::abs(t.at(r, c)) > kPivotTol) {
        t.pivot(r, c);
        basis[r] = c;
        break;
      }
    }
  }
  // Phase 2 reduced costs over the structural columns only.
  for (int c = 0; c <= n + m; ++c) t.cost(c) = c < n ? cost[c] : 0.0;
  for (int r = 0; r < m; ++r) {
    if (basis[r] >= n) continue;
    const double cb = cost[basis[r]];
    if (cb == 0.0) continue;
    for (int c = 0; c <= n + m; ++c) t.cost(c) -= cb * t.at(r, c);
  }
  if (run_simplex(t, basis, n) == Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<double> y(n, 0.0);
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) y[basis[r]] = t.rhs(r);
  }
  sol.values.resize(vars.size());
  double obj = const_obj;
  for (int c = 0; c < n; ++c) obj += cost[c] * y[c];
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Mapping& mp = map[j];
    switch (mp.kind) {
      case Mapping::Kind::Shifted: sol.values[j] = mp.anchor + y[mp.col]; break;
      case Mapping::Kind::Mirrored: sol.values[j] = mp.anchor - y[mp.col]; break;
      case Mapping::Kind::Split: sol.values[j] = y[mp.col] - y[mp.neg_col]; break;
    }
  }
  sol.status = LpStatus::Optimal;
  sol.objective = obj;
  return sol;
}

}  // namespace reccoord::detail
