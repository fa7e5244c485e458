// Sparse linear programs (always minimization) and the solver boundary.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reccoord {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance on constraint residuals and bound violations.
inline constexpr double kLpFeasibilityTol = 1e-7;
// Relative tolerance on objective values.
inline constexpr double kLpOptimalityTol = 1e-6;

enum class Relation { LessEqual, Equal, GreaterEqual };

struct VarId {
  int index = -1;
  bool operator==(const VarId&) const = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
};

struct LpConstraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
};

class LpError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LpProblem {
 public:
  VarId add_variable(std::string name, double lower = 0.0, double upper = kInf,
                     double cost = 0.0);
  void add_constraint(std::string name, std::vector<Term> terms, Relation relation, double rhs);

  void set_cost(VarId v, double cost);
  void set_bounds(VarId v, double lower, double upper);
  void fix(VarId v, double value) { set_bounds(v, value, value); }

  [[nodiscard]] const std::vector<LpVariable>& variables() const { return variables_; }
  [[nodiscard]] const std::vector<LpConstraint>& constraints() const { return constraints_; }
  [[nodiscard]] const LpVariable& variable(VarId v) const { return variables_.at(v.index); }
  [[nodiscard]] std::size_t num_variables() const { return variables_.size(); }
  [[nodiscard]] std::size_t num_constraints() const { return constraints_.size(); }
  [[nodiscard]] double objective_offset() const { return offset_; }
  void add_objective_offset(double c) { offset_ += c; }

  // Throws LpError on dangling references, inverted bounds or non-finite
  // coefficients.
  void validate() const;

 private:
  std::vector<LpVariable> variables_;
  std::vector<LpConstraint> constraints_;
  double offset_ = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericFailure };

std::string_view to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::NumericFailure;
  double objective = 0.0;
  std::vector<double> values;  // indexed like LpProblem::variables()
  std::vector<std::string> names;

  [[nodiscard]] bool optimal() const { return status == LpStatus::Optimal; }
  [[nodiscard]] double value(VarId v) const { return values.at(v.index); }
  // Linear lookup; meant for tests and debugging.
  [[nodiscard]] double value(std::string_view name) const;
};

enum class LpBackend { Highs, DenseSimplex };

std::string_view to_string(LpBackend b);
// Parses "highs" / "simplex"; throws LpError otherwise.
LpBackend parse_backend(std::string_view name);
// RECCOORD_SOLVER, falling back to HiGHS when unset.
LpBackend default_backend();

// Solves `problem` with the selected backend. Any answer that fails the
// post-solve feasibility check is reported as NumericFailure.
LpSolution solve_lp(const LpProblem& problem);
LpSolution solve_lp(const LpProblem& problem, LpBackend backend);

// Largest constraint residual / bound violation of `values` for `problem`.
double max_infeasibility(const LpProblem& problem, const std::vector<double>& values);

// Fixed-format MPS dump. Columns and rows are renamed C0000001 / R0000001
// to fit the 8-character name fields; the original names are listed in
// leading comment lines.
void write_mps(const LpProblem& problem, std::ostream& out);

namespace detail {
LpSolution solve_highs(const LpProblem& problem);
LpSolution solve_dense_simplex(const LpProblem& problem);
}  // namespace detail

}  // namespace reccoord
