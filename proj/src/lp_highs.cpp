#include <Highs.h>

#include <algorithm>

#include "reccoord/lp.hpp"

namespace reccoord::detail {

namespace {

HighsLp to_highs(const LpProblem& problem) {
  const auto& vars = problem.variables();
  const auto& rows = problem.constraints();
  HighsLp lp;
  lp.num_col_ = static_cast<HighsInt>(vars.size());
  lp.num_row_ = static_cast<HighsInt>(rows.size());
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = problem.objective_offset();
  lp.col_cost_.reserve(vars.size());
  lp.col_lower_.reserve(vars.size());
  lp.col_upper_.reserve(vars.size());
  for (const auto& v : vars) {
    lp.col_cost_.push_back(v.cost);
    lp.col_lower_.push_back(v.lower);
    lp.col_upper_.push_back(v.upper);
  }
  lp.row_lower_.reserve(rows.size());
  lp.row_upper_.reserve(rows.size());

  // Row-wise assembly; HiGHS rejects repeated (row, column) entries.
  auto& a = lp.a_matrix_;
  a.format_ = MatrixFormat::kRowwise;
  a.num_col_ = lp.num_col_;
  a.num_row_ = lp.num_row_;
  a.start_.assign(1, 0);
  std::vector<Term> merged;
  for (const auto& row : rows) {
    merged = row.terms;
    std::sort(merged.begin(), merged.end(),
              [](const Term& x, const Term& y) { return x.var.index < y.var.index; });
    for (std::size_t k = 0; k < merged.size();) {
      double coef = 0.0;
      const int col = merged[k].var.index;
      for (; k < merged.size() && merged[k].var.index == col; ++k) coef += merged[k].coef;
      if (coef != 0.0) {
        a.index_.push_back(col);
        a.value_.push_back(coef);
      }
    }
    a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
    switch (row.relation) {
      case Relation::LessEqual:
        lp.row_lower_.push_back(-kHighsInf);
        lp.row_upper_.push_back(row.rhs);
        break;
      case Relation::GreaterEqual:
        lp.row_lower_.push_back(row.rhs);
        lp.row_upper_.push_back(kHighsInf);
        break;
      case Relation::Equal:
        lp.row_lower_.push_back(row.rhs);
        lp.row_upper_.push_back(row.rhs);
        break;
    }
  }
  return lp;
}

LpStatus map_status(HighsModelStatus s) {
  switch (s) {
    case HighsModelStatus::kOptimal:
    case HighsModelStatus::kModelEmpty: return LpStatus::Optimal;
    case HighsModelStatus::kInfeasible: return LpStatus::Infeasible;
    case HighsModelStatus::kUnbounded: return LpStatus::Unbounded;
    default: return LpStatus::NumericFailure;
  }
}

}  // namespace

LpSolution solve_highs(const LpProblem& problem) {
  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("solver", "simplex");
  highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
  highs.setOptionValue("dual_feasibility_tolerance", 1e-9);

  LpSolution sol;
  if (highs.passModel(to_highs(problem)) == HighsStatus::kError) {
    sol.status = LpStatus::NumericFailure;
    return sol;
  }
  highs.run();
  HighsModelStatus status = highs.getModelStatus();
  if (status == HighsModelStatus::kUnboundedOrInfeasible) {
    // Presolve cannot always tell the two apart; the simplex can.
    highs.setOptionValue("presolve", "off");
    highs.run();
    status = highs.getModelStatus();
  }
  sol.status = map_status(status);
  if (sol.status == LpStatus::Optimal) {
    if (problem.num_variables() == 0) {
      sol.values.clear();
    } else {
      sol.values = highs.getSolution().col_value;
    }
    sol.objective = highs.getInfo().objective_function_value;
  }
  return sol;
}

}  // namespace reccoord::detail
