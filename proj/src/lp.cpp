#include "reccoord/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace reccoord {

VarId LpProblem::add_variable(std::string name, double lower, double upper, double cost) {
  variables_.push_back({std::move(name), lower, upper, cost});
  return VarId{static_cast<int>(variables_.size()) - 1};
}

void LpProblem::add_constraint(std::string name, std::vector<Term> terms, Relation relation,
                               double rhs) {
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
}

void LpProblem::set_cost(VarId v, double cost) { variables_.at(v.index).cost = cost; }

void LpProblem::set_bounds(VarId v, double lower, double upper) {
  auto& var = variables_.at(v.index);
  var.lower = lower;
  var.upper = upper;
}

void LpProblem::validate() const {
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw LpError("variable " + v.name + ": invalid bounds");
    }
    if (v.lower == kInf || v.upper == -kInf) {
      throw LpError("variable " + v.name + ": empty bound interval");
    }
    if (!std::isfinite(v.cost)) throw LpError("variable " + v.name + ": non-finite cost");
  }
  const int n = static_cast<int>(variables_.size());
  for (const auto& c : constraints_) {
    if (!std::isfinite(c.rhs)) throw LpError("constraint " + c.name + ": non-finite rhs");
    for (const auto& term : c.terms) {
      if (term.var.index < 0 || term.var.index >= n) {
        throw LpError("constraint " + c.name + ": unknown variable");
      }
      if (!std::isfinite(term.coef)) {
        throw LpError("constraint " + c.name + ": non-finite coefficient");
      }
    }
  }
  if (!std::isfinite(offset_)) throw LpError("non-finite objective offset");
}

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::NumericFailure: return "NumericFailure";
  }
  return "?";
}

double LpSolution::value(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values.at(i);
  }
  throw std::out_of_range("no LP variable named " + std::string(name));
}

std::string_view to_string(LpBackend b) {
  return b == LpBackend::Highs ? "highs" : "simplex";
}

LpBackend parse_backend(std::string_view name) {
  if (name == "highs") return LpBackend::Highs;
  if (name == "simplex") return LpBackend::DenseSimplex;
  throw LpError("unknown LP backend '" + std::string(name) + "' (expected highs or simplex)");
}

LpBackend default_backend() {
  const char* env = std::getenv("RECCOORD_SOLVER");
  if (env == nullptr || *env == '\0') return LpBackend::Highs;
  return parse_backend(env);
}

double max_infeasibility(const LpProblem& problem, const std::vector<double>& values) {
  double worst = 0.0;
  const auto& vars = problem.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    worst = std::max({worst, vars[j].lower - values[j], values[j] - vars[j].upper});
  }
  for (const auto& c : problem.constraints()) {
    double lhs = 0.0;
    for (const auto& term : c.terms) lhs += term.coef * values[term.var.index];
    const double r = lhs - c.rhs;
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, r); break;
      case Relation::GreaterEqual: worst = std::max(worst, -r); break;
      case Relation::Equal: worst = std::max(worst, std::abs(r)); break;
    }
  }
  return worst;
}

LpSolution solve_lp(const LpProblem& problem) { return solve_lp(problem, default_backend()); }

LpSolution solve_lp(const LpProblem& problem, LpBackend backend) {
  problem.validate();
  LpSolution sol = backend == LpBackend::Highs ? detail::solve_highs(problem)
                                               : detail::solve_dense_simplex(problem);
  sol.names.reserve(problem.num_variables());
  for (const auto& v : problem.variables()) sol.names.push_back(v.name);
  if (sol.status == LpStatus::Optimal) {
    if (sol.values.size() != problem.num_variables() ||
        max_infeasibility(problem, sol.values) > kLpFeasibilityTol) {
      sol.status = LpStatus::NumericFailure;
      return sol;
    }
    double obj = problem.objective_offset();
    const auto& vars = problem.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) obj += vars[j].cost * sol.values[j];
    sol.objective = obj;
  }
  return sol;
}

namespace {

// Widest %g rendering of v that fits a 12-character MPS field.
std::string mps_number(double v) {
  char buf[64];
  for (int prec = 12; prec > 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::char_traits<char>::length(buf) <= 12) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

std::string field_name(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i + 1);
  return buf;
}

// Fixed-MPS data line: fields start at columns 2, 5, 15, 25, 40, 50.
void mps_line(std::ostream& out, std::string_view code, std::string_view name1,
              std::string_view name2 = {}, std::string_view num1 = {},
              std::string_view name3 = {}, std::string_view num2 = {}) {
  std::string line(61, ' ');
  auto put = [&line](std::size_t col, std::string_view text) {
    line.replace(col - 1, text.size(), text);
  };
  put(2, code);
  put(5, name1);
  put(15, name2);
  if (!num1.empty()) put(25 + 12 - num1.size(), num1);
  put(40, name3);
  if (!num2.empty()) put(50 + 12 - num2.size(), num2);
  const auto last = line.find_last_not_of(' ');
  line.resize(last == std::string::npos ? 0 : last + 1);
  out << line << '\n';
}

}  // namespace

void write_mps(const LpProblem& problem, std::ostream& out) {
  problem.validate();
  const auto& vars = problem.variables();
  const auto& rows = problem.constraints();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    out << "* " << field_name('C', j) << ' ' << vars[j].name << '\n';
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << "* " << field_name('R', i) << ' ' << rows[i].name << '\n';
  }
  out << "NAME          RECCOORD\n";
  out << "ROWS\n";
  mps_line(out, "N", "COST");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const char* code = rows[i].relation == Relation::LessEqual      ? "L"
                       : rows[i].relation == Relation::GreaterEqual ? "G"
                                                                    : "E";
    mps_line(out, code, field_name('R', i));
  }

  // Column-major coefficient lists, duplicates merged.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& term : rows[i].terms) {
      auto& col = cols[term.var.index];
      if (!col.empty() && col.back().first == i) {
        col.back().second += term.coef;
      } else {
        col.emplace_back(i, term.coef);
      }
    }
  }
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string cname = field_name('C', j);
    if (vars[j].cost != 0.0) mps_line(out, "", cname, "COST", mps_number(vars[j].cost));
    for (const auto& [row, coef] : cols[j]) {
      if (coef != 0.0) mps_line(out, "", cname, field_name('R', row), mps_number(coef));
    }
    if (vars[j].cost == 0.0 && cols[j].empty()) mps_line(out, "", cname, "COST", "0");
  }
  out << "RHS\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].rhs != 0.0) mps_line(out, "", "RHS", field_name('R', i), mps_number(rows[i].rhs));
  }
  if (problem.objective_offset() != 0.0) {
    // MPS stores the negated objective constant as the RHS of the N row.
    mps_line(out, "", "RHS", "COST", mps_number(-problem.objective_offset()));
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string cname = field_name('C', j);
    const double lo = vars[j].lower;
    const double up = vars[j].upper;
    if (lo == up) {
      mps_line(out, "FX", "BND", cname, mps_number(lo));
      continue;
    }
    if (lo == -kInf && up == kInf) {
      mps_line(out, "FR", "BND", cname);
      continue;
    }
    if (lo == -kInf) {
      mps_line(out, "MI", "BND", cname);
    } else if (lo != 0.0) {
      mps_line(out, "LO", "BND", cname, mps_number(lo));
    }
    if (up != kInf) mps_line(out, "UP", "BND", cname, mps_number(up));
  }
  out << "ENDATA\n";
}

}  // namespace reccoord
