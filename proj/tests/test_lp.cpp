#include <doctest.h>

#include <Highs.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>

#include "reccoord/lp.hpp"

using namespace reccoord;
using doctest::Approx;

namespace {

struct RandomLp {
  LpProblem problem;
  std::vector<double> upper;
};

RandomLp random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nvar(2, 5), nrow(1, 4), rel(0, 4);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), ub(1.0, 5.0), rhs(0.5, 5.0);
  RandomLp r;
  const int n = nvar(rng), m = nrow(rng);
  std::vector<VarId> x;
  for (int j = 0; j < n; ++j) {
    r.upper.push_back(ub(rng));
    x.push_back(r.problem.add_variable("x" + std::to_string(j), 0.0, r.upper.back(), coef(rng)));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < n; ++j) t.push_back({x[j], coef(rng)});
    // Mostly <= rows with positive rhs (origin feasible), some >= rows that
    // may make the problem infeasible.
    const Relation rl = rel(rng) == 0 ? Relation::GreaterEqual : Relation::LessEqual;
    r.problem.add_constraint("r" + std::to_string(i), std::move(t), rl, rhs(rng));
  }
  return r;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Minimum objective over all basic feasible points; nullopt if none.
std::optional<double> vertex_minimum(const RandomLp& r) {
  const auto& vars = r.problem.variables();
  const std::size_t n = vars.size();
  // Every candidate hyperplane as (coefficients, rhs).
  std::vector<std::pair<std::vector<double>, double>> planes;
  for (const auto& c : r.problem.constraints()) {
    std::vector<double> row(n, 0.0);
    for (const auto& t : c.terms) row[t.var.index] += t.coef;
    planes.emplace_back(row, c.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.emplace_back(e, 0.0);
    planes.emplace_back(e, r.upper[j]);
  }
  std::optional<double> best;
  std::vector<bool> pick(planes.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n), true);
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t k = 0; k < planes.size(); ++k) {
      if (!pick[k]) continue;
      a.push_back(planes[k].first);
      b.push_back(planes[k].second);
    }
    const auto x = solve_square(a, b);
    if (!x) continue;
    if (max_infeasibility(r.problem, *x) > 1e-9) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += vars[j].cost * (*x)[j];
    if (!best || obj < *best) best = obj;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

// Lagrangian lower bound for multipliers y >= 0.
double dual_bound(const RandomLp& r, const std::vector<double>& y) {
  const auto& vars = r.problem.variables();
  std::vector<double> reduced(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) reduced[j] = vars[j].cost;
  double bound = 0.0;
  for (std::size_t i = 0; i < r.problem.constraints().size(); ++i) {
    const auto& c = r.problem.constraints()[i];
    const double sign = c.relation == Relation::LessEqual ? 1.0 : -1.0;
    for (const auto& t : c.terms) reduced[t.var.index] += sign * y[i] * t.coef;
    bound -= sign * y[i] * c.rhs;
  }
  for (std::size_t j = 0; j < vars.size(); ++j) bound += std::min(0.0, reduced[j] * r.upper[j]);
  return bound;
}

}  // namespace

TEST_CASE("single bounded variable") {
  LpProblem p;
  const VarId x = p.add_variable("x", 0.0, 10.0, 1.0);
  p.add_constraint("c", {{x, 1.0}}, Relation::GreaterEqual, 3.0);
  for (LpBackend b : {LpBackend::Highs, LpBackend::DenseSimplex}) {
    CAPTURE(to_string(b));
    const LpSolution s = solve_lp(p, b);
    REQUIRE(s.optimal());
    CHECK(s.objective == Approx(3.0));
    CHECK(s.value(x) == Approx(3.0));
    CHECK(s.value("x") == Approx(3.0));
  }
}

TEST_CASE("contradictory rows are infeasible") {
  LpProblem p;
  const VarId x = p.add_variable("x", -kInf, kInf, 1.0);
  p.add_constraint("lo", {{x, 1.0}}, Relation::GreaterEqual, 3.0);
  p.add_constraint("hi", {{x, 1.0}}, Relation::LessEqual, 2.0);
  CHECK(solve_lp(p, LpBackend::Highs).status == LpStatus::Infeasible);
  CHECK(solve_lp(p, LpBackend::DenseSimplex).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded direction is reported") {
  LpProblem p;
  const VarId x = p.add_variable("x", 0.0, kInf, -1.0);
  p.add_constraint("c", {{x, 1.0}}, Relation::GreaterEqual, 1.0);
  CHECK(solve_lp(p, LpBackend::Highs).status == LpStatus::Unbounded);
  CHECK(solve_lp(p, LpBackend::DenseSimplex).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate optimum on a simplex edge") {
  LpProblem p;
  const VarId x = p.add_variable("x", 0.0, kInf, -1.0);
  const VarId y = p.add_variable("y", 0.0, kInf, -1.0);
  p.add_constraint("c", {{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 1.0);
  for (LpBackend b : {LpBackend::Highs, LpBackend::DenseSimplex}) {
    const LpSolution s = solve_lp(p, b);
    REQUIRE(s.optimal());
    CHECK(s.objective == Approx(-1.0));
    CHECK(s.value(x) + s.value(y) == Approx(1.0));
    CHECK(s.value(x) >= -kLpFeasibilityTol);
    CHECK(s.value(y) >= -kLpFeasibilityTol);
  }
}

TEST_CASE("objective offset and free variables") {
  LpProblem p;
  const VarId x = p.add_variable("x", -kInf, kInf, 2.0);
  const VarId y = p.add_variable("y", -5.0, kInf, 1.0);
  p.add_constraint("e", {{x, 1.0}, {y, -1.0}}, Relation::Equal, 1.0);
  p.add_objective_offset(10.0);
  for (LpBackend b : {LpBackend::Highs, LpBackend::DenseSimplex}) {
    const LpSolution s = solve_lp(p, b);
    REQUIRE(s.optimal());
    // x = y + 1, minimize 3y + 2 + 10 with y >= -5.
    CHECK(s.value(y) == Approx(-5.0));
    CHECK(s.objective == Approx(-3.0));
  }
}

TEST_CASE("malformed problems are rejected before solving") {
  SUBCASE("dangling variable") {
    LpProblem p;
    p.add_variable("x");
    p.add_constraint("bad", {{VarId{7}, 1.0}}, Relation::Equal, 0.0);
    CHECK_THROWS_AS(p.validate(), LpError);
    CHECK_THROWS_AS(solve_lp(p), LpError);
  }
  SUBCASE("inverted bounds") {
    LpProblem p;
    const VarId x = p.add_variable("x");
    p.set_bounds(x, 2.0, 1.0);
    CHECK_THROWS_AS(solve_lp(p), LpError);
  }
  SUBCASE("NaN coefficient") {
    LpProblem p;
    const VarId x = p.add_variable("x");
    p.add_constraint("nan", {{x, std::nan("")}}, Relation::Equal, 0.0);
    CHECK_THROWS_AS(solve_lp(p), LpError);
  }
  SUBCASE("infinite cost") {
    LpProblem p;
    p.add_variable("x", 0.0, 1.0, kInf);
    CHECK_THROWS_AS(solve_lp(p), LpError);
  }
}

TEST_CASE("backend selection") {
  CHECK(parse_backend("highs") == LpBackend::Highs);
  CHECK(parse_backend("simplex") == LpBackend::DenseSimplex);
  CHECK_THROWS_AS(parse_backend("glpk"), std::invalid_argument);
}

TEST_CASE("random LPs: vertex enumeration, weak duality, backend agreement") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mult(0.0, 2.0);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    CAPTURE(trial);
    const RandomLp r = random_lp(rng);
    const auto truth = vertex_minimum(r);
    const LpSolution h = solve_lp(r.problem, LpBackend::Highs);
    const LpSolution d = solve_lp(r.problem, LpBackend::DenseSimplex);
    if (!truth) {
      ++infeasible;
      CHECK(h.status == LpStatus::Infeasible);
      CHECK(d.status == LpStatus::Infeasible);
      continue;
    }
    ++optimal;
    REQUIRE(h.optimal());
    REQUIRE(d.optimal());
    const double scale = std::max(1.0, std::abs(*truth));
    CHECK(std::abs(h.objective - *truth) <= kLpOptimalityTol * scale);
    CHECK(std::abs(d.objective - *truth) <= kLpOptimalityTol * scale);
    CHECK(max_infeasibility(r.problem, h.values) <= kLpFeasibilityTol);
    CHECK(max_infeasibility(r.problem, d.values) <= kLpFeasibilityTol);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> y(r.problem.num_constraints());
      for (auto& v : y) v = mult(rng);
      CHECK(h.objective >= dual_bound(r, y) - 1e-9);
    }
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("constraint order does not change the optimum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomLp r = random_lp(rng);
    const LpSolution a = solve_lp(r.problem);
    LpProblem shuffled;
    for (const auto& v : r.problem.variables()) shuffled.add_variable(v.name, v.lower, v.upper, v.cost);
    auto rows = r.problem.constraints();
    std::shuffle(rows.begin(), rows.end(), rng);
    for (auto& c : rows) shuffled.add_constraint(c.name, c.terms, c.relation, c.rhs);
    const LpSolution b = solve_lp(shuffled);
    REQUIRE(a.status == b.status);
    if (a.optimal()) {
      CHECK(b.objective == Approx(a.objective).epsilon(kLpOptimalityTol));
    }
  }
}

TEST_CASE("solving twice gives identical answers") {
  std::mt19937_64 rng(99);
  const RandomLp r = random_lp(rng);
  const LpSolution a = solve_lp(r.problem);
  const LpSolution b = solve_lp(r.problem);
  CHECK(a.status == b.status);
  CHECK(a.values == b.values);
}

TEST_CASE("MPS export reads back into an external solver") {
  std::mt19937_64 rng(5);
  const auto dir = std::filesystem::temp_directory_path() / "reccoord_mps_test";
  std::filesystem::create_directories(dir);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    RandomLp r = random_lp(rng);
    const VarId f = r.problem.add_variable("free var", -kInf, kInf, 0.0);
    r.problem.add_constraint("tie", {{f, 1.0}, {VarId{0}, -1.0}}, Relation::Equal, 0.25);
    const LpSolution ours = solve_lp(r.problem);
    if (!ours.optimal()) continue;
    const auto path = dir / ("p" + std::to_string(trial) + ".mps");
    {
      std::ofstream out(path);
      write_mps(r.problem, out);
    }
    Highs h;
    h.setOptionValue("output_flag", false);
    REQUIRE(h.readModel(path.string()) == HighsStatus::kOk);
    REQUIRE(h.run() == HighsStatus::kOk);
    REQUIRE(h.getModelStatus() == HighsModelStatus::kOptimal);
    CHECK(h.getInfo().objective_function_value == Approx(ours.objective).epsilon(1e-6));
    ++checked;
  }
  std::filesystem::remove_all(dir);
  CHECK(checked > 10);
}
