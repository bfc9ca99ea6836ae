#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "sjs/feasibility.hpp"
#include "sjs/milp/backend.hpp"
#include "sjs/milp/builtin.hpp"
#include "sjs/milp/enumerate.hpp"
#include "sjs/milp/lp.hpp"
#include "sjs/milp/mps.hpp"
#include "sjs/model.hpp"
#include "support.hpp"

using namespace sjs;
using namespace sjs::milp;
namespace fs = std::filesystem;
using Rational = boost::multiprecision::cpp_rational;

namespace {

MilpModel single_group(std::vector<double> costs) {
  MilpModel m;
  std::vector<int> members;
  std::vector<double> weights;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    members.push_back(m.add_variable("x" + std::to_string(k), 0, 1, VarType::kBinary, costs[k]));
    weights.push_back(static_cast<double>(k + 1));
  }
  m.add_sos1("g", members, weights);
  return m;
}

// Row activity computed directly from the terms, independent of
// MilpModel::violations.
bool rows_hold(const MilpModel& m, const std::vector<double>& x, double tol) {
  for (const Row& r : m.rows()) {
    double a = 0.0;
    for (const Term& t : r.terms) a += t.coef * x[t.var];
    if (r.sense == Sense::kLessEqual && a > r.rhs + tol) return false;
    if (r.sense == Sense::kGreaterEqual && a < r.rhs - tol) return false;
    if (r.sense == Sense::kEqual && std::abs(a - r.rhs) > tol) return false;
  }
  for (int j = 0; j < m.num_vars(); ++j) {
    if (x[j] < m.var(j).lower - tol || x[j] > m.var(j).upper + tol) return false;
    if (m.var(j).type != VarType::kContinuous && std::abs(x[j] - std::round(x[j])) > tol)
      return false;
  }
  return true;
}

// Window rows in one dimension: |x - w_k| <= |x - w_{k-1}| as
// 2 (w_{k-1} - w_k) x <= w_{k-1}^2 - w_k^2.
std::vector<Inequality> window_rows(const std::vector<std::vector<double>>& w) {
  std::vector<Inequality> rows;
  for (std::size_t k = 1; k < w.size(); ++k) {
    Inequality r;
    double rhs = 0.0;
    for (std::size_t d = 0; d < w[k].size(); ++d) {
      r.coefs.push_back(2.0 * (w[k - 1][d] - w[k][d]));
      rhs += w[k - 1][d] * w[k - 1][d] - w[k][d] * w[k][d];
    }
    r.rhs = rhs;
    rows.push_back(r);
  }
  return rows;
}

// Null space of a (dim x k) rational matrix by Gauss-Jordan elimination.
std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> a, int k) {
  int dim = static_cast<int>(a.size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < k && row < dim; ++c) {
    int p = -1;
    for (int r = row; r < dim; ++r)
      if (a[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(a[p], a[row]);
    Rational inv = 1 / a[row][c];
    for (auto& v : a[row]) v *= inv;
    for (int r = 0; r < dim; ++r) {
      if (r == row || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (int cc = 0; cc < k; ++cc) a[r][cc] -= f * a[row][cc];
    }
    pivot_col.push_back(c);
    ++row;
  }
  std::vector<std::vector<Rational>> basis;
  std::vector<bool> is_pivot(k, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int f = 0; f < k; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(k, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][f];
    basis.push_back(v);
  }
  return basis;
}

// Exact infeasibility test: some subset of at most dim + 1 rows carries a
// Farkas certificate y > 0, A_S^T y = 0, b_S . y < 0 (a minimal infeasible
// subsystem has a one-dimensional, strictly positive kernel).
bool rational_infeasible(const std::vector<std::vector<Rational>>& a,
                         const std::vector<Rational>& b, int dim) {
  int n = static_cast<int>(a.size());
  std::vector<int> subset;
  std::function<bool(int)> search = [&](int from) -> bool {
    if (!subset.empty()) {
      int k = static_cast<int>(subset.size());
      std::vector<std::vector<Rational>> at(dim, std::vector<Rational>(k));
      for (int d = 0; d < dim; ++d)
        for (int s = 0; s < k; ++s) at[d][s] = a[subset[s]][d];
      auto ns = null_space(at, k);
      if (ns.size() == 1) {
        auto y = ns[0];
        if (y[0] < 0)
          for (auto& v : y) v = -v;
        bool positive = true;
        for (auto& v : y) positive = positive && v > 0;
        if (positive) {
          Rational dot = 0;
          for (int s = 0; s < k; ++s) dot += y[s] * b[subset[s]];
          if (dot < 0) return true;
        }
      }
    }
    if (static_cast<int>(subset.size()) == dim + 1) return false;
    for (int r = from; r < n; ++r) {
      subset.push_back(r);
      if (search(r + 1)) return true;
      subset.pop_back();
    }
    return false;
  };
  return search(0);
}

MilpSolution parse_text(const std::string& text, const MilpModel& m) {
  return parse_external_solution(text, m);
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sjs-test-milp-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("single SOS1 group picks the cheapest start") {
  MilpModel m = single_group({5, 2, 7});
  auto a = solve_builtin(m);
  auto b = enumerate_all(m);
  CHECK(a.status == Status::kOptimal);
  CHECK(b.status == Status::kOptimal);
  CHECK(a.objective == 2.0);
  CHECK(b.objective == 2.0);
  CHECK(a.values[1] == 1.0);
  CHECK(a.bound == doctest::Approx(a.objective).epsilon(1e-6));
}

TEST_CASE("all costs equal: any choice is optimal") {
  MilpModel m = single_group({4, 4, 4, 4});
  CHECK(enumerate_all(m).objective == 4.0);
  CHECK(solve_builtin(m).objective == 4.0);
}

TEST_CASE("two jobs, two ops, shared unit-capacity group, T = 8") {
  Instance inst;
  inst.machine_groups = {{1, 1}, {2, 2}};
  for (int i = 0; i < 2; ++i) {
    Job job;
    job.id = i + 1;
    job.due_date = 2 + i;
    for (int j = 0; j < 2; ++j) {
      OperationSpec op;
      op.eligible = {{j, j + 1}};
      op.scrap_prob = 0.1;
      op.rework_prob = 0.5;
      job.operations.push_back(op);
    }
    inst.jobs.push_back(job);
  }
  inst.horizon = 8;
  inst.shift_length = 4;
  VariableLayout layout(inst);
  BuiltModel b = build_full_model(inst, layout);
  auto exact = enumerate_all(b.model);
  auto bb = solve_builtin(b.model);
  REQUIRE(exact.status == Status::kOptimal);
  REQUIRE(bb.status == Status::kOptimal);
  CHECK(bb.objective == exact.objective);
  CHECK(rows_hold(b.model, bb.values, 1e-6));
}

TEST_CASE("builtin equals enumeration on random tiny instances") {
  test::Rng rng(101);
  test::TinyShape shape;
  shape.max_jobs = 2;
  shape.max_ops = 2;
  int solved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = test::random_instance(rng, shape);
    VariableLayout layout(inst);
    BuiltModel b = build_full_model(inst, layout);
    if (enumeration_size(b.model) > 2e5) continue;
    auto exact = enumerate_all(b.model);
    auto bb = solve_builtin(b.model);
    REQUIRE(exact.status == Status::kOptimal);
    REQUIRE(bb.status == Status::kOptimal);
    CHECK(bb.objective == exact.objective);
    CHECK(rows_hold(b.model, bb.values, 1e-6));
    CHECK(rows_hold(b.model, exact.values, 1e-6));
    ++solved;
  }
  CHECK(solved >= 10);
}

TEST_CASE("builtin is deterministic") {
  test::Rng rng(7);
  test::TinyShape shape;
  shape.max_jobs = 2;
  shape.max_ops = 2;
  for (int trial = 0; trial < 5; ++trial) {
    Instance inst = test::random_instance(rng, shape);
    VariableLayout layout(inst);
    BuiltModel b = build_full_model(inst, layout);
    auto x = solve_builtin(b.model);
    auto y = solve_builtin(b.model);
    CHECK(x.status == y.status);
    CHECK(x.nodes == y.nodes);
    CHECK(x.values == y.values);
    CHECK(x.objective == y.objective);
  }
}

TEST_CASE("node limit yields the incumbent with TIME_LIMIT status") {
  test::Rng rng(55);
  test::TinyShape shape;
  shape.max_jobs = 3;
  shape.max_ops = 3;
  Instance inst = test::random_instance(rng, shape);
  VariableLayout layout(inst);
  BuiltModel b = build_full_model(inst, layout);
  Budget budget;
  budget.node_limit = 3;
  auto sol = solve_builtin(b.model, budget);
  CHECK((sol.status == Status::kTimeLimit || sol.status == Status::kOptimal));
  if (sol.has_solution()) CHECK(rows_hold(b.model, sol.values, 1e-6));
}

TEST_CASE("enumeration cap") {
  MilpModel m;
  for (int g = 0; g < 8; ++g) {
    std::vector<int> members;
    std::vector<double> w;
    for (int k = 0; k < 10; ++k) {
      members.push_back(m.add_variable("x", 0, 1, VarType::kBinary, k));
      w.push_back(k);
    }
    m.add_sos1("g", members, w);
  }
  CHECK(enumeration_size(m) == doctest::Approx(1e8));
  CHECK_THROWS_AS(enumerate_all(m), std::length_error);
}

TEST_CASE("model invariants") {
  MilpModel m;
  int c = m.add_variable("c", 0, 5, VarType::kContinuous);
  CHECK_THROWS(m.add_sos1("bad", {c}, {1.0}));
  MilpModel inf;
  inf.add_variable("x", 0, kInf, VarType::kContinuous);
  CHECK_THROWS_AS(inf.check_invariants(), std::invalid_argument);
}

TEST_CASE("LP feasibility: hand-expanded windows") {
  SUBCASE("(0, 2, 0) is feasible at 1") {
    auto rows = window_rows({{0}, {2}, {0}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].coefs[0] == -4.0);  // lambda >= 1
    CHECK(rows[0].rhs == -4.0);
    CHECK(rows[1].coefs[0] == 4.0);   // lambda <= 1
    CHECK(rows[1].rhs == 4.0);
    auto v = solve_lp_feasibility(rows, 1);
    REQUIRE(v.feasible);
    CHECK(std::abs(v.witness[0] - 1.0) <= 1e-9);
  }
  SUBCASE("(0, 3, 1, 4) is infeasible") {
    auto rows = window_rows({{0}, {3}, {1}, {4}});
    // lambda >= 1.5, lambda <= 2, lambda >= 2.5
    CHECK(rows[0].rhs / rows[0].coefs[0] == doctest::Approx(1.5));
    CHECK(rows[1].rhs / rows[1].coefs[0] == doctest::Approx(2.0));
    CHECK(rows[2].rhs / rows[2].coefs[0] == doctest::Approx(2.5));
    CHECK(!solve_lp_feasibility(rows, 1).feasible);
  }
  SUBCASE("no rows") {
    CHECK(solve_lp_feasibility(std::vector<Inequality>{}, 3).feasible);
  }
}

TEST_CASE("LP feasibility agrees with an exact rational re-check") {
  test::Rng rng(404);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int dim = test::uniform_int(rng, 1, 5);
    int n = test::uniform_int(rng, 1, dim <= 3 ? 20 : 12);
    std::vector<Inequality> rows;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (int r = 0; r < n; ++r) {
      Inequality row;
      std::vector<Rational> ar;
      for (int d = 0; d < dim; ++d) {
        int v = test::uniform_int(rng, -4, 4);
        row.coefs.push_back(v);
        ar.push_back(v);
      }
      int rhs = test::uniform_int(rng, -6, 3);
      row.rhs = rhs;
      rows.push_back(row);
      a.push_back(ar);
      b.push_back(rhs);
    }
    auto v = solve_lp_feasibility(rows, dim);
    bool exact_infeasible = rational_infeasible(a, b, dim);
    CHECK(v.feasible == !exact_infeasible);
    if (v.feasible) {
      ++feasible;
      for (const auto& row : rows) {
        double act = 0.0;
        for (int d = 0; d < dim; ++d) act += row.coefs[d] * v.witness[d];
        CHECK(act <= row.rhs + 1e-9);
      }
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 10);
  CHECK(infeasible > 10);
}

TEST_CASE("dense LP") {
  DenseLp lp;
  lp.cost = {-1, -2};
  lp.lower = {0, 0};
  lp.upper = {kInf, kInf};
  lp.rows.push_back({{1, 1}, -kInf, 4});
  lp.rows.push_back({{1, 3}, -kInf, 6});
  auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-5.0));  // x = 3, y = 1
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(1.0));

  DenseLp unb = lp;
  unb.rows.clear();
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);

  DenseLp bad = lp;
  bad.rows.push_back({{1, 1}, 5, kInf});
  CHECK(solve_lp(bad).status == LpStatus::kInfeasible);
}

TEST_CASE("MPS writer") {
  MilpModel m;
  m.name = "toy";
  int x = m.add_variable("x", 0, 1, VarType::kBinary, 3.0);
  int y = m.add_variable("y", 0, 1, VarType::kBinary, 1.0);
  int z = m.add_variable("z", 0, 10, VarType::kContinuous, 0.5);
  m.add_sos1("g", {x, y}, {1, 2});
  m.add_row("r1", {{x, 1}, {z, 1}}, Sense::kGreaterEqual, 2);
  m.add_row("r2", {{y, 2}, {z, -1}}, Sense::kLessEqual, 0);
  m.set_objective_offset(1.25);
  std::ostringstream out;
  write_mps(m, out);
  std::string text = out.str();
  CHECK(text.find("NAME          toy") == 0);
  CHECK(text.find(" N  OBJ") != std::string::npos);
  CHECK(text.find("MARKER") != std::string::npos);
  CHECK(text.find("INTORG") != std::string::npos);
  CHECK(text.find("INTEND") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);

  std::istringstream in(text);
  std::string line, section;
  int rhs_entries = 0, row_entries = 0, bound_entries = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != ' ') {
      section = line.substr(0, line.find(' '));
      continue;
    }
    std::istringstream f(line);
    std::vector<std::string> tok;
    for (std::string t; f >> t;) tok.push_back(t);
    if (section == "ROWS" && tok[0] != "N") ++row_entries;
    if (section == "RHS" && tok[1] != "OBJ") ++rhs_entries;
    if (section == "RHS" && tok[1] == "OBJ") CHECK(std::stod(tok[2]) == -1.25);
    if (section == "BOUNDS") ++bound_entries;
  }
  CHECK(row_entries == m.num_rows());
  CHECK(rhs_entries == m.num_rows());
  CHECK(bound_entries >= m.num_vars());
  CHECK(column_name(0) == "C0000001");
  CHECK(row_name(41) == "R0000042");
  CHECK(mps_number(0.1).size() <= 12);
  CHECK(std::stod(mps_number(1.0 / 3.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("solution file parser") {
  MilpModel m;
  m.add_variable("a", 0, 1, VarType::kBinary, 1.0);
  m.add_variable("b", 0, 1, VarType::kBinary, 2.0);
  m.add_variable("c", 0, 5, VarType::kContinuous, 1.0);
  SUBCASE("complete file") {
    auto s = parse_text(
        "STATUS OPTIMAL\n# comment\nC0000001 1\nC0000002 0\nC0000003 2.5\n", m);
    CHECK(s.status == Status::kOptimal);
    CHECK(s.values == std::vector<double>{1, 0, 2.5});
    CHECK(s.objective == 3.5);
  }
  SUBCASE("missing column") {
    try {
      parse_text("STATUS FEASIBLE\nC0000001 1\nC0000003 2\n", m);
      FAIL("no error");
    } catch (const SolutionParseError& e) {
      CHECK(std::string(e.what()).find("C0000002") != std::string::npos);
    }
  }
  SUBCASE("bad value with line number") {
    try {
      parse_text("STATUS FEASIBLE\nC0000001 x\n", m);
      FAIL("no error");
    } catch (const SolutionParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("infeasible needs no columns") {
    CHECK(parse_text("STATUS INFEASIBLE\n", m).status == Status::kInfeasible);
  }
}

TEST_CASE("external backend: stub that echoes a known optimum") {
  MilpModel m;
  int a = m.add_variable("a", 0, 1, VarType::kBinary, 4.0);
  int b = m.add_variable("b", 0, 1, VarType::kBinary, 1.0);
  int c = m.add_variable("c", 0, 3, VarType::kContinuous, 1.0);
  m.add_sos1("g", {a, b}, {1, 2});
  m.add_row("r", {{b, 1}, {c, 1}}, Sense::kGreaterEqual, 2);
  auto reference = solve_builtin(m);
  REQUIRE(reference.status == Status::kOptimal);

  fs::path known = scratch("known.sol");
  {
    std::ofstream out(known);
    out << "STATUS OPTIMAL\nOBJECTIVE " << reference.objective << "\nBOUND "
        << reference.objective << "\n";
    for (int j = 0; j < m.num_vars(); ++j)
      out << column_name(j) << ' ' << reference.values[j] << '\n';
  }
  std::vector<std::string> warnings;
  ExternalBackend echo("test -s {model} && cp " + known.string() + " {solution}",
                       [&](const std::string& w) { warnings.push_back(w); });
  auto sol = echo.solve(m, Budget{});
  CHECK(warnings.empty());
  CHECK(echo.fallbacks() == 0);
  CHECK(sol.status == reference.status);
  CHECK(sol.values == reference.values);
  CHECK(sol.objective == reference.objective);

  ExternalBackend broken("false", [&](const std::string& w) { warnings.push_back(w); });
  auto fallback = broken.solve(m, Budget{});
  CHECK(broken.fallbacks() == 1);
  CHECK(warnings.size() == 1);
  CHECK(fallback.objective == reference.objective);
  fs::remove_all(known.parent_path());
}

TEST_CASE("template expansion and backend factory") {
  CHECK(expand_template("x {model} y {model}", "model", "m.mps") == "x m.mps y m.mps");
  CHECK(make_backend("builtin")->name() == "builtin");
  CHECK(make_backend("external", "true")->name() == "external");
  CHECK_THROWS(make_backend("cplex"));
}
