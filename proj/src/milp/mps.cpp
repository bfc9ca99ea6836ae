#include "sjs/milp/mps.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace sjs::milp {

namespace {

void field_line(std::ostream& out, const std::string& f1, const std::string& f2,
                const std::string& f3, const std::string& f4) {
  // Columns 2-3, 5-12, 15-22, 25-36.
  char buf[64];
  std::snprintf(buf, sizeof buf, " %-2s %-8s  %-8s  %s", f1.c_str(), f2.c_str(), f3.c_str(),
                f4.c_str());
  std::string s(buf);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  out << s << '\n';
}

}  // namespace

std::string column_name(int var) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", var + 1);
  return buf;
}

std::string row_name(int row) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07d", row + 1);
  return buf;
}

std::string mps_number(double v) {
  if (v == 0.0) return "0";
  char buf[48];
  for (int prec = 17; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::char_traits<char>::length(buf) <= 12) return buf;
  }
  return buf;
}

void write_mps(const MilpModel& model, std::ostream& out) {
  model.check_invariants();
  out << "NAME          " << model.name << '\n';
  out << "ROWS\n";
  field_line(out, "N", "OBJ", "", "");
  for (int r = 0; r < model.num_rows(); ++r) {
    const Sense s = model.row(r).sense;
    field_line(out, s == Sense::kLessEqual ? "L" : s == Sense::kGreaterEqual ? "G" : "E",
               row_name(r), "", "");
  }

  std::vector<std::vector<std::pair<int, double>>> by_col(model.num_vars());
  for (int r = 0; r < model.num_rows(); ++r) {
    std::map<int, double> merged;
    for (const Term& t : model.row(r).terms) merged[t.var] += t.coef;
    for (auto [v, a] : merged) {
      if (a != 0.0) by_col[v].push_back({r, a});
    }
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < model.num_vars(); ++j) {
    const bool is_int = model.var(j).type != VarType::kContinuous;
    if (is_int != in_int) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "    M%07d  'MARKER'                 '%s'", ++marker,
                    is_int ? "INTORG" : "INTEND");
      out << buf << '\n';
      in_int = is_int;
    }
    const std::string name = column_name(j);
    const double c = model.var(j).objective;
    if (c != 0.0 || by_col[j].empty()) field_line(out, "", name, "OBJ", mps_number(c));
    for (auto [r, a] : by_col[j]) field_line(out, "", name, row_name(r), mps_number(a));
  }
  if (in_int) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "    M%07d  'MARKER'                 'INTEND'", ++marker);
    out << buf << '\n';
  }
  out << "RHS\n";
  if (model.objective_offset() != 0.0) {
    field_line(out, "", "RHS", "OBJ", mps_number(-model.objective_offset()));
  }
  for (int r = 0; r < model.num_rows(); ++r) {
    field_line(out, "", "RHS", row_name(r), mps_number(model.row(r).rhs));
  }
  out << "BOUNDS\n";
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.var(j);
    const std::string name = column_name(j);
    if (v.lower == v.upper) {
      field_line(out, "FX", "BND", name, mps_number(v.lower));
    } else {
      field_line(out, "LO", "BND", name, mps_number(v.lower));
      field_line(out, "UP", "BND", name, mps_number(v.upper));
    }
  }
  out << "ENDATA\n";
}

void write_mps(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_mps(model, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

MilpSolution parse_external_solution(const std::string& text, const MilpModel& model) {
  MilpSolution sol;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_status = false, have_objective = false, have_bound = false;
  std::vector<double> values(model.num_vars(), 0.0);
  std::vector<char> seen(model.num_vars(), 0);

  auto parse_number = [&](const std::string& tok) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
      // from_chars rejects "inf"/"+1" forms some solvers emit.
      try {
        std::size_t used = 0;
        v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw SolutionParseError(lineno, "not a number: '" + tok + "'");
      }
    }
    return v;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key, value, extra;
    if (!(fields >> key)) continue;
    if (!(fields >> value)) throw SolutionParseError(lineno, "expected '<name> <value>'");
    if (fields >> extra) throw SolutionParseError(lineno, "unexpected token '" + extra + "'");
    if (!have_status) {
      if (key != "STATUS") throw SolutionParseError(lineno, "expected STATUS header");
      const auto st = status_from_string(value);
      if (!st) throw SolutionParseError(lineno, "unknown status '" + value + "'");
      sol.status = *st;
      have_status = true;
      continue;
    }
    if (key == "OBJECTIVE") {
      sol.objective = parse_number(value);
      have_objective = true;
      continue;
    }
    if (key == "BOUND") {
      sol.bound = parse_number(value);
      have_bound = true;
      continue;
    }
    if (key.size() != 8 || key[0] != 'C') throw SolutionParseError(lineno, "unknown column '" + key + "'");
    int idx = 0;
    auto [p, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), idx);
    if (ec != std::errc() || p != key.data() + key.size() || idx < 1 || idx > model.num_vars()) {
      throw SolutionParseError(lineno, "unknown column '" + key + "'");
    }
    values[idx - 1] = parse_number(value);
    seen[idx - 1] = 1;
  }
  if (!have_status) throw SolutionParseError(0, "solution has no STATUS header");
  if (sol.status == Status::kInfeasible) return sol;
  const bool any = std::any_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  if (!any && sol.status == Status::kTimeLimit) return sol;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (!seen[j]) {
      throw SolutionParseError(0, "solution is missing column " + column_name(j) + " (" +
                                      model.var(j).name + ")");
    }
  }
  sol.values = std::move(values);
  if (!have_objective) sol.objective = model.objective_value(sol.values);
  if (!have_bound && sol.status == Status::kOptimal) sol.bound = sol.objective;
  return sol;
}

MilpSolution parse_external_solution(const std::filesystem::path& path, const MilpModel& model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read solution file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_external_solution(buf.str(), model);
}

}  // namespace sjs::milp
