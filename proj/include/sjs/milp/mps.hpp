#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sjs/milp/model.hpp"

namespace sjs::milp {

// Fixed-format MPS, minimization:
//
//   NAME          <model name>
//   ROWS           N OBJ, then one L/G/E line per row
//   COLUMNS        integer columns wrapped in MARKER INTORG / INTEND
//   RHS            one entry per row (zeros included); OBJ carries -offset
//   BOUNDS         LO and UP for every column, FX when they coincide
//   ENDATA
//
// Column j is named C%07d with j 1-based, row r is R%07d. Numbers use the
// most significant digits that fit the 12-character field.
void write_mps(const MilpModel& model, std::ostream& out);
void write_mps(const MilpModel& model, const std::filesystem::path& path);

std::string column_name(int var);
std::string row_name(int row);
// Shortest %g rendering of v that fits 12 characters.
std::string mps_number(double v);

class SolutionParseError : public std::runtime_error {
 public:
  SolutionParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Solution file grammar, one item per line, '#' starts a comment:
//
//   STATUS <OPTIMAL|FEASIBLE|INFEASIBLE|TIME_LIMIT>    (required, first)
//   OBJECTIVE <value>                                  (optional)
//   BOUND <value>                                      (optional)
//   <column name> <value>                              (every column, unless INFEASIBLE)
//
// A missing column raises SolutionParseError naming it. A missing objective
// is recomputed from the values.
MilpSolution parse_external_solution(const std::string& text, const MilpModel& model);
MilpSolution parse_external_solution(const std::filesystem::path& path, const MilpModel& model);

}  // namespace sjs::milp
