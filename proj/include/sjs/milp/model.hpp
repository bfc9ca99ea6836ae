#pragma once

#include <chrono>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sjs::milp {

enum class VarType { kContinuous, kInteger, kBinary };
enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarType type = VarType::kContinuous;
  double objective = 0.0;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// Exactly one member is 1. `weights` are the SOS reference weights (here the
// start time of each member) and define the member order used for branching.
struct Sos1Group {
  std::string name;
  std::vector<int> members;
  std::vector<double> weights;
};

// Bounded-variable mixed-integer linear model, minimization.
class MilpModel {
 public:
  std::string name = "model";

  int add_variable(std::string name, double lower, double upper, VarType type,
                   double objective = 0.0);
  int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  // Adds the group and its explicit sum-to-one row. Members must be binaries.
  int add_sos1(std::string name, std::vector<int> members, std::vector<double> weights);

  void set_objective(int var, double coef) { vars_[var].objective = coef; }
  void add_objective(int var, double coef) { vars_[var].objective += coef; }
  void set_objective_offset(double offset) { offset_ = offset; }
  double objective_offset() const { return offset_; }

  // Value-ordering hint: members whose weight is nearest `target` are tried
  // first when branching on the group.
  void set_hint(int group, double target);
  std::optional<double> hint(int group) const;

  // Optional starting solution for solvers that accept one.
  void set_start(std::vector<double> values) { start_ = std::move(values); }
  const std::optional<std::vector<double>>& start() const { return start_; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_sos1() const { return static_cast<int>(sos_.size()); }
  const Variable& var(int i) const { return vars_[i]; }
  const Row& row(int i) const { return rows_[i]; }
  const Sos1Group& sos1(int i) const { return sos_[i]; }
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Sos1Group>& sos1_groups() const { return sos_; }
  // Index of the sum-to-one row of each group.
  int sos1_row(int group) const { return sos_rows_[group]; }

  // offset + sum_j c_j x_j, accumulated in variable order.
  double objective_value(std::span<const double> values) const;

  // Every bound, integrality, SOS1 and row violation beyond `tol`.
  std::vector<std::string> violations(std::span<const double> values,
                                      double tol = 1e-6) const;

  // Throws std::invalid_argument if the model breaks its invariants
  // (non-finite bounds, SOS member not binary, bad indices).
  void check_invariants() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<Sos1Group> sos_;
  std::vector<int> sos_rows_;
  std::vector<std::optional<double>> hints_;
  std::optional<std::vector<double>> start_;
  double offset_ = 0.0;
};

enum class Status { kOptimal, kFeasible, kInfeasible, kTimeLimit };
const char* to_string(Status status);
std::optional<Status> status_from_string(const std::string& text);

struct MilpSolution {
  Status status = Status::kInfeasible;
  std::vector<double> values;
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  long long nodes = 0;

  bool has_solution() const {
    return !values.empty() && (status == Status::kOptimal || status == Status::kFeasible ||
                               status == Status::kTimeLimit);
  }
};

struct Budget {
  double time_limit_s = std::numeric_limits<double>::infinity();
  long long node_limit = std::numeric_limits<long long>::max();
};

}  // namespace sjs::milp
