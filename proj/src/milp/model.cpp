#include "sjs/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sjs::milp {

int MilpModel::add_variable(std::string name, double lower, double upper, VarType type,
                            double objective) {
  if (type == VarType::kBinary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  vars_.push_back({std::move(name), lower, upper, type, objective});
  return num_vars() - 1;
}

int MilpModel::add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  rows_.push_back({std::move(name), std::move(terms), sense, rhs});
  return num_rows() - 1;
}

int MilpModel::add_sos1(std::string name, std::vector<int> members,
                        std::vector<double> weights) {
  if (weights.empty()) {
    for (std::size_t k = 0; k < members.size(); ++k) weights.push_back(static_cast<double>(k));
  }
  if (weights.size() != members.size()) {
    throw std::invalid_argument("SOS1 group " + name + ": weights and members differ in size");
  }
  for (int v : members) {
    if (v < 0 || v >= num_vars() || vars_[v].type != VarType::kBinary) {
      throw std::invalid_argument("SOS1 group " + name + ": member " + std::to_string(v) +
                                  " is not a binary variable");
    }
  }
  std::vector<Term> ones;
  ones.reserve(members.size());
  for (int v : members) ones.push_back({v, 1.0});
  sos_rows_.push_back(add_row(name + "_one", std::move(ones), Sense::kEqual, 1.0));
  sos_.push_back({std::move(name), std::move(members), std::move(weights)});
  hints_.emplace_back();
  return num_sos1() - 1;
}

void MilpModel::set_hint(int group, double target) { hints_.at(group) = target; }

std::optional<double> MilpModel::hint(int group) const { return hints_.at(group); }

double MilpModel::objective_value(std::span<const double> values) const {
  double total = offset_;
  for (int j = 0; j < num_vars(); ++j) {
    if (vars_[j].objective != 0.0) total += vars_[j].objective * values[j];
  }
  return total;
}

std::vector<std::string> MilpModel::violations(std::span<const double> values,
                                               double tol) const {
  std::vector<std::string> out;
  if (static_cast<int>(values.size()) != num_vars()) {
    out.push_back("expected " + std::to_string(num_vars()) + " values, got " +
                  std::to_string(values.size()));
    return out;
  }
  for (int j = 0; j < num_vars(); ++j) {
    const Variable& v = vars_[j];
    const double x = values[j];
    if (!std::isfinite(x) || x < v.lower - tol || x > v.upper + tol) {
      std::ostringstream msg;
      msg << "variable " << v.name << " = " << x << " outside [" << v.lower << ", " << v.upper
          << "]";
      out.push_back(msg.str());
    }
    if (v.type != VarType::kContinuous && std::abs(x - std::round(x)) > tol) {
      out.push_back("variable " + v.name + " is not integral");
    }
  }
  for (const Sos1Group& g : sos_) {
    int ones = 0;
    for (int m : g.members) ones += values[m] > 0.5 ? 1 : 0;
    if (ones != 1) out.push_back("SOS1 group " + g.name + " has " + std::to_string(ones) + " members set");
  }
  for (const Row& r : rows_) {
    double activity = 0.0;
    for (const Term& t : r.terms) activity += t.coef * values[t.var];
    const bool bad = (r.sense == Sense::kLessEqual && activity > r.rhs + tol) ||
                     (r.sense == Sense::kGreaterEqual && activity < r.rhs - tol) ||
                     (r.sense == Sense::kEqual && std::abs(activity - r.rhs) > tol);
    if (bad) {
      std::ostringstream msg;
      msg << "row " << r.name << " activity " << activity << " violates "
          << (r.sense == Sense::kLessEqual ? "<= " : r.sense == Sense::kGreaterEqual ? ">= " : "= ")
          << r.rhs;
      out.push_back(msg.str());
    }
  }
  return out;
}

void MilpModel::check_invariants() const {
  for (const Variable& v : vars_) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
      throw std::invalid_argument("variable " + v.name + " has an infinite bound");
    }
    if (v.lower > v.upper) throw std::invalid_argument("variable " + v.name + " has empty bounds");
  }
  for (const Row& r : rows_) {
    for (const Term& t : r.terms) {
      if (t.var < 0 || t.var >= num_vars()) {
        throw std::invalid_argument("row " + r.name + " references a missing variable");
      }
    }
  }
  for (const Sos1Group& g : sos_) {
    for (int m : g.members) {
      if (m < 0 || m >= num_vars() || vars_[m].type != VarType::kBinary) {
        throw std::invalid_argument("SOS1 group " + g.name + " has a non-binary member");
      }
    }
  }
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "OPTIMAL";
    case Status::kFeasible:
      return "FEASIBLE";
    case Status::kInfeasible:
      return "INFEASIBLE";
    case Status::kTimeLimit:
      return "TIME_LIMIT";
  }
  return "UNKNOWN";
}

std::optional<Status> status_from_string(const std::string& text) {
  for (Status s : {Status::kOptimal, Status::kFeasible, Status::kInfeasible, Status::kTimeLimit}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

}  // namespace sjs::milp
