#include "sjs/milp/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sjs/milp/lp.hpp"
#include "sjs/milp/tolerances.hpp"

namespace sjs::milp {

namespace {

constexpr double kTol = kFeasibilityTol;

struct Problem {
  const MilpModel& model;
  std::vector<int> group_of;             // per variable, -1 if residual
  std::vector<std::vector<int>> domain;  // live member positions per group
  std::vector<int> rows;                 // non-SOS rows
  std::vector<double> lo, hi;            // per model row
  std::vector<double> vlo, vhi;          // tightened residual bounds
  bool infeasible = false;

  explicit Problem(const MilpModel& m) : model(m) {
    group_of.assign(m.num_vars(), -1);
    for (const Variable& v : m.vars()) {
      vlo.push_back(v.lower);
      vhi.push_back(v.upper);
    }
    for (int g = 0; g < m.num_sos1(); ++g) {
      const Sos1Group& s = m.sos1(g);
      domain.emplace_back();
      for (std::size_t k = 0; k < s.members.size(); ++k) {
        group_of[s.members[k]] = g;
        if (m.var(s.members[k]).upper > 0.5) domain.back().push_back(static_cast<int>(k));
      }
    }
    for (int v = 0; v < m.num_vars(); ++v) {
      if (group_of[v] < 0 && m.var(v).type == VarType::kBinary) {
        throw std::invalid_argument("binary " + m.var(v).name + " belongs to no SOS1 group");
      }
    }
    std::vector<char> sos_row(m.num_rows(), 0);
    for (int g = 0; g < m.num_sos1(); ++g) sos_row[m.sos1_row(g)] = 1;
    lo.assign(m.num_rows(), -kInf);
    hi.assign(m.num_rows(), kInf);
    for (int r = 0; r < m.num_rows(); ++r) {
      const Row& row = m.row(r);
      if (row.sense != Sense::kGreaterEqual) hi[r] = row.rhs;
      if (row.sense != Sense::kLessEqual) lo[r] = row.rhs;
      if (!sos_row[r]) rows.push_back(r);
    }
  }

  double coef_of(int r, int g, int pos) const {
    const int var = model.sos1(g).members[pos];
    double a = 0.0;
    for (const Term& t : model.row(r).terms) {
      if (t.var == var) a += t.coef;
    }
    return a;
  }

  // One pass over all rows; returns true if any member was removed.
  bool filter_once() {
    bool changed = false;
    for (int r : rows) {
      std::vector<int> groups;
      double res_min = 0.0, res_max = 0.0;
      for (const Term& t : model.row(r).terms) {
        const int g = group_of[t.var];
        if (g >= 0) {
          groups.push_back(g);
        } else {
          res_min += std::min(t.coef * vlo[t.var], t.coef * vhi[t.var]);
          res_max += std::max(t.coef * vlo[t.var], t.coef * vhi[t.var]);
        }
      }
      std::sort(groups.begin(), groups.end());
      groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
      std::vector<double> gmin(groups.size()), gmax(groups.size());
      double tot_min = res_min, tot_max = res_max;
      for (std::size_t q = 0; q < groups.size(); ++q) {
        gmin[q] = kInf;
        gmax[q] = -kInf;
        for (int pos : domain[groups[q]]) {
          const double a = coef_of(r, groups[q], pos);
          gmin[q] = std::min(gmin[q], a);
          gmax[q] = std::max(gmax[q], a);
        }
        if (domain[groups[q]].empty()) return false;
        tot_min += gmin[q];
        tot_max += gmax[q];
      }
      for (std::size_t q = 0; q < groups.size(); ++q) {
        std::vector<int> keep;
        for (int pos : domain[groups[q]]) {
          const double a = coef_of(r, groups[q], pos);
          const bool ok = tot_min - gmin[q] + a <= hi[r] + kTol && tot_max - gmax[q] + a >= lo[r] - kTol;
          if (ok) keep.push_back(pos);
        }
        if (keep.size() != domain[groups[q]].size()) {
          domain[groups[q]] = std::move(keep);
          changed = true;
        }
      }
      // Residual bounds implied by the row.
      for (const Term& t : model.row(r).terms) {
        if (group_of[t.var] >= 0 || t.coef == 0.0) continue;
        const int v = t.var;
        const double own_min = std::min(t.coef * vlo[v], t.coef * vhi[v]);
        const double own_max = std::max(t.coef * vlo[v], t.coef * vhi[v]);
        const double up = (hi[r] - (tot_min - own_min)) / t.coef;
        const double dn = (lo[r] - (tot_max - own_max)) / t.coef;
        double new_lo = t.coef > 0 ? dn : up;
        double new_hi = t.coef > 0 ? up : dn;
        if (model.var(v).type != VarType::kContinuous) {
          new_lo = std::ceil(new_lo - kTol);
          new_hi = std::floor(new_hi + kTol);
        }
        if (new_lo > vlo[v] + 1e-7) {
          vlo[v] = new_lo;
          changed = true;
        }
        if (new_hi < vhi[v] - 1e-7) {
          vhi[v] = new_hi;
          changed = true;
        }
        if (vlo[v] > vhi[v] + kTol) {
          infeasible = true;
          return false;
        }
      }
    }
    return changed;
  }

  void filter() {
    for (int pass = 0; pass < 10000 && filter_once(); ++pass) {
      if (std::any_of(domain.begin(), domain.end(), [](const auto& d) { return d.empty(); })) return;
    }
  }

  double size() const {
    if (infeasible) return 0.0;
    double prod = 1.0;
    for (const auto& d : domain) prod *= static_cast<double>(d.size());
    return prod;
  }
};

// Exact minimization of the non-SOS variables once every binary is fixed.
class ResidualSolver {
 public:
  explicit ResidualSolver(const Problem& p) : p_(p) {
    const MilpModel& m = p.model;
    std::vector<int> parent(m.num_vars());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    for (int r : p.rows) {
      int first = -1;
      for (const Term& t : m.row(r).terms) {
        if (p.group_of[t.var] >= 0) continue;
        if (first < 0) {
          first = find(t.var);
        } else {
          const int b = find(t.var);
          if (b != first) {
            parent[std::max(first, b)] = std::min(first, b);
            first = std::min(first, b);
          }
        }
      }
    }
    std::vector<int> index(m.num_vars(), -1);
    for (int v = 0; v < m.num_vars(); ++v) {
      if (p.group_of[v] >= 0) continue;
      const int root = find(v);
      if (index[root] < 0) {
        index[root] = static_cast<int>(blocks_.size());
        blocks_.emplace_back();
      }
      blocks_[index[root]].vars.push_back(v);
    }
    for (int r : p.rows) {
      for (const Term& t : m.row(r).terms) {
        if (p.group_of[t.var] >= 0) continue;
        blocks_[index[find(t.var)]].rows.push_back(r);
        break;
      }
    }
  }

  // Fills residual entries of `values`; false if some block is infeasible.
  bool solve(std::vector<double>& values) const {
    for (const Block& b : blocks_) {
      if (!(b.vars.size() == 1 ? solve_single(b, values) : solve_general(b, values))) return false;
    }
    return true;
  }

 private:
  struct Block {
    std::vector<int> vars;
    std::vector<int> rows;
  };

  // Row r as: fixed binary activity + sum over block vars.
  double fixed_activity(int r, const std::vector<double>& values) const {
    double s = 0.0;
    for (const Term& t : p_.model.row(r).terms) {
      if (p_.group_of[t.var] >= 0) s += t.coef * values[t.var];
    }
    return s;
  }

  bool solve_single(const Block& b, std::vector<double>& values) const {
    const int v = b.vars[0];
    const Variable& var = p_.model.var(v);
    double lo = var.lower, hi = var.upper;
    for (int r : b.rows) {
      double a = 0.0;
      for (const Term& t : p_.model.row(r).terms) {
        if (t.var == v) a += t.coef;
      }
      const double fixed = fixed_activity(r, values);
      const double rlo = p_.lo[r] - fixed, rhi = p_.hi[r] - fixed;
      if (a > 0.0) {
        lo = std::max(lo, rlo / a);
        hi = std::min(hi, rhi / a);
      } else if (a < 0.0) {
        lo = std::max(lo, rhi / a);
        hi = std::min(hi, rlo / a);
      } else if (rlo > kTol || rhi < -kTol) {
        return false;
      }
    }
    if (var.type != VarType::kContinuous) {
      lo = std::ceil(lo - kIntegralityTol);
      hi = std::floor(hi + kIntegralityTol);
    }
    if (lo > hi + kTol) return false;
    values[v] = var.objective < 0.0 ? std::max(lo, hi) : std::min(lo, hi);
    return true;
  }

  bool solve_general(const Block& b, std::vector<double>& values) const {
    const int n = static_cast<int>(b.vars.size());
    DenseLp lp;
    std::vector<int> ints;
    for (int k = 0; k < n; ++k) {
      const Variable& var = p_.model.var(b.vars[k]);
      lp.cost.push_back(var.objective);
      lp.lower.push_back(var.lower);
      lp.upper.push_back(var.upper);
      if (var.type != VarType::kContinuous) ints.push_back(k);
    }
    for (int r : b.rows) {
      DenseLp::RangeRow row;
      row.coefs.assign(n, 0.0);
      for (const Term& t : p_.model.row(r).terms) {
        const auto it = std::find(b.vars.begin(), b.vars.end(), t.var);
        if (it != b.vars.end()) row.coefs[it - b.vars.begin()] += t.coef;
      }
      const double fixed = fixed_activity(r, values);
      row.lo = p_.lo[r] - fixed;
      row.hi = p_.hi[r] - fixed;
      lp.rows.push_back(std::move(row));
    }
    // Integer block variables are enumerated over their bounds.
    bool found = false;
    double best = kInf;
    std::vector<double> best_x;
    std::vector<double> pick(ints.size());
    for (std::size_t q = 0; q < ints.size(); ++q) pick[q] = std::ceil(lp.lower[ints[q]]);
    const DenseLp base = lp;
    while (true) {
      DenseLp trial = base;
      for (std::size_t q = 0; q < ints.size(); ++q) trial.lower[ints[q]] = trial.upper[ints[q]] = pick[q];
      const LpResult res = solve_lp(trial);
      if (res.status == LpStatus::kOptimal && (!found || res.objective < best - kOptimalityTol)) {
        found = true;
        best = res.objective;
        best_x = res.x;
      }
      std::size_t q = 0;
      for (; q < ints.size(); ++q) {
        pick[q] += 1.0;
        if (pick[q] <= std::floor(base.upper[ints[q]])) break;
        pick[q] = std::ceil(base.lower[ints[q]]);
      }
      if (q == ints.size()) break;
    }
    if (!found) return false;
    for (int k = 0; k < n; ++k) values[b.vars[k]] = best_x[k];
    return true;
  }

  const Problem& p_;
  std::vector<Block> blocks_;
};

class Enumerator {
 public:
  explicit Enumerator(const Problem& p) : p_(p), residual_(p) {
    const MilpModel& m = p.model;
    values_.assign(m.num_vars(), 0.0);
    check_at_.resize(m.num_sos1() + 1);
    for (int r : p.rows) {
      int last = -1;
      bool pure = true;
      for (const Term& t : m.row(r).terms) {
        if (p.group_of[t.var] >= 0) {
          last = std::max(last, p.group_of[t.var]);
        } else {
          pure = false;
        }
      }
      if (pure) check_at_[last + 1].push_back(r);
    }
  }

  void run() {
    if (!rows_ok(0)) return;
    descend(0);
  }

  bool found = false;
  double best = kInf;
  std::vector<double> best_values;
  long long leaves = 0;

 private:
  bool rows_ok(int level) const {
    for (int r : check_at_[level]) {
      double a = 0.0;
      for (const Term& t : p_.model.row(r).terms) a += t.coef * values_[t.var];
      if (a > p_.hi[r] + kTol || a < p_.lo[r] - kTol) return false;
    }
    return true;
  }

  void descend(int g) {
    if (g == p_.model.num_sos1()) {
      ++leaves;
      std::vector<double> values = values_;
      if (!residual_.solve(values)) return;
      if (!p_.model.violations(values, kTol).empty()) return;
      const double obj = p_.model.objective_value(values);
      if (!found || obj < best - kOptimalityTol) {
        found = true;
        best = obj;
        best_values = std::move(values);
      }
      return;
    }
    const Sos1Group& s = p_.model.sos1(g);
    for (int pos : p_.domain[g]) {
      values_[s.members[pos]] = 1.0;
      if (rows_ok(g + 1)) descend(g + 1);
      values_[s.members[pos]] = 0.0;
    }
  }

  const Problem& p_;
  ResidualSolver residual_;
  std::vector<double> values_;
  std::vector<std::vector<int>> check_at_;  // pure-binary rows complete after group index - 1
};

}  // namespace

double enumeration_size(const MilpModel& model) {
  Problem p(model);
  p.filter();
  return p.size();
}

MilpSolution enumerate_all(const MilpModel& model) {
  const auto start = std::chrono::steady_clock::now();
  model.check_invariants();
  Problem p(model);
  p.filter();
  if (p.size() > kEnumerationCap) {
    throw std::length_error("enumeration over " + std::to_string(p.size()) +
                            " combinations exceeds the cap");
  }
  MilpSolution out;
  if (p.infeasible) {
    out.status = Status::kInfeasible;
    return out;
  }
  Enumerator e(p);
  e.run();
  out.nodes = e.leaves;
  if (e.found) {
    out.status = Status::kOptimal;
    out.values = std::move(e.best_values);
    out.objective = e.best;
    out.bound = e.best;
  } else {
    out.status = Status::kInfeasible;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace sjs::milp
