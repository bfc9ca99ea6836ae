#include "sjs/milp/builtin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "residual.hpp"
#include "sjs/milp/lp.hpp"
#include "sjs/milp/tolerances.hpp"

namespace sjs::milp {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kTol = kFeasibilityTol;

struct Entry {
  int pos = 0;
  double coef = 0.0;
};

// Contribution of one SOS1 group to one row.
struct Pair {
  int row = 0;
  int group = 0;
  std::vector<Entry> entries;  // sorted by member position
};

struct GroupData {
  std::vector<int> vars;
  std::vector<double> weight;
  std::vector<double> cost;
  int alive_begin = 0;  // offset into Search::alive_
  std::vector<int> pairs;
};

struct RowData {
  double lo = -kInf;
  double hi = kInf;
  std::vector<int> pairs;
  std::vector<Entry> residual;  // pos = residual variable index
  int comp = -1;
};

struct ResidualVar {
  int var = 0;
  bool is_int = false;
  double cost = 0.0;
  std::vector<Entry> rows;  // pos = row index
};

struct Component {
  std::vector<int> vars;  // residual indices
  std::vector<int> rows;
};

class Search {
 public:
  Search(const MilpModel& model, const Budget& budget);
  MilpSolution run();

 private:
  // Trail-backed assignment.
  void set(double& ref, double v) {
    if (ref != v) {
      dtrail_.push_back({&ref, ref});
      ref = v;
    }
  }
  void set(int& ref, int v) {
    if (ref != v) {
      itrail_.push_back({&ref, ref});
      ref = v;
    }
  }
  std::pair<std::size_t, std::size_t> mark() const { return {dtrail_.size(), itrail_.size()}; }
  void undo(std::pair<std::size_t, std::size_t> m) {
    while (dtrail_.size() > m.first) {
      *dtrail_.back().first = dtrail_.back().second;
      dtrail_.pop_back();
    }
    while (itrail_.size() > m.second) {
      *itrail_.back().first = itrail_.back().second;
      itrail_.pop_back();
    }
  }

  void build();
  void enqueue(int row);
  void touch_row(int row);
  bool kill(int g, int pos);
  bool refresh_group(int g);
  bool process_row(int r);
  bool tighten(int rv, double lb, double ub);
  bool propagate();
  void clear_queue();
  bool refresh_components();
  double component_bound(int c) const;
  double lower_bound() const;
  int pick_group() const;
  std::vector<int> value_order(int g) const;
  void leaf();
  void dfs();
  bool out_of_budget();

  const MilpModel& model_;
  Budget budget_;
  Clock::time_point start_;

  std::vector<GroupData> groups_;
  std::vector<Pair> pairs_;
  std::vector<RowData> rows_;
  std::vector<ResidualVar> rvars_;
  std::vector<Component> comps_;

  // Trailed state.
  std::vector<int> alive_;
  std::vector<int> count_;
  std::vector<double> min_cost_;
  std::vector<double> min_weight_;  // smallest live reference weight per group
  std::vector<double> part_min_, part_max_;  // per pair
  std::vector<double> amin_, amax_;          // binary activity range per row
  std::vector<double> rmin_, rmax_;          // residual activity range per row
  std::vector<double> rlb_, rub_;            // residual bounds
  std::vector<double> comp_lb_;

  std::vector<std::pair<double*, double>> dtrail_;
  std::vector<std::pair<int*, int>> itrail_;

  std::vector<int> queue_;
  std::size_t queue_head_ = 0;
  std::vector<char> in_queue_;
  std::vector<int> dirty_;
  std::vector<char> is_dirty_;
  std::vector<char> in_group_;
  std::vector<int> stamp_;
  int stamp_id_ = 0;
  long long tighten_budget_ = 0;

  bool has_incumbent_ = false;
  double incumbent_obj_ = kInf;
  std::vector<double> incumbent_;
  long long nodes_ = 0;
  bool stopped_ = false;

};

Search::Search(const MilpModel& model, const Budget& budget)
    : model_(model), budget_(budget), start_(Clock::now()) {
  build();
}

void Search::build() {
  const int nv = model_.num_vars();
  std::vector<int> group_of(nv, -1), pos_of(nv, -1);
  for (int g = 0; g < model_.num_sos1(); ++g) {
    const Sos1Group& s = model_.sos1(g);
    GroupData gd;
    gd.vars = s.members;
    gd.weight = s.weights;
    gd.alive_begin = static_cast<int>(alive_.size());
    for (std::size_t k = 0; k < s.members.size(); ++k) {
      const int v = s.members[k];
      if (group_of[v] >= 0) throw std::invalid_argument("variable " + model_.var(v).name + " is in two SOS1 groups");
      group_of[v] = g;
      pos_of[v] = static_cast<int>(k);
      gd.cost.push_back(model_.var(v).objective);
      alive_.push_back(model_.var(v).upper > 0.5 ? 1 : 0);
    }
    groups_.push_back(std::move(gd));
  }
  in_group_.assign(nv, 0);
  for (int v = 0; v < nv; ++v) in_group_[v] = group_of[v] >= 0;
  std::vector<int> rindex(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const Variable& var = model_.var(v);
    if (group_of[v] >= 0) continue;
    if (var.type == VarType::kBinary) {
      throw std::invalid_argument("binary " + var.name + " belongs to no SOS1 group");
    }
    rindex[v] = static_cast<int>(rvars_.size());
    rvars_.push_back({v, var.type != VarType::kContinuous, var.objective, {}});
    double lb = var.lower, ub = var.upper;
    if (var.type != VarType::kContinuous) {
      lb = std::ceil(lb - kIntegralityTol);
      ub = std::floor(ub + kIntegralityTol);
    }
    rlb_.push_back(lb);
    rub_.push_back(ub);
  }

  std::vector<char> sos_row(model_.num_rows(), 0);
  for (int g = 0; g < model_.num_sos1(); ++g) sos_row[model_.sos1_row(g)] = 1;
  rows_.resize(model_.num_rows());
  std::vector<int> pair_of_group(groups_.size(), -1);
  for (int r = 0; r < model_.num_rows(); ++r) {
    if (sos_row[r]) continue;
    const Row& row = model_.row(r);
    RowData& rd = rows_[r];
    if (row.sense != Sense::kGreaterEqual) rd.hi = row.rhs;
    if (row.sense != Sense::kLessEqual) rd.lo = row.rhs;
    std::vector<int> touched;
    for (const Term& t : row.terms) {
      if (t.coef == 0.0) continue;
      const int g = group_of[t.var];
      if (g >= 0) {
        if (pair_of_group[g] < 0) {
          pair_of_group[g] = static_cast<int>(pairs_.size());
          pairs_.push_back({r, g, {}});
          touched.push_back(g);
        }
        pairs_[pair_of_group[g]].entries.push_back({pos_of[t.var], t.coef});
      } else {
        rd.residual.push_back({rindex[t.var], t.coef});
      }
    }
    for (int g : touched) {
      Pair& p = pairs_[pair_of_group[g]];
      std::sort(p.entries.begin(), p.entries.end(),
                [](const Entry& a, const Entry& b) { return a.pos < b.pos; });
      // Merge duplicate terms of one variable.
      std::vector<Entry> merged;
      for (const Entry& e : p.entries) {
        if (!merged.empty() && merged.back().pos == e.pos) {
          merged.back().coef += e.coef;
        } else {
          merged.push_back(e);
        }
      }
      p.entries = std::move(merged);
      rd.pairs.push_back(pair_of_group[g]);
      groups_[g].pairs.push_back(pair_of_group[g]);
      pair_of_group[g] = -1;
    }
    for (const Entry& e : rd.residual) rvars_[e.pos].rows.push_back({r, e.coef});
  }

  // Residual components: union-find over rows.
  std::vector<int> parent(rvars_.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const RowData& rd : rows_) {
    for (std::size_t k = 1; k < rd.residual.size(); ++k) {
      const int a = find(rd.residual[0].pos), b = find(rd.residual[k].pos);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> comp_of_root(rvars_.size(), -1);
  std::vector<int> comp_of(rvars_.size());
  for (std::size_t v = 0; v < rvars_.size(); ++v) {
    const int root = find(static_cast<int>(v));
    if (comp_of_root[root] < 0) {
      comp_of_root[root] = static_cast<int>(comps_.size());
      comps_.emplace_back();
    }
    comp_of[v] = comp_of_root[root];
    comps_[comp_of[v]].vars.push_back(static_cast<int>(v));
  }
  for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
    if (rows_[r].residual.empty()) continue;
    rows_[r].comp = comp_of[rows_[r].residual[0].pos];
    comps_[rows_[r].comp].rows.push_back(r);
  }

  count_.assign(groups_.size(), 0);
  min_cost_.assign(groups_.size(), 0.0);
  min_weight_.assign(groups_.size(), kInf);
  part_min_.assign(pairs_.size(), 0.0);
  part_max_.assign(pairs_.size(), 0.0);
  amin_.assign(rows_.size(), 0.0);
  amax_.assign(rows_.size(), 0.0);
  rmin_.assign(rows_.size(), 0.0);
  rmax_.assign(rows_.size(), 0.0);
  comp_lb_.assign(comps_.size(), 0.0);
  in_queue_.assign(rows_.size(), 0);
  is_dirty_.assign(comps_.size(), 0);
  std::size_t widest = 0;
  for (const GroupData& gd : groups_) widest = std::max(widest, gd.vars.size());
  stamp_.assign(widest, 0);

  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const GroupData& gd = groups_[g];
    int n = 0;
    for (std::size_t k = 0; k < gd.vars.size(); ++k) n += alive_[gd.alive_begin + k];
    count_[g] = n;
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const Entry& e : rows_[r].residual) {
      const double a = e.coef * rlb_[e.pos], b = e.coef * rub_[e.pos];
      rmin_[r] += std::min(a, b);
      rmax_[r] += std::max(a, b);
    }
  }
}

void Search::enqueue(int row) {
  if (!in_queue_[row]) {
    in_queue_[row] = 1;
    queue_.push_back(row);
  }
}

void Search::touch_row(int row) {
  enqueue(row);
  const int c = rows_[row].comp;
  if (c >= 0 && !is_dirty_[c]) {
    is_dirty_[c] = 1;
    dirty_.push_back(c);
  }
}

bool Search::kill(int g, int pos) {
  int& a = alive_[groups_[g].alive_begin + pos];
  if (!a) return true;
  set(a, 0);
  set(count_[g], count_[g] - 1);
  return count_[g] > 0;
}

// Recomputes the group's cost minimum and its contribution range to every
// row it touches.
bool Search::refresh_group(int g) {
  const GroupData& gd = groups_[g];
  if (count_[g] == 0) return false;
  const int* alive = &alive_[gd.alive_begin];
  double best = kInf, first = kInf;
  for (std::size_t k = 0; k < gd.vars.size(); ++k) {
    if (alive[k]) {
      best = std::min(best, gd.cost[k]);
      first = std::min(first, gd.weight[k]);
    }
  }
  set(min_cost_[g], best);
  set(min_weight_[g], first);
  for (int p : gd.pairs) {
    const Pair& pr = pairs_[p];
    double lo = kInf, hi = -kInf;
    int listed = 0;
    for (const Entry& e : pr.entries) {
      if (!alive[e.pos]) continue;
      ++listed;
      lo = std::min(lo, e.coef);
      hi = std::max(hi, e.coef);
    }
    if (listed < count_[g]) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    if (lo != part_min_[p] || hi != part_max_[p]) {
      set(amin_[pr.row], amin_[pr.row] + (lo - part_min_[p]));
      set(amax_[pr.row], amax_[pr.row] + (hi - part_max_[p]));
      set(part_min_[p], lo);
      set(part_max_[p], hi);
      touch_row(pr.row);
    }
  }
  return true;
}

bool Search::tighten(int rv, double lb, double ub) {
  const ResidualVar& v = rvars_[rv];
  if (v.is_int) {
    lb = std::ceil(lb - kTol);
    ub = std::floor(ub + kTol);
  }
  const double old_lb = rlb_[rv], old_ub = rub_[rv];
  const double step = v.is_int ? 0.5 : 1e-7 * std::max(1.0, old_ub - old_lb);
  lb = lb > old_lb + step ? lb : old_lb;
  ub = ub < old_ub - step ? ub : old_ub;
  if (lb > ub + kTol) return false;
  if (lb > ub) {
    // Within tolerance: collapse onto the side that moved.
    if (lb != old_lb) lb = ub; else ub = lb;
  }
  if (lb == old_lb && ub == old_ub) return true;
  if (--tighten_budget_ < 0) return true;
  for (const Entry& e : v.rows) {
    const double a0 = e.coef * old_lb, b0 = e.coef * old_ub;
    const double a1 = e.coef * lb, b1 = e.coef * ub;
    set(rmin_[e.pos], rmin_[e.pos] + (std::min(a1, b1) - std::min(a0, b0)));
    set(rmax_[e.pos], rmax_[e.pos] + (std::max(a1, b1) - std::max(a0, b0)));
    touch_row(e.pos);
  }
  set(rlb_[rv], lb);
  set(rub_[rv], ub);
  return true;
}

bool Search::process_row(int r) {
  const RowData& rd = rows_[r];
  const double hi_slack = rd.hi + kTol - amin_[r] - rmin_[r];
  const double lo_slack = amax_[r] + rmax_[r] - (rd.lo - kTol);
  if (hi_slack < 0.0 || lo_slack < 0.0) return false;

  for (int p : rd.pairs) {
    const int g = pairs_[p].group;
    if (count_[g] <= 1) continue;
    const double pmin = part_min_[p], pmax = part_max_[p];
    if (pmax - pmin <= std::min(hi_slack, lo_slack)) continue;
    auto bad = [&](double a) { return a - pmin > hi_slack || pmax - a > lo_slack; };
    const GroupData& gd = groups_[g];
    bool changed = false;
    ++stamp_id_;
    for (const Entry& e : pairs_[p].entries) {
      stamp_[e.pos] = stamp_id_;
      if (alive_[gd.alive_begin + e.pos] && bad(e.coef)) {
        if (!kill(g, e.pos)) return false;
        changed = true;
      }
    }
    if (bad(0.0)) {
      for (std::size_t k = 0; k < gd.vars.size(); ++k) {
        if (stamp_[k] == stamp_id_ || !alive_[gd.alive_begin + k]) continue;
        if (!kill(g, static_cast<int>(k))) return false;
        changed = true;
      }
    }
    if (changed && !refresh_group(g)) return false;
  }

  for (const Entry& e : rd.residual) {
    const int v = e.pos;
    const double c = e.coef;
    double lb = rlb_[v], ub = rub_[v];
    if (std::isfinite(rd.hi)) {
      const double slack = rd.hi - amin_[r] - rmin_[r];
      if (c > 0.0) ub = std::min(ub, rlb_[v] + slack / c);
      else lb = std::max(lb, rub_[v] + slack / c);
    }
    if (std::isfinite(rd.lo)) {
      const double slack = amax_[r] + rmax_[r] - rd.lo;
      if (c > 0.0) lb = std::max(lb, rub_[v] - slack / c);
      else ub = std::min(ub, rlb_[v] - slack / c);
    }
    if (!tighten(v, lb, ub)) return false;
  }
  return true;
}

bool Search::propagate() {
  while (queue_head_ < queue_.size()) {
    const int r = queue_[queue_head_++];
    in_queue_[r] = 0;
    if (!process_row(r)) {
      clear_queue();
      return false;
    }
  }
  queue_.clear();
  queue_head_ = 0;
  return true;
}

void Search::clear_queue() {
  for (std::size_t k = queue_head_; k < queue_.size(); ++k) in_queue_[queue_[k]] = 0;
  queue_.clear();
  queue_head_ = 0;
}

double Search::component_bound(int c) const {
  const Component& comp = comps_[c];
  const int n = static_cast<int>(comp.vars.size());
  std::vector<double> cost(n), lower(n), upper(n);
  std::vector<bool> is_int(n);
  for (int k = 0; k < n; ++k) {
    const int v = comp.vars[k];
    cost[k] = rvars_[v].cost;
    lower[k] = rlb_[v];
    upper[k] = rub_[v];
    is_int[k] = rvars_[v].is_int;
  }
  std::vector<detail::RowSpan> spans;
  for (int r : comp.rows) {
    detail::RowSpan s{std::vector<double>(n, 0.0), rows_[r].lo - amax_[r], rows_[r].hi - amin_[r]};
    for (const Entry& e : rows_[r].residual) {
      const auto it = std::find(comp.vars.begin(), comp.vars.end(), e.pos);
      s.coefs[it - comp.vars.begin()] += e.coef;
    }
    spans.push_back(std::move(s));
  }
  const detail::BlockResult res = detail::minimize_block(cost, lower, upper, is_int, spans, false);
  return res.feasible ? res.objective : kInf;
}

bool Search::refresh_components() {
  bool ok = true;
  for (int c : dirty_) {
    is_dirty_[c] = 0;
    if (!ok) continue;
    const double lb = component_bound(c);
    set(comp_lb_[c], lb);
    if (!std::isfinite(lb)) ok = false;
  }
  dirty_.clear();
  return ok;
}

double Search::lower_bound() const {
  double total = model_.objective_offset();
  for (double m : min_cost_) total += m;
  for (double c : comp_lb_) total += c;
  return total;
}

int Search::pick_group() const {
  int best = -1;
  double best_w = kInf;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (count_[g] > 1 && min_weight_[g] < best_w) {
      best_w = min_weight_[g];
      best = static_cast<int>(g);
    }
  }
  return best;
}

std::vector<int> Search::value_order(int g) const {
  const GroupData& gd = groups_[g];
  std::vector<int> order;
  for (std::size_t k = 0; k < gd.vars.size(); ++k) {
    if (alive_[gd.alive_begin + k]) order.push_back(static_cast<int>(k));
  }
  const std::optional<double> hint = model_.hint(g);
  if (hint) {
    const double h = *hint;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = std::abs(gd.weight[a] - h), db = std::abs(gd.weight[b] - h);
      if (da != db) return da < db;
      return gd.weight[a] < gd.weight[b];
    });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (gd.cost[a] != gd.cost[b]) return gd.cost[a] < gd.cost[b];
      return gd.weight[a] < gd.weight[b];
    });
  }
  return order;
}

void Search::leaf() {
  std::vector<double> values(model_.num_vars(), 0.0);
  for (const GroupData& gd : groups_) {
    for (std::size_t k = 0; k < gd.vars.size(); ++k) {
      if (alive_[gd.alive_begin + k]) values[gd.vars[k]] = 1.0;
    }
  }
  for (const Component& comp : comps_) {
    const int n = static_cast<int>(comp.vars.size());
    std::vector<double> cost(n), lower(n), upper(n);
    std::vector<bool> is_int(n);
    for (int k = 0; k < n; ++k) {
      const int v = comp.vars[k];
      cost[k] = rvars_[v].cost;
      const Variable& var = model_.var(rvars_[v].var);
      is_int[k] = rvars_[v].is_int;
      lower[k] = is_int[k] ? std::ceil(var.lower - kIntegralityTol) : var.lower;
      upper[k] = is_int[k] ? std::floor(var.upper + kIntegralityTol) : var.upper;
    }
    std::vector<detail::RowSpan> spans;
    for (int r : comp.rows) {
      // Fixed binary activity, summed in term order from the model row.
      double fixed = 0.0;
      std::vector<double> coefs(n, 0.0);
      for (const Term& t : model_.row(r).terms) {
        if (in_group_[t.var]) fixed += t.coef * values[t.var];
      }
      for (const Entry& e : rows_[r].residual) {
        const auto it = std::find(comp.vars.begin(), comp.vars.end(), e.pos);
        coefs[it - comp.vars.begin()] += e.coef;
      }
      spans.push_back({std::move(coefs), rows_[r].lo - fixed, rows_[r].hi - fixed});
    }
    const detail::BlockResult res = detail::minimize_block(cost, lower, upper, is_int, spans, true);
    if (!res.feasible) return;
    for (int k = 0; k < n; ++k) values[rvars_[comp.vars[k]].var] = res.values[k];
  }
  if (!model_.violations(values, kTol).empty()) return;
  const double obj = model_.objective_value(values);
  if (!has_incumbent_ || obj < incumbent_obj_ - kOptimalityTol) {
    has_incumbent_ = true;
    incumbent_obj_ = obj;
    incumbent_ = std::move(values);
  }
}

bool Search::out_of_budget() {
  if (stopped_) return true;
  if (nodes_ >= budget_.node_limit) stopped_ = true;
  if ((nodes_ & 63) == 0 && std::isfinite(budget_.time_limit_s)) {
    const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    if (elapsed > budget_.time_limit_s) stopped_ = true;
  }
  return stopped_;
}

void Search::dfs() {
  ++nodes_;
  const int g = pick_group();
  if (g < 0) {
    leaf();
    return;
  }
  for (int pos : value_order(g)) {
    if (out_of_budget()) return;
    const auto m = mark();
    bool ok = true;
    const GroupData& gd = groups_[g];
    for (std::size_t k = 0; k < gd.vars.size() && ok; ++k) {
      if (static_cast<int>(k) != pos) ok = kill(g, static_cast<int>(k));
    }
    tighten_budget_ = 20000;
    ok = ok && refresh_group(g) && propagate();
    if (!ok) clear_queue();
    const bool bounded = refresh_components() && ok;
    if (bounded && (!has_incumbent_ || lower_bound() < incumbent_obj_ - kOptimalityTol)) dfs();
    undo(m);
  }
}

MilpSolution Search::run() {
  MilpSolution out;
  if (const auto& start = model_.start(); start && model_.violations(*start, kTol).empty()) {
    has_incumbent_ = true;
    incumbent_ = *start;
    incumbent_obj_ = model_.objective_value(*start);
  }

  // Root: every group and row is fresh.
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    // Force a full recomputation of the parts from zero.
    if (!refresh_group(static_cast<int>(g))) {
      out.status = Status::kInfeasible;
      return out;
    }
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) touch_row(static_cast<int>(r));
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    if (!is_dirty_[c]) {
      is_dirty_[c] = 1;
      dirty_.push_back(static_cast<int>(c));
    }
  }
  tighten_budget_ = 1000000;
  bool ok = propagate();
  if (!ok) clear_queue();
  ok = refresh_components() && ok;
  double root_bound = kInf;
  if (ok) {
    root_bound = lower_bound();
    // Roots that fix everything still pass through the leaf.
    dfs();
  } else {
    nodes_ = 1;
  }
  dtrail_.clear();
  itrail_.clear();

  out.nodes = nodes_;
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
  if (has_incumbent_) {
    out.values = incumbent_;
    out.objective = incumbent_obj_;
  }
  if (!stopped_) {
    out.status = has_incumbent_ ? Status::kOptimal : Status::kInfeasible;
    out.bound = has_incumbent_ ? incumbent_obj_ : kInf;
  } else {
    out.status = Status::kTimeLimit;
    out.bound = std::min(root_bound, incumbent_obj_);
  }
  return out;
}

}  // namespace

MilpSolution solve_builtin(const MilpModel& model, const Budget& budget) {
  model.check_invariants();
  Search search(model, budget);
  return search.run();
}

}  // namespace sjs::milp
