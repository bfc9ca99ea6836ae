#include "sjs/milp/lp.hpp"

#include <cmath>
#include <stdexcept>

#include "sjs/milp/tolerances.hpp"

namespace sjs::milp {

namespace {

// Standard form: A y <= b, y >= 0, min c . y, with x = offset + map * y.
struct StandardForm {
  int num_y = 0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  // x_j = base[j] + sum_k sign * y_k over the columns recorded for j.
  std::vector<double> base;
  std::vector<std::vector<std::pair<int, double>>> cols;
};

StandardForm to_standard(const DenseLp& lp) {
  const int n = lp.num_vars();
  StandardForm sf;
  sf.base.assign(n, 0.0);
  sf.cols.resize(n);
  std::vector<std::pair<double, int>> upper_rows;  // (u - l, y index)
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (std::isfinite(lo)) {
      sf.base[j] = lo;
      sf.cols[j].push_back({sf.num_y++, 1.0});
      if (std::isfinite(hi)) upper_rows.push_back({hi - lo, sf.num_y - 1});
    } else if (std::isfinite(hi)) {
      sf.base[j] = hi;
      sf.cols[j].push_back({sf.num_y++, -1.0});
    } else {
      sf.cols[j].push_back({sf.num_y++, 1.0});
      sf.cols[j].push_back({sf.num_y++, -1.0});
    }
  }
  sf.c.assign(sf.num_y, 0.0);
  for (int j = 0; j < n; ++j) {
    for (auto [k, s] : sf.cols[j]) sf.c[k] += s * lp.cost[j];
  }
  auto push_row = [&](const std::vector<double>& coefs, double sign, double rhs) {
    std::vector<double> row(sf.num_y, 0.0);
    double shift = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = sign * coefs[j];
      if (a == 0.0) continue;
      shift += a * sf.base[j];
      for (auto [k, s] : sf.cols[j]) row[k] += a * s;
    }
    sf.a.push_back(std::move(row));
    sf.b.push_back(sign * rhs - shift);
  };
  for (const auto& r : lp.rows) {
    if (std::isfinite(r.hi)) push_row(r.coefs, 1.0, r.hi);
    if (std::isfinite(r.lo)) push_row(r.coefs, -1.0, r.lo);
  }
  for (auto [width, k] : upper_rows) {
    std::vector<double> row(sf.num_y, 0.0);
    row[k] = 1.0;
    sf.a.push_back(std::move(row));
    sf.b.push_back(width);
  }
  return sf;
}

class Tableau {
 public:
  // Columns: structural y, one slack per row, one artificial per row with b<0.
  explicit Tableau(const StandardForm& sf) : m_(static_cast<int>(sf.a.size())), ny_(sf.num_y) {
    num_art_ = 0;
    for (double bi : sf.b) num_art_ += bi < 0.0 ? 1 : 0;
    cols_ = ny_ + m_ + num_art_;
    t_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m_, -1);
    int art = ny_ + m_;
    for (int i = 0; i < m_; ++i) {
      const double sign = sf.b[i] < 0.0 ? -1.0 : 1.0;
      for (int k = 0; k < ny_; ++k) t_[i][k] = sign * sf.a[i][k];
      t_[i][ny_ + i] = sign;
      t_[i][cols_] = sign * sf.b[i];
      if (sign < 0.0) {
        t_[i][art] = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = ny_ + i;
      }
    }
    blocked_.assign(cols_, false);
  }

  bool is_artificial(int col) const { return col >= ny_ + m_; }

  // Minimizes cost . columns from the current basis. Returns false if unbounded.
  bool minimize(const std::vector<double>& cost) {
    const long long max_iter = 50000LL + 50LL * (cols_ + m_);
    for (long long iter = 0; iter < max_iter; ++iter) {
      // Reduced costs d_j = c_j - c_B . column_j.
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (blocked_[j] || is_basic(j)) continue;
        double d = cost[j];
        for (int i = 0; i < m_; ++i) d -= cost[basis_[i]] * t_[i][j];
        if (d < -1e-10) {
          enter = j;  // Bland: lowest index
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = t_[i][enter];
        if (a <= kLpPivotTol) continue;
        const double ratio = t_[i][cols_] / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  // Pivots zero-level artificials out of the basis; redundant rows keep them.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (int j = 0; j < ny_ + m_; ++j) {
        if (!is_basic(j) && std::abs(t_[i][j]) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
    for (int j = ny_ + m_; j < cols_; ++j) blocked_[j] = true;
  }

  double value_of(int col) const {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] == col) return t_[i][cols_];
    }
    return 0.0;
  }

  int cols() const { return cols_; }
  int structural() const { return ny_; }
  int rows() const { return m_; }

 private:
  bool is_basic(int col) const {
    for (int b : basis_) {
      if (b == col) return true;
    }
    return false;
  }

  void pivot(int r, int c) {
    const double p = t_[r][c];
    for (double& v : t_[r]) v /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[r][j];
      t_[i][c] = 0.0;
    }
    basis_[r] = c;
  }

  int m_;
  int ny_;
  int num_art_ = 0;
  int cols_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<int> basis_;
  std::vector<bool> blocked_;
};

}  // namespace

LpResult solve_lp(const DenseLp& lp) {
  const StandardForm sf = to_standard(lp);
  Tableau tab(sf);
  LpResult result;

  std::vector<double> phase1(tab.cols(), 0.0);
  bool any_art = false;
  for (int j = tab.structural() + tab.rows(); j < tab.cols(); ++j) {
    phase1[j] = 1.0;
    any_art = true;
  }
  if (any_art) {
    tab.minimize(phase1);
    double infeas = 0.0;
    for (int j = tab.structural() + tab.rows(); j < tab.cols(); ++j) infeas += tab.value_of(j);
    if (infeas > 1e-9) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    tab.expel_artificials();
  }

  std::vector<double> phase2(tab.cols(), 0.0);
  for (int k = 0; k < tab.structural(); ++k) phase2[k] = sf.c[k];
  if (!tab.minimize(phase2)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  const int n = lp.num_vars();
  result.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double x = sf.base[j];
    for (auto [k, s] : sf.cols[j]) x += s * tab.value_of(k);
    result.x[j] = x;
  }
  result.objective = 0.0;
  for (int j = 0; j < n; ++j) result.objective += lp.cost[j] * result.x[j];
  result.status = LpStatus::kOptimal;
  return result;
}

FeasibilityVerdict solve_lp_feasibility(std::span<const Inequality> rows, int dim) {
  FeasibilityVerdict verdict;
  DenseLp lp;
  lp.cost.assign(dim, 0.0);
  lp.lower.assign(dim, -kInf);
  lp.upper.assign(dim, kInf);
  for (const Inequality& r : rows) {
    if (static_cast<int>(r.coefs.size()) != dim) {
      throw std::invalid_argument("inequality dimension mismatch");
    }
    lp.rows.push_back({r.coefs, -kInf, r.rhs});
  }
  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::kInfeasible) return verdict;
  verdict.feasible = true;
  verdict.witness = res.x;
  return verdict;
}

}  // namespace sjs::milp
