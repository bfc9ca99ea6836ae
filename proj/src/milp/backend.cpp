#include "sjs/milp/backend.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "sjs/milp/builtin.hpp"
#include "sjs/milp/mps.hpp"

namespace sjs::milp {

namespace fs = std::filesystem;

MilpSolution BuiltinBackend::solve(const MilpModel& model, const Budget& budget) const {
  return solve_builtin(model, budget);
}

ExternalBackend::ExternalBackend(std::string command_template, WarningSink warn)
    : template_(std::move(command_template)), warn_(std::move(warn)) {
  if (!warn_) warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
}

std::string expand_template(std::string text, const std::string& key, const std::string& value) {
  const std::string token = "{" + key + "}";
  for (std::size_t pos = text.find(token); pos != std::string::npos;
       pos = text.find(token, pos + value.size())) {
    text.replace(pos, token.size(), value);
  }
  return text;
}

namespace {

fs::path scratch_dir() {
  static std::atomic<long long> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("sjs-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

MilpSolution ExternalBackend::solve(const MilpModel& model, const Budget& budget) const {
  const fs::path dir = scratch_dir();
  const fs::path mps = dir / "model.mps";
  const fs::path sol = dir / "model.sol";
  std::string reason;
  MilpSolution result;
  bool ok = false;
  try {
    write_mps(model, mps);
    std::string cmd = expand_template(template_, "model", mps.string());
    cmd = expand_template(cmd, "solution", sol.string());
    const double limit = std::isfinite(budget.time_limit_s) ? budget.time_limit_s : 1e9;
    cmd = expand_template(cmd, "time_limit", std::to_string(limit));
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      reason = "solver command exited with status " + std::to_string(rc);
    } else {
      result = parse_external_solution(sol, model);
      if (result.has_solution()) {
        const auto bad = model.violations(result.values, 1e-6);
        if (!bad.empty()) {
          reason = "external solution violates the model: " + bad.front();
        } else {
          ok = true;
        }
      } else {
        ok = true;
      }
    }
  } catch (const std::exception& e) {
    reason = e.what();
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (ok) return result;
  ++*fallbacks_;
  warn_("external backend failed (" + reason + "); using builtin");
  return builtin_.solve(model, budget);
}

std::unique_ptr<SolverBackend> make_backend(const std::string& kind,
                                            const std::string& command_template,
                                            ExternalBackend::WarningSink warn) {
  if (kind == "builtin") return std::make_unique<BuiltinBackend>();
  if (kind == "external") {
    if (command_template.empty()) throw std::invalid_argument("external backend needs a command template");
    return std::make_unique<ExternalBackend>(command_template, std::move(warn));
  }
  throw std::invalid_argument("unknown backend '" + kind + "'");
}

}  // namespace sjs::milp
