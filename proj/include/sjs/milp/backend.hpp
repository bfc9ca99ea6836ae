#pragma once

#include <functional>
#include <memory>
#include <string>

#include "sjs/milp/model.hpp"

namespace sjs::milp {

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual MilpSolution solve(const MilpModel& model, const Budget& budget) const = 0;
  virtual std::string name() const = 0;
};

class BuiltinBackend final : public SolverBackend {
 public:
  MilpSolution solve(const MilpModel& model, const Budget& budget) const override;
  std::string name() const override { return "builtin"; }
};

// Runs an external MILP solver through a shell command template. The
// placeholders {model}, {solution} and {time_limit} are replaced by the MPS
// path, the expected solution path and the budget in seconds. The command
// must exit with 0 and leave a parseable solution whose values satisfy the
// model; otherwise the built-in solver is used and a warning is emitted.
class ExternalBackend final : public SolverBackend {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  explicit ExternalBackend(std::string command_template, WarningSink warn = {});
  MilpSolution solve(const MilpModel& model, const Budget& budget) const override;
  std::string name() const override { return "external"; }

  // Number of solves that fell back to the built-in solver.
  long long fallbacks() const { return *fallbacks_; }

 private:
  std::string template_;
  WarningSink warn_;
  BuiltinBackend builtin_;
  std::shared_ptr<long long> fallbacks_ = std::make_shared<long long>(0);
};

// Substitutes every {key} occurrence in `text`.
std::string expand_template(std::string text, const std::string& key, const std::string& value);

std::unique_ptr<SolverBackend> make_backend(const std::string& kind,
                                            const std::string& command_template = {},
                                            ExternalBackend::WarningSink warn = {});

}  // namespace sjs::milp
