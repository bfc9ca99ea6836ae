#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjs/instance.hpp"

namespace sjs {

inline constexpr int kInstanceSchemaVersion = 1;

// Raised for malformed instance or solution documents. `where` is a line
// number ("line 12") for syntax errors or a field path ("jobs[3].due_date")
// for schema errors.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// JSON instance document, schema_version 1:
//
//   { "schema_version": 1, "horizon": T, "shift_length": S,
//     "ceiling_epsilon": eps,
//     "machine_groups": [ {"id": 1, "capacity": 2}, ... ],
//     "jobs": [ {"id": 1, "weight": 1.0, "due_date": 15,
//                "scrap_prob": 0.05, "rework_prob": 0.2,
//                "operations": [ {"eligible": [{"group": 1, "proc_time": 1}]},
//                                ... ] }, ... ] }
//
// Group and job ids are 1-based. scrap_prob / rework_prob may also appear on
// an operation, overriding the job-level value. Unknown keys are accepted and
// reported through `warnings`.
Instance parse_instance(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string format_instance(const Instance& inst);

Instance load_instance(const std::filesystem::path& path,
                       std::vector<std::string>* warnings = nullptr);
void save_instance(const Instance& inst, const std::filesystem::path& path);

// Shared by the instance and solution readers: line number of a byte offset.
int line_of_offset(const std::string& text, std::size_t offset);

}  // namespace sjs
