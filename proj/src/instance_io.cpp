#include "sjs/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sjs {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>* warnings) : warnings_(warnings) {}

  const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw FormatError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(join(path, key), "missing required field");
    return *it;
  }

  template <typename T>
  T number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    return as<T>(v, join(path, key));
  }

  template <typename T>
  T as(const json& v, const std::string& where) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw FormatError(where, "expected an integer");
      return v.get<T>();
    } else {
      if (!v.is_number()) throw FormatError(where, "expected a number");
      return v.get<T>();
    }
  }

  const json& array(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array()) throw FormatError(join(path, key), "expected an array");
    return v;
  }

  void check_keys(const json& obj, std::initializer_list<const char*> known,
                  const std::string& path) {
    if (warnings_ == nullptr) return;
    std::set<std::string> names(known.begin(), known.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!names.count(it.key())) {
        warnings_->push_back(join(path, it.key()) + ": unknown field ignored");
      }
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string>* warnings_;
};

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

Instance parse_instance(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("line " + std::to_string(line_of_offset(text, e.byte)), e.what());
  }
  Reader r(warnings);
  if (!doc.is_object()) throw FormatError("line 1", "instance document must be an object");
  r.check_keys(doc,
               {"schema_version", "horizon", "shift_length", "ceiling_epsilon",
                "machine_groups", "jobs"},
               "");

  const int version = r.number<int>(doc, "schema_version", "");
  if (version != kInstanceSchemaVersion) {
    throw FormatError("schema_version", "unsupported version " + std::to_string(version) +
                                            " (expected " +
                                            std::to_string(kInstanceSchemaVersion) + ")");
  }

  Instance inst;
  inst.horizon = r.number<int>(doc, "horizon", "");
  inst.shift_length = r.number<int>(doc, "shift_length", "");
  if (doc.contains("ceiling_epsilon")) {
    inst.ceiling_epsilon = r.number<double>(doc, "ceiling_epsilon", "");
  }

  const json& groups = r.array(doc, "machine_groups", "");
  for (std::size_t m = 0; m < groups.size(); ++m) {
    const std::string path = index_path("machine_groups", m);
    r.check_keys(groups[m], {"id", "capacity"}, path);
    inst.machine_groups.push_back(
        {r.number<int>(groups[m], "id", path), r.number<int>(groups[m], "capacity", path)});
  }

  const json& jobs = r.array(doc, "jobs", "");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string path = index_path("jobs", i);
    const json& jj = jobs[i];
    r.check_keys(jj, {"id", "weight", "due_date", "scrap_prob", "rework_prob", "operations"},
                 path);
    Job job;
    job.id = r.number<int>(jj, "id", path);
    job.weight = r.number<double>(jj, "weight", path);
    job.due_date = r.number<int>(jj, "due_date", path);
    const bool has_scrap = jj.is_object() && jj.contains("scrap_prob");
    const bool has_rework = jj.is_object() && jj.contains("rework_prob");
    const double scrap = has_scrap ? r.number<double>(jj, "scrap_prob", path) : 0.0;
    const double rework = has_rework ? r.number<double>(jj, "rework_prob", path) : 0.0;

    const json& ops = r.array(jj, "operations", path);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      const std::string op_path = index_path(path + ".operations", j);
      const json& oj = ops[j];
      r.check_keys(oj, {"eligible", "scrap_prob", "rework_prob"}, op_path);
      OperationSpec op;
      if (oj.is_object() && oj.contains("scrap_prob")) {
        op.scrap_prob = r.number<double>(oj, "scrap_prob", op_path);
      } else if (has_scrap) {
        op.scrap_prob = scrap;
      } else {
        throw FormatError(op_path + ".scrap_prob", "missing (no job-level default)");
      }
      if (oj.is_object() && oj.contains("rework_prob")) {
        op.rework_prob = r.number<double>(oj, "rework_prob", op_path);
      } else if (has_rework) {
        op.rework_prob = rework;
      } else {
        throw FormatError(op_path + ".rework_prob", "missing (no job-level default)");
      }
      const json& elig = r.array(oj, "eligible", op_path);
      for (std::size_t k = 0; k < elig.size(); ++k) {
        const std::string e_path = index_path(op_path + ".eligible", k);
        r.check_keys(elig[k], {"group", "proc_time"}, e_path);
        op.eligible.push_back({r.number<int>(elig[k], "group", e_path) - 1,
                               r.number<int>(elig[k], "proc_time", e_path)});
      }
      job.operations.push_back(std::move(op));
    }
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

std::string format_instance(const Instance& inst) {
  json doc;
  doc["schema_version"] = kInstanceSchemaVersion;
  doc["horizon"] = inst.horizon;
  doc["shift_length"] = inst.shift_length;
  doc["ceiling_epsilon"] = inst.ceiling_epsilon;
  doc["machine_groups"] = json::array();
  for (const MachineGroup& g : inst.machine_groups) {
    doc["machine_groups"].push_back({{"id", g.id}, {"capacity", g.capacity}});
  }
  doc["jobs"] = json::array();
  for (const Job& job : inst.jobs) {
    json jj;
    jj["id"] = job.id;
    jj["weight"] = job.weight;
    jj["due_date"] = job.due_date;
    // Job-level probabilities when every operation agrees, else per operation.
    bool uniform = !job.operations.empty();
    for (const OperationSpec& op : job.operations) {
      uniform = uniform && op.scrap_prob == job.operations.front().scrap_prob &&
                op.rework_prob == job.operations.front().rework_prob;
    }
    if (uniform) {
      jj["scrap_prob"] = job.operations.front().scrap_prob;
      jj["rework_prob"] = job.operations.front().rework_prob;
    }
    jj["operations"] = json::array();
    for (const OperationSpec& op : job.operations) {
      json oj;
      oj["eligible"] = json::array();
      for (const Eligibility& e : op.eligible) {
        oj["eligible"].push_back({{"group", e.group + 1}, {"proc_time", e.proc_time}});
      }
      if (!uniform) {
        oj["scrap_prob"] = op.scrap_prob;
        oj["rework_prob"] = op.rework_prob;
      }
      jj["operations"].push_back(std::move(oj));
    }
    doc["jobs"].push_back(std::move(jj));
  }
  return doc.dump(2) + "\n";
}

Instance load_instance(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), warnings);
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  out << format_instance(inst);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace sjs
