#include "sjs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace sjs {

namespace {

int proc_on(const OperationSpec& op, int group) {
  for (const Eligibility& e : op.eligible) {
    if (e.group == group) return e.proc_time;
  }
  return -1;
}

int fastest(const OperationSpec& op) {
  int best = op.eligible.front().proc_time;
  for (const Eligibility& e : op.eligible) best = std::min(best, e.proc_time);
  return best;
}

// Completion times of one scenario plan, indexed by absolute op.
std::vector<int> plan_completions(const Instance& inst, const Schedule& schedule, int job,
                                  int scenario, int first_op) {
  const Job& spec = inst.jobs[job];
  if (job >= static_cast<int>(schedule.plans.size()) ||
      scenario >= static_cast<int>(schedule.plans[job].size())) {
    throw std::invalid_argument("schedule lacks job " + std::to_string(job + 1));
  }
  const auto& plan = schedule.plans[job][scenario];
  if (static_cast<int>(plan.size()) != spec.num_ops() - first_op) {
    throw std::invalid_argument("schedule plan of job " + std::to_string(job + 1) + " has the wrong length");
  }
  std::vector<int> c(spec.num_ops(), 0);
  for (int j = first_op; j < spec.num_ops(); ++j) {
    const Placement& p = plan[j - first_op];
    const int proc = p.group >= 0 ? proc_on(spec.operations[j], p.group) : -1;
    if (p.start < 1 || proc < 0) {
      throw std::invalid_argument("missing placement: job " + std::to_string(job + 1) + " op " +
                                  std::to_string(j + 1) + " of plan " + std::to_string(scenario));
    }
    c[j] = p.start + proc - 1;
  }
  return c;
}

struct JobPlans {
  double weight = 1.0;
  int due = 0;
  std::vector<int> first_pass;               // completion per op
  std::vector<int> discard_end, rework_end;  // final completion per failed op
  std::vector<std::vector<int>> discard, rework;  // completion per op
};

std::vector<JobPlans> collect(const Instance& inst, const Schedule& schedule) {
  std::vector<JobPlans> out;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    JobPlans jp;
    jp.weight = job.weight;
    jp.due = job.due_date;
    jp.first_pass = plan_completions(inst, schedule, i, 0, 0);
    for (int f = 0; f < job.num_ops(); ++f) {
      jp.discard.push_back(plan_completions(inst, schedule, i, 1 + 2 * f, 0));
      jp.rework.push_back(plan_completions(inst, schedule, i, 2 + 2 * f, f));
      jp.discard_end.push_back(jp.discard.back().back());
      jp.rework_end.push_back(jp.rework.back().back());
    }
    out.push_back(std::move(jp));
  }
  return out;
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

enum class Step { kAdvance, kRework, kDiscard };

Step draw(std::uint64_t& state, const OperationSpec& op, TransitionCounts& counts) {
  if (uniform01(state) >= op.scrap_prob) {
    ++counts.advance;
    return Step::kAdvance;
  }
  if (uniform01(state) < op.rework_prob) {
    ++counts.rework;
    return Step::kRework;
  }
  ++counts.discard;
  return Step::kDiscard;
}

int round_to_shift(int c, int shift) { return ((c + shift - 1) / shift) * shift; }

// Realized completion of one job for one sample.
int sample_job(const Instance& inst, int i, const JobPlans& jp, std::uint64_t& state, SimMode mode,
               TransitionCounts& counts) {
  const Job& job = inst.jobs[i];
  const int n = job.num_ops();
  for (int j = 0; j < n; ++j) {
    const Step s = draw(state, job.operations[j], counts);
    if (s == Step::kAdvance) continue;
    const bool rework = s == Step::kRework;
    if (mode == SimMode::kSingleFailure) return rework ? jp.rework_end[j] : jp.discard_end[j];

    // Second attempt follows its plan until it finishes or fails again.
    const std::vector<int>& plan = rework ? jp.rework[j] : jp.discard[j];
    Step again = Step::kAdvance;
    int k = rework ? j : 0;
    for (; k < n; ++k) {
      again = draw(state, job.operations[k], counts);
      if (again != Step::kAdvance) break;
    }
    if (k == n) return plan.back();

    // Later attempts are re-executed serially from the next shift boundary.
    int clock = round_to_shift(plan[k], inst.shift_length);
    int op = again == Step::kRework ? k : 0;
    for (long long guard = 0; guard < 10000000; ++guard) {
      const int done = clock + fastest(job.operations[op]);
      const Step t = draw(state, job.operations[op], counts);
      if (t == Step::kAdvance) {
        clock = done;
        if (++op == n) return clock;
      } else {
        clock = round_to_shift(done, inst.shift_length);
        if (t == Step::kDiscard) op = 0;
      }
    }
    throw std::runtime_error("full-Markov sample did not terminate");
  }
  return jp.first_pass.back();
}

struct Partial {
  double sum = 0.0;
  double sum_sq = 0.0;
  TransitionCounts counts;
};

constexpr long long kBlock = 4096;

}  // namespace

const char* to_string(SimMode mode) {
  return mode == SimMode::kSingleFailure ? "SINGLE_FAILURE" : "FULL_MARKOV";
}

double exact_expected_tardiness(const Instance& inst, const Schedule& schedule) {
  const std::vector<JobPlans> plans = collect(inst, schedule);
  double total = 0.0;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    const JobPlans& jp = plans[i];
    auto tardy = [&](int c) { return static_cast<double>(std::max(c - jp.due, 0)); };
    double mass = 1.0;  // probability of reaching op j without a defect
    double expected = 0.0;
    for (int j = 0; j < job.num_ops(); ++j) {
      const OperationSpec& op = job.operations[j];
      const double defect = mass * op.scrap_prob;
      expected += defect * op.rework_prob * tardy(jp.rework_end[j]);
      expected += defect * (1.0 - op.rework_prob) * tardy(jp.discard_end[j]);
      mass -= defect;
    }
    expected += mass * tardy(jp.first_pass.back());
    total += jp.weight * expected;
  }
  return total;
}

MonteCarloResult monte_carlo_tardiness(const Instance& inst, const Schedule& schedule,
                                       long long samples, std::uint64_t seed, SimMode mode,
                                       int threads) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const std::vector<JobPlans> plans = collect(inst, schedule);
  const long long blocks = (samples + kBlock - 1) / kBlock;
  std::vector<Partial> partial(blocks);

  auto run_block = [&](long long b) {
    Partial& out = partial[b];
    const long long end = std::min(samples, (b + 1) * kBlock);
    for (long long n = b * kBlock; n < end; ++n) {
      std::uint64_t key = seed ^ (0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(n + 1));
      std::uint64_t state = splitmix(key);
      double value = 0.0;
      for (int i = 0; i < inst.num_jobs(); ++i) {
        const int c = sample_job(inst, i, plans[i], state, mode, out.counts);
        value += plans[i].weight * std::max(c - plans[i].due, 0);
      }
      out.sum += value;
      out.sum_sq += value * value;
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || blocks == 1) {
    for (long long b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (long long b = w; b < blocks; b += threads) run_block(b);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  MonteCarloResult r;
  r.mode = mode;
  r.samples = samples;
  double sum = 0.0, sum_sq = 0.0;
  for (const Partial& p : partial) {
    sum += p.sum;
    sum_sq += p.sum_sq;
    r.transitions.advance += p.counts.advance;
    r.transitions.rework += p.counts.rework;
    r.transitions.discard += p.counts.discard;
  }
  const double n = static_cast<double>(samples);
  r.mean = sum / n;
  const double var = samples > 1 ? std::max(sum_sq - n * r.mean * r.mean, 0.0) / (n - 1.0) : 0.0;
  r.std_error = std::sqrt(var / n);
  return r;
}

void write_evaluation_csv(std::ostream& out, const std::vector<MonteCarloResult>& runs,
                          double exact_value) {
  out << "mode,N,mean,std_error,exact_value,z_score\n";
  out.precision(10);
  for (const MonteCarloResult& r : runs) {
    const double z = r.std_error > 0.0 ? (r.mean - exact_value) / r.std_error
                                       : (r.mean == exact_value ? 0.0 : INFINITY);
    out << to_string(r.mode) << ',' << r.samples << ',' << r.mean << ',' << r.std_error << ','
        << exact_value << ',' << z << '\n';
  }
}

}  // namespace sjs
