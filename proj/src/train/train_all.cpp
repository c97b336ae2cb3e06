#include "dimasr/train/train_all.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

namespace dimasr::train {

namespace {

JobResult run_guarded(const std::string& name, const std::function<JobOutput(const std::string&)>& run_one) {
  JobResult result;
  result.name = name;
  try {
    result.output = run_one(name);
  } catch (const std::exception& e) {
    result.error = e.what();
  } catch (...) {
    result.error = "unknown failure";
  }
  return result;
}

}  // namespace

std::vector<JobResult> train_all(const std::vector<std::string>& names,
                                 const std::function<JobOutput(const std::string&)>& run_one, unsigned parallelism) {
  std::vector<JobResult> results(names.size());
  const unsigned workers = std::min<unsigned>(std::max(parallelism, 1u), static_cast<unsigned>(names.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < names.size(); ++i) results[i] = run_guarded(names[i], run_one);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < names.size(); i = next++) results[i] = run_guarded(names[i], run_one);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

std::string format_train_all_summary(const std::vector<JobResult>& results) {
  std::size_t ok = 0;
  std::string out;
  for (const auto& r : results) {
    if (r.ok()) {
      ++ok;
      const auto& h = r.output->history;
      const auto best = std::find_if(h.epochs.begin(), h.epochs.end(),
                                     [&](const EpochRecord& e) { return e.epoch == h.best_epoch; });
      out += fmt::format("ok      {:<12} best_epoch {} val_rmse_va {:.4f} -> {}\n", r.name, h.best_epoch,
                         best == h.epochs.end() ? 0.0 : best->val_rmse_va, r.output->checkpoint.string());
    } else {
      out += fmt::format("failed  {:<12} {}\n", r.name, r.error);
    }
  }
  out += fmt::format("{} of {} datasets trained\n", ok, results.size());
  return out;
}

}  // namespace dimasr::train
