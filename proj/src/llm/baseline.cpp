#include "dimasr/llm/baseline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr::llm {

void LlmRunConfig::validate() const {
  if (model.empty()) throw UsageError("llm model name is empty");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw UsageError("llm temperature must be >= 0");
  if (max_retries < 0) throw UsageError("llm max_retries must be >= 0");
  if (concurrency < 1) throw UsageError("llm concurrency must be >= 1");
}

namespace {

struct Attempted {
  data::Prediction prediction;
  InstanceOutcome outcome;
  std::vector<OrderedJson> records;
  std::size_t transport_errors = 0;
  std::size_t parse_failures = 0;
};

OrderedJson request_record(const data::AspectInstance& x, int attempt, const ChatRequest& request) {
  OrderedJson r;
  r["id"] = x.sentence_id;
  r["aspect_index"] = x.aspect_index;
  r["attempt"] = attempt;
  r["model"] = request.model;
  r["temperature"] = request.temperature;
  OrderedJson messages = OrderedJson::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  r["messages"] = std::move(messages);
  return r;
}

Attempted run_one(const data::AspectInstance& x, std::span<const Exemplar> exemplars, std::string_view system_text,
                  const LlmRunConfig& config, ChatTransport& transport) {
  Attempted out;
  const ChatRequest request{config.model, config.temperature, build_prompt(x, exemplars, system_text)};
  std::optional<data::VAPair> parsed;
  int attempt = 0;
  for (; attempt <= config.max_retries && !parsed; ++attempt) {
    OrderedJson record = request_record(x, attempt, request);
    try {
      const std::string reply = transport.complete(request, {x.sentence_id, x.aspect_index, attempt});
      record["response"] = reply;
      parsed = parse_llm_output(reply);
      if (parsed) {
        record["parsed"] = data::format_va_string(*parsed);
        record["status"] = "ok";
      } else {
        record["parsed"] = nullptr;
        record["status"] = "parse_failure";
        ++out.parse_failures;
      }
    } catch (const DataError&) {
      throw;
    } catch (const RuntimeFailure& e) {
      record["response"] = nullptr;
      record["parsed"] = nullptr;
      record["status"] = "transport_error";
      record["error"] = e.what();
      ++out.transport_errors;
    }
    out.records.push_back(std::move(record));
  }
  out.outcome.attempts = attempt;
  if (parsed) {
    out.prediction = {x.sentence_id, x.aspect_index, x.aspect, *parsed};
  } else {
    out.prediction = {x.sentence_id, x.aspect_index, x.aspect, data::VAPair::midpoint()};
    out.outcome.outcome = Outcome::fallback;
    out.records.back()["fallback"] = data::format_va_string(data::VAPair::midpoint());
  }
  return out;
}

}  // namespace

BaselineResult run_baseline(std::span<const data::AspectInstance> instances, std::span<const Exemplar> exemplars,
                            std::string_view system_text, const LlmRunConfig& config, ChatTransport& transport) {
  config.validate();
  std::vector<Attempted> slots(instances.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        slots[i] = run_one(instances[i], exemplars, system_text, config, transport);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = instances.size();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), instances.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  BaselineResult result;
  for (auto& slot : slots) {
    result.predictions.push_back(slot.prediction);
    result.outcomes.push_back(slot.outcome);
    for (auto& r : slot.records) result.transcript.push_back(std::move(r));
    result.fallbacks += slot.outcome.outcome == Outcome::fallback;
    result.transport_errors += slot.transport_errors;
    result.parse_failures += slot.parse_failures;
  }
  return result;
}

std::string render_transcript(const BaselineResult& result) {
  std::string out;
  for (const auto& r : result.transcript) out += to_json_line(r);
  return out;
}

}  // namespace dimasr::llm
