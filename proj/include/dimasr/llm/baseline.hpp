#pragma once

#include <span>
#include <string>
#include <vector>

#include "dimasr/common/json_lines.hpp"
#include "dimasr/data/instance_io.hpp"
#include "dimasr/llm/prompt.hpp"
#include "dimasr/llm/transport.hpp"

namespace dimasr::llm {

struct LlmRunConfig {
  std::string model = "gpt-5.2";
  double temperature = 0.1;
  /// Extra attempts after the first when a reply cannot be parsed or the
  /// request fails.
  int max_retries = 2;
  /// Requests in flight at once.
  int concurrency = 4;

  void validate() const;
};

enum class Outcome { ok, fallback };

struct InstanceOutcome {
  Outcome outcome = Outcome::ok;
  int attempts = 0;
};

struct BaselineResult {
  std::vector<data::Prediction> predictions;   // input order
  std::vector<InstanceOutcome> outcomes;       // parallel to predictions
  std::vector<OrderedJson> transcript;         // one record per request
  std::size_t fallbacks = 0;
  std::size_t transport_errors = 0;
  std::size_t parse_failures = 0;

  bool all_failed() const { return !predictions.empty() && fallbacks == predictions.size(); }
};

/// One prompt per instance. A reply that does not parse, or a request that
/// fails, is retried up to max_retries times; after that the instance gets
/// the scale midpoint (5.00, 5.00) and is counted as a fallback. Requests
/// run concurrently; results and transcript follow input order.
BaselineResult run_baseline(std::span<const data::AspectInstance> instances, std::span<const Exemplar> exemplars,
                            std::string_view system_text, const LlmRunConfig& config, ChatTransport& transport);

/// JSON lines, one request per line.
std::string render_transcript(const BaselineResult& result);

}  // namespace dimasr::llm
