#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimasr/data/dataset.hpp"

namespace dimasr::llm {

/// The system instruction used for every prompted model.
extern const std::string_view kSystemPrompt;

struct Exemplar {
  std::string text;
  std::string aspect;
  data::VAPair answer = data::VAPair::midpoint();
};

/// The six fixed demonstrations, in their published order.
const std::vector<Exemplar>& default_exemplars();

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

/// `Text: "..."`, `Aspect: "..."`, `Answer:` on three lines.
std::string render_query(std::string_view text, std::string_view aspect);

/// System message, then one user/assistant pair per exemplar (answer as
/// "V.VV#A.AA"), then the query as the final user message.
std::vector<ChatMessage> build_prompt(const data::AspectInstance& query, std::span<const Exemplar> exemplars,
                                      std::string_view system_text = kSystemPrompt);

/// Seeded uniform sample of k labeled instances without replacement, taken
/// in pool order after a shuffle on the "sampling" stream. Throws UsageError
/// if k exceeds the pool and DataError if a drawn instance has no gold.
std::vector<Exemplar> sample_exemplars(std::span<const data::AspectInstance> pool, std::size_t k,
                                       std::uint64_t seed);

/// First `number # number` in the text, each value clipped into [1, 9].
/// Returns nothing when no such pattern exists.
std::optional<data::VAPair> parse_llm_output(std::string_view raw);

}  // namespace dimasr::llm
