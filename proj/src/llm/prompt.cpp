#include "dimasr/llm/prompt.hpp"

#include <numeric>
#include <regex>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/rng.hpp"

namespace dimasr::llm {

const std::string_view kSystemPrompt =
    "You are an expert in sentiment analysis. Your task is to predict Valence and Arousal scores for aspects in "
    "sentences.\n"
    "\n"
    "Definitions:\n"
    "- Valence: emotional positivity/negativity (1.0 = very negative, 5.0 = neutral, 9.0 = very positive)\n"
    "- Arousal: emotional intensity/excitement (1.0 = very calm/sluggish, 5.0 = moderate, 9.0 = very excited)\n"
    "\n"
    "Output format: valence#arousal (e.g., 7.50#6.80)";

const std::vector<Exemplar>& default_exemplars() {
  static const std::vector<Exemplar> exemplars{
      {"the food was absolutely amazing!!", "food", data::VAPair(8.50, 8.25)},
      {"but the staff was so horrible to us.", "staff", data::VAPair(1.33, 8.67)},
      {"food was just average... if they lowered the prices just a bit, it would be a bigger draw.", "food",
       data::VAPair(5.00, 5.00)},
      {"i love this macbook.", "macbook", data::VAPair(7.10, 6.90)},
      {"horrible product.", "product", data::VAPair(2.60, 5.70)},
      {"it has and does everything it should.", "NULL", data::VAPair(5.67, 5.50)},
  };
  return exemplars;
}

std::string render_query(std::string_view text, std::string_view aspect) {
  return fmt::format("Text: \"{}\"\nAspect: \"{}\"\nAnswer:", text, aspect);
}

std::vector<ChatMessage> build_prompt(const data::AspectInstance& query, std::span<const Exemplar> exemplars,
                                      std::string_view system_text) {
  std::vector<ChatMessage> messages;
  messages.reserve(2 + 2 * exemplars.size());
  messages.push_back({"system", std::string(system_text)});
  for (const auto& e : exemplars) {
    messages.push_back({"user", render_query(e.text, e.aspect)});
    messages.push_back({"assistant", data::format_va_string(e.answer)});
  }
  messages.push_back({"user", render_query(query.text, query.aspect)});
  return messages;
}

std::vector<Exemplar> sample_exemplars(std::span<const data::AspectInstance> pool, std::size_t k, std::uint64_t seed) {
  if (k > pool.size()) {
    throw UsageError(fmt::format("cannot sample {} exemplars from a pool of {}", k, pool.size()));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "sampling"));
  rng.shuffle(std::span<std::size_t>(order));
  order.resize(k);
  std::vector<Exemplar> out;
  out.reserve(k);
  for (std::size_t index : order) {
    const auto& x = pool[index];
    if (!x.gold) {
      throw DataError(fmt::format("exemplar '{}' aspect_index {} has no gold label", x.sentence_id, x.aspect_index));
    }
    out.push_back({x.text, x.aspect, *x.gold});
  }
  return out;
}

std::optional<data::VAPair> parse_llm_output(std::string_view raw) {
  static const std::regex pattern(R"(([+-]?(?:\d+\.?\d*|\.\d+))\s*#\s*([+-]?(?:\d+\.?\d*|\.\d+)))");
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_search(raw.begin(), raw.end(), match, pattern)) return std::nullopt;
  try {
    return data::VAPair::clipped(data::parse_real(match[1].str()), data::parse_real(match[2].str()));
  } catch (const DataError&) {
    return std::nullopt;
  }
}

}  // namespace dimasr::llm
