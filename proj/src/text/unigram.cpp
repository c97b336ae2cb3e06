#include "dimasr/text/unigram.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <regex>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"
#include "dimasr/text/utf8.hpp"

namespace dimasr::text {

namespace {

constexpr double kUnkPenalty = 10.0;

using Json = nlohmann::json;

void parse_normalizer(const Json& node, std::vector<UnigramTokenizer::Normalizer>& out, std::string_view source) {
  if (node.is_null()) return;
  const std::string type = node.at("type").get<std::string>();
  if (type == "Sequence") {
    for (const auto& child : node.at("normalizers")) parse_normalizer(child, out, source);
  } else if (type == "Precompiled") {
    const auto& map = node.at("precompiled_charsmap");
    if (!map.is_null()) out.emplace_back(PrecompiledCharsmap::from_base64(map.get<std::string>()));
  } else if (type == "Strip") {
    out.emplace_back(UnigramTokenizer::Strip{node.value("strip_left", false), node.value("strip_right", false)});
  } else if (type == "Replace") {
    UnigramTokenizer::Replace replace;
    const auto& pattern = node.at("pattern");
    if (pattern.contains("Regex")) {
      replace.pattern = pattern.at("Regex").get<std::string>();
      replace.is_regex = true;
    } else {
      replace.pattern = pattern.at("String").get<std::string>();
    }
    replace.content = node.at("content").get<std::string>();
    out.emplace_back(std::move(replace));
  } else {
    throw DataError(fmt::format("{}: unsupported normalizer '{}'", source, type));
  }
}

void parse_pre_tokenizer(const Json& node, std::vector<UnigramTokenizer::PreTokenizer>& out,
                         std::string_view source) {
  if (node.is_null()) return;
  const std::string type = node.at("type").get<std::string>();
  if (type == "Sequence") {
    for (const auto& child : node.at("pretokenizers")) parse_pre_tokenizer(child, out, source);
  } else if (type == "WhitespaceSplit") {
    out.emplace_back(UnigramTokenizer::WhitespaceSplit{});
  } else if (type == "Metaspace") {
    UnigramTokenizer::Metaspace meta;
    meta.replacement = node.value("replacement", meta.replacement);
    meta.split = node.value("split", true);
    if (node.contains("prepend_scheme")) {
      const auto scheme = node.at("prepend_scheme").get<std::string>();
      if (scheme == "always") {
        meta.prepend = UnigramTokenizer::Metaspace::Prepend::always;
      } else if (scheme == "first") {
        meta.prepend = UnigramTokenizer::Metaspace::Prepend::first;
      } else if (scheme == "never") {
        meta.prepend = UnigramTokenizer::Metaspace::Prepend::never;
      } else {
        throw DataError(fmt::format("{}: unknown Metaspace prepend_scheme '{}'", source, scheme));
      }
    } else if (!node.value("add_prefix_space", true)) {
      meta.prepend = UnigramTokenizer::Metaspace::Prepend::never;
    }
    out.emplace_back(std::move(meta));
  } else {
    throw DataError(fmt::format("{}: unsupported pre-tokenizer '{}'", source, type));
  }
}

std::string strip(std::string_view s, bool left, bool right) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  if (left) {
    while (begin < end) {
      const Decoded d = decode_utf8(s, begin);
      if (!is_unicode_space(d.code_point)) break;
      begin += d.length;
    }
  }
  if (right) {
    // Walk forward remembering where the trailing whitespace run starts.
    std::size_t pos = begin;
    std::size_t last_non_space_end = begin;
    while (pos < end) {
      const Decoded d = decode_utf8(s, pos);
      pos += d.length;
      if (!is_unicode_space(d.code_point)) last_non_space_end = pos;
    }
    end = last_non_space_end;
  }
  return std::string(s.substr(begin, end - begin));
}

std::string replace_all(std::string_view s, const std::string& from, const std::string& to) {
  if (from.empty()) return std::string(s);
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = s.find(from, pos);
    if (hit == std::string_view::npos) break;
    out.append(s.substr(pos, hit - pos));
    out.append(to);
    pos = hit + from.size();
  }
  out.append(s.substr(pos));
  return out;
}

/// Splits keeping each delimiter attached to the piece that follows it.
std::vector<std::string> split_merged_with_next(std::string_view s, std::string_view delimiter) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::size_t pos = 0;
  while ((pos = s.find(delimiter, pos)) != std::string_view::npos) {
    if (pos > start) pieces.emplace_back(s.substr(start, pos - start));
    start = pos;
    pos += delimiter.size();
  }
  if (start < s.size()) pieces.emplace_back(s.substr(start));
  return pieces;
}

}  // namespace

std::unique_ptr<UnigramTokenizer> UnigramTokenizer::from_file(const std::filesystem::path& path) {
  return from_json(read_file(path), path.string());
}

std::unique_ptr<UnigramTokenizer> UnigramTokenizer::from_json(std::string_view text, std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(fmt::format("{}: malformed tokenizer JSON: {}", source, e.what()));
  }
  try {
    if (!doc.is_object() || !doc.contains("model") || !doc["model"].is_object()) {
      throw DataError(fmt::format("{}: tokenizer JSON has no model section", source));
    }
    const auto& model = doc.at("model");
    if (model.value("type", std::string()) != "Unigram") {
      throw DataError(fmt::format("{}: expected a Unigram model, got '{}'", source, model.value("type", std::string())));
    }
    if (model.value("byte_fallback", false)) {
      throw DataError(fmt::format("{}: byte_fallback Unigram models are not supported", source));
    }

    std::unique_ptr<UnigramTokenizer> tok(new UnigramTokenizer());
    std::unordered_set<std::string> special_added;
    if (doc.contains("added_tokens")) {
      for (const auto& added : doc.at("added_tokens")) {
        if (added.value("special", false)) special_added.insert(added.at("content").get<std::string>());
      }
    }
    double min_score = std::numeric_limits<double>::infinity();
    for (const auto& entry : model.at("vocab")) {
      const auto piece = entry.at(0).get<std::string>();
      const double score = entry.at(1).get<double>();
      const int id = static_cast<int>(tok->pieces_.size());
      tok->pieces_.emplace_back(piece, score);
      min_score = std::min(min_score, score);
      if (!special_added.contains(piece)) {
        tok->piece_ids_.emplace(piece, id);
        tok->max_piece_bytes_ = std::max(tok->max_piece_bytes_, piece.size());
      }
    }
    if (tok->pieces_.empty()) throw DataError(fmt::format("{}: empty vocabulary", source));
    tok->unk_score_ = min_score - kUnkPenalty;

    auto lookup = [&](std::initializer_list<const char*> names) -> std::optional<int> {
      for (const char* name : names) {
        for (std::size_t i = 0; i < tok->pieces_.size(); ++i) {
          if (tok->pieces_[i].first == name) return static_cast<int>(i);
        }
      }
      return std::nullopt;
    };
    const auto unk_id = model.value("unk_id", Json());
    if (unk_id.is_number_integer()) {
      tok->special_.unk = unk_id.get<int>();
    } else if (auto id = lookup({"<unk>", "[UNK]"})) {
      tok->special_.unk = *id;
    } else {
      throw DataError(fmt::format("{}: no unknown-token id", source));
    }
    const auto cls = lookup({"<s>", "[CLS]"});
    const auto sep = lookup({"</s>", "[SEP]"});
    const auto pad = lookup({"<pad>", "[PAD]"});
    if (!cls || !sep) throw DataError(fmt::format("{}: vocabulary lacks start/separator tokens", source));
    tok->special_.cls = *cls;
    tok->special_.sep = *sep;
    tok->special_.pad = pad.value_or(tok->special_.unk);

    parse_normalizer(doc.value("normalizer", Json()), tok->normalizers_, source);
    parse_pre_tokenizer(doc.value("pre_tokenizer", Json()), tok->pre_tokenizers_, source);
    return tok;
  } catch (const Json::exception& e) {
    throw DataError(fmt::format("{}: malformed tokenizer JSON: {}", source, e.what()));
  }
}

std::string UnigramTokenizer::normalize(std::string_view text) const {
  std::string s(text);
  for (const auto& step : normalizers_) {
    if (const auto* map = std::get_if<PrecompiledCharsmap>(&step)) {
      s = map->normalize(s);
    } else if (const auto* st = std::get_if<Strip>(&step)) {
      s = strip(s, st->left, st->right);
    } else if (const auto* rep = std::get_if<Replace>(&step)) {
      if (rep->is_regex) {
        s = std::regex_replace(s, std::regex(rep->pattern), rep->content);
      } else {
        s = replace_all(s, rep->pattern, rep->content);
      }
    }
  }
  return s;
}

std::vector<std::string> UnigramTokenizer::pre_tokenize(std::string_view text) const {
  std::vector<std::string> pieces{normalize(text)};
  if (pieces.front().empty()) return {};
  for (const auto& step : pre_tokenizers_) {
    std::vector<std::string> next;
    for (std::size_t index = 0; index < pieces.size(); ++index) {
      const std::string& piece = pieces[index];
      if (std::holds_alternative<WhitespaceSplit>(step)) {
        std::string word;
        for (std::size_t pos = 0; pos < piece.size();) {
          const Decoded d = decode_utf8(piece, pos);
          if (is_unicode_space(d.code_point)) {
            if (!word.empty()) next.push_back(std::move(word));
            word.clear();
          } else {
            word.append(piece, pos, d.length);
          }
          pos += d.length;
        }
        if (!word.empty()) next.push_back(std::move(word));
        continue;
      }
      const auto& meta = std::get<Metaspace>(step);
      std::string replaced = replace_all(piece, " ", meta.replacement);
      const bool prepend = meta.prepend == Metaspace::Prepend::always ||
                           (meta.prepend == Metaspace::Prepend::first && index == 0);
      if (prepend && !replaced.starts_with(meta.replacement)) replaced = meta.replacement + replaced;
      if (meta.split) {
        for (auto& part : split_merged_with_next(replaced, meta.replacement)) next.push_back(std::move(part));
      } else if (!replaced.empty()) {
        next.push_back(std::move(replaced));
      }
    }
    pieces = std::move(next);
  }
  std::erase_if(pieces, [](const std::string& p) { return p.empty(); });
  return pieces;
}

std::vector<int> UnigramTokenizer::segment(std::string_view word) const {
  struct Node {
    int id = -1;
    double score = 0.0;
    std::ptrdiff_t starts_at = -1;
  };
  const std::size_t size = word.size();
  std::vector<Node> best(size + 1);
  best[0].starts_at = 0;
  std::size_t start = 0;
  while (start < size) {
    const double score_here = best[start].score;
    const std::size_t char_len = utf8_char_length(word, start);
    bool has_single = false;
    const std::size_t max_len = std::min(max_piece_bytes_, size - start);
    for (std::size_t len = 1; len <= max_len; ++len) {
      const auto it = piece_ids_.find(std::string(word.substr(start, len)));
      if (it == piece_ids_.end()) continue;
      Node& target = best[start + len];
      const double candidate = pieces_[static_cast<std::size_t>(it->second)].second + score_here;
      if (target.starts_at < 0 || candidate > target.score) {
        target = Node{it->second, candidate, static_cast<std::ptrdiff_t>(start)};
      }
      if (len == char_len) has_single = true;
    }
    if (!has_single) {
      Node& target = best[start + char_len];
      const double candidate = unk_score_ + score_here;
      if (target.starts_at < 0 || candidate > target.score) {
        target = Node{special_.unk, candidate, static_cast<std::ptrdiff_t>(start)};
      }
    }
    start += char_len;
  }

  std::vector<int> reversed;
  std::size_t end = size;
  bool previous_unk = false;
  while (end > 0) {
    const Node& node = best[end];
    const bool is_unk = node.id == special_.unk;
    if (!(is_unk && previous_unk)) reversed.push_back(node.id);
    previous_unk = is_unk;
    end = static_cast<std::size_t>(node.starts_at);
  }
  return {reversed.rbegin(), reversed.rend()};
}

std::vector<int> UnigramTokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& word : pre_tokenize(text)) {
    const auto part = segment(word);
    ids.insert(ids.end(), part.begin(), part.end());
  }
  return ids;
}

}  // namespace dimasr::text
