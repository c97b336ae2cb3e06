#include "dimasr/llm/transport.hpp"

#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

#include "dimasr/common/error.hpp"
#include "dimasr/common/json_lines.hpp"

namespace dimasr::llm {

namespace {

Json messages_to_json(const std::vector<ChatMessage>& messages) {
  Json out = Json::array();
  for (const auto& m : messages) out.push_back({{"role", m.role}, {"content", m.content}});
  return out;
}

}  // namespace

OpenAiTransport::OpenAiTransport(EndpointConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw UsageError(fmt::format("live LLM calls need the API key in environment variable {}", config_.api_key_env));
  }
  api_key_ = key;
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || (url.compare(0, scheme_end, "http") != 0 && url.compare(0, scheme_end, "https") != 0)) {
    throw UsageError(fmt::format("endpoint URL must start with http:// or https://, got '{}'", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string OpenAiTransport::complete(const ChatRequest& request, const RequestKey& key) {
  const Json body = {{"model", request.model},
                     {"temperature", request.temperature},
                     {"messages", messages_to_json(request.messages)}};
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_bearer_token_auth(api_key_);
  const auto result = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
  const std::string where = fmt::format("'{}' aspect_index {} attempt {}", key.sentence_id, key.aspect_index, key.attempt);
  if (!result) {
    throw RuntimeFailure(fmt::format("request {} failed: {}", where, httplib::to_string(result.error())));
  }
  if (result->status != 200) {
    throw RuntimeFailure(fmt::format("request {} returned HTTP {}: {}", where, result->status,
                                     result->body.substr(0, 300)));
  }
  try {
    const Json reply = Json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw RuntimeFailure(fmt::format("request {}: unexpected response body: {}", where, e.what()));
  }
}

ReplayTransport::ReplayTransport(const std::filesystem::path& transcript) : source_(transcript) {
  for_each_json_line(read_file(transcript), transcript.string(), [&](const Json& j, std::size_t line) {
    try {
      RequestKey key{j.at("id").get<std::string>(), j.at("aspect_index").get<std::size_t>(), j.at("attempt").get<int>()};
      Recorded rec;
      for (const auto& m : j.at("messages")) {
        rec.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
      }
      rec.model = j.value("model", std::string());
      if (j.contains("response") && j["response"].is_string()) rec.response = j["response"].get<std::string>();
      rec.error = j.value("error", std::string());
      if (!records_.emplace(std::move(key), std::move(rec)).second) {
        throw DataError(fmt::format("{}:{}: duplicate request record", transcript.string(), line));
      }
    } catch (const Json::exception& e) {
      throw DataError(fmt::format("{}:{}: malformed transcript record: {}", transcript.string(), line, e.what()));
    }
  });
}

std::string ReplayTransport::complete(const ChatRequest& request, const RequestKey& key) {
  const auto it = records_.find(key);
  const std::string where = fmt::format("'{}' aspect_index {} attempt {}", key.sentence_id, key.aspect_index, key.attempt);
  if (it == records_.end()) {
    throw RuntimeFailure(fmt::format("transcript {} has no record for {}", source_.string(), where));
  }
  const Recorded& rec = it->second;
  if (!rec.model.empty() && rec.model != request.model) {
    throw DataError(fmt::format("{} was recorded with model '{}', not '{}'", source_.string(), rec.model, request.model));
  }
  if (rec.messages != request.messages) {
    throw DataError(fmt::format("prompt for {} differs from the one recorded in {}", where, source_.string()));
  }
  // Recorded failures replay with their original message so the transcript
  // of a replayed run matches the one it came from.
  if (!rec.response) throw RuntimeFailure(rec.error);
  return *rec.response;
}

}  // namespace dimasr::llm
