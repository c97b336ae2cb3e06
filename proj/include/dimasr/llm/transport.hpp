#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "dimasr/llm/prompt.hpp"

namespace dimasr::llm {

struct ChatRequest {
  std::string model;
  double temperature = 0.1;
  std::vector<ChatMessage> messages;
};

/// Identifies one request within a run: the instance and the retry number.
struct RequestKey {
  std::string sentence_id;
  std::size_t aspect_index = 0;
  int attempt = 0;
  auto operator<=>(const RequestKey&) const = default;
};

/// A chat-completion backend. complete() returns the assistant text or
/// throws RuntimeFailure. Implementations must be safe to call from several
/// threads at once.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request, const RequestKey& key) = 0;
  /// True if complete() may touch the network.
  virtual bool live() const = 0;
};

struct EndpointConfig {
  /// Everything before "/chat/completions", e.g. "https://api.openai.com/v1".
  std::string base_url = "https://api.openai.com/v1";
  /// Name of the environment variable holding the bearer token.
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
};

/// OpenAI-compatible chat completions over HTTP(S).
class OpenAiTransport final : public ChatTransport {
 public:
  /// Throws UsageError if the credential variable is unset or empty, or the
  /// URL is not http(s).
  explicit OpenAiTransport(EndpointConfig config);
  std::string complete(const ChatRequest& request, const RequestKey& key) override;
  bool live() const override { return true; }

 private:
  EndpointConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::string api_key_;
};

/// Serves responses from a transcript written by an earlier run. Never opens
/// a connection. Requests must match the recorded prompt exactly.
class ReplayTransport final : public ChatTransport {
 public:
  explicit ReplayTransport(const std::filesystem::path& transcript);
  std::string complete(const ChatRequest& request, const RequestKey& key) override;
  bool live() const override { return false; }
  std::size_t size() const { return records_.size(); }

 private:
  struct Recorded {
    std::vector<ChatMessage> messages;
    std::string model;
    std::optional<std::string> response;
    std::string error;
  };
  std::filesystem::path source_;
  std::map<RequestKey, Recorded> records_;
};

}  // namespace dimasr::llm
