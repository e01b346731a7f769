#include "globalner/internet.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "globalner/errors.hpp"
#include "globalner/text.hpp"

namespace globalner {

namespace {

std::vector<WebResult> parse_results(const nlohmann::json& body,
                                     const std::string& where) {
  if (!body.is_object() || !body.contains("results") ||
      !body["results"].is_array()) {
    throw BackendError(BackendError::Kind::payload,
                       where + ": response has no \"results\" array");
  }
  std::vector<WebResult> results;
  for (const auto& r : body["results"]) {
    results.push_back({r.value("title", ""), r.value("snippet", ""),
                       r.value("link", "")});
  }
  return results;
}

// Host part of a URL, without port.
std::string url_host(const std::string& url) {
  auto scheme = url.find("://");
  std::size_t begin = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t end = url.find_first_of("/?#", begin);
  std::string host = url.substr(begin, end == std::string::npos ? std::string::npos
                                                                : end - begin);
  auto colon = host.rfind(':');
  if (colon != std::string::npos) host = host.substr(0, colon);
  return lowercase_ascii(host);
}

bool host_blocked(const std::string& host,
                  const std::vector<std::string>& blocked) {
  for (const auto& domain : blocked) {
    std::string d = lowercase_ascii(domain);
    if (host == d) return true;
    if (host.size() > d.size() &&
        host.compare(host.size() - d.size() - 1, d.size() + 1, "." + d) == 0) {
      return true;
    }
  }
  return false;
}

}  // namespace

FixtureSearchClient::FixtureSearchClient(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open search fixture: " + path);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad search fixture " + path + ": " + e.what());
  }
  for (const auto& [query, body] : parsed.items()) {
    responses_[query] = parse_results(body, path);
  }
}

std::vector<WebResult> FixtureSearchClient::search(const std::string& query,
                                                   std::size_t limit) const {
  auto it = responses_.find(query);
  if (it == responses_.end()) return {};
  auto results = it->second;
  if (results.size() > limit) results.resize(limit);
  return results;
}

HttpSearchClient::HttpSearchClient(HttpClientConfig config)
    : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  std::string rest = url;
  if (rest.rfind("http://", 0) == 0) {
    rest = rest.substr(7);
  } else if (rest.rfind("https://", 0) == 0) {
    throw DataError("https endpoints are not supported; use http");
  }
  auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    host_ = authority.substr(0, colon);
    port_ = std::atoi(authority.c_str() + colon + 1);
  } else {
    host_ = authority;
    port_ = 80;
  }
  if (host_.empty()) throw DataError("bad search endpoint: " + url);
  if (const char* key = std::getenv(config_.api_key_env.c_str())) {
    api_key_ = key;
  }
  last_request_ = std::chrono::steady_clock::now() - config_.min_interval;
}

HttpSearchClient::~HttpSearchClient() = default;

void HttpSearchClient::acquire_slot() const {
  std::unique_lock<std::mutex> lock(slot_mutex_);
  slot_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  ++in_flight_;
}

void HttpSearchClient::release_slot() const {
  {
    std::lock_guard<std::mutex> lock(slot_mutex_);
    --in_flight_;
  }
  slot_cv_.notify_one();
}

void HttpSearchClient::wait_for_host_interval() const {
  if (config_.min_interval.count() <= 0) return;
  std::chrono::steady_clock::time_point wake;
  {
    std::lock_guard<std::mutex> lock(interval_mutex_);
    auto now = std::chrono::steady_clock::now();
    auto earliest = last_request_ + config_.min_interval;
    wake = earliest > now ? earliest : now;
    last_request_ = wake;
  }
  std::this_thread::sleep_until(wake);
}

std::vector<WebResult> HttpSearchClient::search(const std::string& query,
                                                std::size_t limit) const {
  acquire_slot();
  struct SlotGuard {
    const HttpSearchClient* client;
    ~SlotGuard() { client->release_slot(); }
  } guard{this};

  httplib::Params params{{"q", query}, {"num", std::to_string(limit)}};
  if (!api_key_.empty()) params.emplace("key", api_key_);

  std::string last_transport_error;
  for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
    wait_for_host_interval();
    httplib::Client http(host_, port_);
    http.set_connection_timeout(config_.timeout);
    http.set_read_timeout(config_.timeout);
    auto res = http.Get(path_, params, httplib::Headers{});
    if (!res) {
      last_transport_error = httplib::to_string(res.error());
      continue;  // transport failure: retry, GET is idempotent
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::status,
                         "search endpoint returned status " +
                             std::to_string(res->status));
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::payload,
                         std::string("bad search response: ") + e.what());
    }
    return parse_results(body, config_.endpoint);
  }
  throw BackendError(BackendError::Kind::transport,
                     "search transport failed after " +
                         std::to_string(config_.max_retries + 1) +
                         " attempts: " + last_transport_error,
                     /*retryable=*/true);
}

std::vector<ReferenceSentence> internet_search(const Query& query,
                                               const RetrievalConfig& cfg,
                                               const SearchClient& client) {
  std::vector<std::regex> patterns;
  patterns.reserve(cfg.annotation_patterns.size());
  for (const auto& pattern : cfg.annotation_patterns) {
    patterns.emplace_back(pattern);
  }

  std::vector<ReferenceSentence> results;
  for (const auto& raw : client.search(query.text, cfg.top_g)) {
    if (results.size() >= cfg.top_g) break;
    if (host_blocked(url_host(raw.link), cfg.blocked_domains)) continue;
    std::string text = raw.title;
    if (!text.empty() && !raw.snippet.empty()) text += ' ';
    text += raw.snippet;
    if (text.empty()) continue;
    bool leaked = false;
    for (const auto& pattern : patterns) {
      if (std::regex_search(text, pattern)) {
        leaked = true;
        break;
      }
    }
    if (leaked) continue;
    results.push_back({tokenize(text),
                       {SourceKind::internet, client.backend_name()},
                       query.text,
                       text});
  }
  return results;
}

std::vector<ReferenceSentence> InternetBackend::search(
    const Query& query, std::size_t top_k) const {
  RetrievalConfig cfg = cfg_;
  cfg.top_g = top_k;
  return internet_search(query, cfg, *client_);
}

}  // namespace globalner
