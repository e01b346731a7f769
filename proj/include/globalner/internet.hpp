#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "globalner/query.hpp"
#include "globalner/retrieval.hpp"
#include "globalner/types.hpp"

namespace globalner {

// One raw web search result before filtering.
struct WebResult {
  std::string title;
  std::string snippet;
  std::string link;
};

// Transport contract for the internet sub-system. Implementations return at
// most `limit` results, best first.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::vector<WebResult> search(const std::string& query,
                                        std::size_t limit) const = 0;
  virtual const std::string& backend_name() const = 0;
};

// Offline replay: a JSON file mapping query text to a response object of
// the same shape the HTTP client expects:
//   { "<query>": { "results": [ {"title":..,"snippet":..,"link":..}, .. ] } }
// Unknown queries yield no results.
class FixtureSearchClient : public SearchClient {
 public:
  explicit FixtureSearchClient(const std::string& path);

  std::vector<WebResult> search(const std::string& query,
                                std::size_t limit) const override;
  const std::string& backend_name() const override { return name_; }

 private:
  std::string name_ = "internet-fixture";
  std::map<std::string, std::vector<WebResult>> responses_;
};

struct HttpClientConfig {
  std::string endpoint;                      // http://host[:port]/path
  std::string api_key_env = "SEARCH_API_KEY";
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds min_interval{0};  // per-host spacing
  std::size_t max_retries = 2;                // transport failures only
  std::chrono::milliseconds timeout{10000};
};

// GET <endpoint>?q=<query>&num=<limit>[&key=<key>], expecting a JSON body
// { "results": [ {"title":..,"snippet":..,"link":..}, .. ] }.
// Transport failures are retried up to max_retries, then raised as
// retryable BackendError; non-2xx and malformed payloads raise immediately.
class HttpSearchClient : public SearchClient {
 public:
  explicit HttpSearchClient(HttpClientConfig config);
  ~HttpSearchClient() override;

  std::vector<WebResult> search(const std::string& query,
                                std::size_t limit) const override;
  const std::string& backend_name() const override { return name_; }

 private:
  void acquire_slot() const;
  void release_slot() const;
  void wait_for_host_interval() const;

  std::string name_ = "internet-http";
  HttpClientConfig config_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  std::string api_key_;

  mutable std::mutex slot_mutex_;
  mutable std::condition_variable slot_cv_;
  mutable std::size_t in_flight_ = 0;
  mutable std::mutex interval_mutex_;
  mutable std::chrono::steady_clock::time_point last_request_;
};

// Applies the paper-motivated result hygiene: drops blocked domains and
// annotation-leak matches, concatenates title + snippet into one reference
// sentence, and caps the survivors at cfg.top_g.
std::vector<ReferenceSentence> internet_search(const Query& query,
                                               const RetrievalConfig& cfg,
                                               const SearchClient& client);

class InternetBackend : public SearchBackend {
 public:
  InternetBackend(std::shared_ptr<const SearchClient> client,
                  RetrievalConfig cfg)
      : client_(std::move(client)), cfg_(std::move(cfg)) {}

  SourceTag source() const override {
    return {SourceKind::internet, client_->backend_name()};
  }
  std::vector<ReferenceSentence> search(const Query& query,
                                        std::size_t top_k) const override;

 private:
  std::shared_ptr<const SearchClient> client_;
  RetrievalConfig cfg_;
};

}  // namespace globalner
