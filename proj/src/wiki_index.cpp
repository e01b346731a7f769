#include "globalner/wiki_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "globalner/errors.hpp"
#include "globalner/text.hpp"

namespace globalner {

namespace {

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

// Unique terms in first-appearance order; keeps scoring deterministic.
std::vector<std::string> unique_terms(const std::string& text) {
  std::vector<std::string> unique;
  for (auto& term : index_terms(text)) {
    if (std::find(unique.begin(), unique.end(), term) == unique.end()) {
      unique.push_back(std::move(term));
    }
  }
  return unique;
}

}  // namespace

WikiIndex WikiIndex::build(
    const std::vector<std::pair<std::string, std::string>>& paragraphs) {
  if (paragraphs.empty()) throw DataError("wiki corpus is empty");
  WikiIndex index;
  std::size_t total_len = 0;
  for (const auto& [id, text] : paragraphs) {
    std::size_t doc = index.docs_.size();
    auto terms = index_terms(text);
    index.docs_.push_back({id, text, terms.size()});
    total_len += terms.size();
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& term : terms) ++counts[term];
    for (const auto& [term, tf] : counts) {
      index.postings_[term].push_back({doc, tf});
    }
  }
  for (auto& [term, postings] : index.postings_) {
    std::sort(postings.begin(), postings.end(),
              [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
  }
  index.avg_len_ =
      static_cast<double>(total_len) / static_cast<double>(index.docs_.size());
  return index;
}

WikiIndex WikiIndex::build_from_jsonl(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> paragraphs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("wiki corpus line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    if (!record.contains("id") || !record.contains("text")) {
      throw DataError("wiki corpus line " + std::to_string(line_no) +
                      ": record needs \"id\" and \"text\"");
    }
    std::string id = record["id"].is_string()
                         ? record["id"].get<std::string>()
                         : record["id"].dump();
    paragraphs.emplace_back(std::move(id), record["text"].get<std::string>());
  }
  return build(paragraphs);
}

WikiIndex WikiIndex::build_from_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open wiki corpus: " + path);
  return build_from_jsonl(in);
}

void WikiIndex::save(std::ostream& out) const {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& doc : docs_) {
    docs.push_back({{"id", doc.id}, {"text", doc.text}});
  }
  out << nlohmann::json{{"format", "globalner-wiki"}, {"version", 1},
                        {"docs", docs}}
             .dump()
      << '\n';
}

void WikiIndex::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write wiki index: " + path);
  save(out);
}

WikiIndex WikiIndex::load(std::istream& in) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad wiki index file: ") + e.what());
  }
  if (parsed.value("format", "") != "globalner-wiki") {
    throw DataError("not a wiki index file");
  }
  std::vector<std::pair<std::string, std::string>> paragraphs;
  for (const auto& doc : parsed.at("docs")) {
    paragraphs.emplace_back(doc.at("id").get<std::string>(),
                            doc.at("text").get<std::string>());
  }
  return build(paragraphs);
}

WikiIndex WikiIndex::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open wiki index: " + path);
  return load(in);
}

std::size_t WikiIndex::doc_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

const std::vector<WikiIndex::Posting>* WikiIndex::postings(
    const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<WikiIndex::Hit> WikiIndex::search_bm25(
    const std::string& query_text, std::size_t top_k) const {
  const double n_docs = static_cast<double>(docs_.size());
  std::unordered_map<std::size_t, double> scores;
  for (const auto& term : unique_terms(query_text)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    double df = static_cast<double>(it->second.size());
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const auto& posting : it->second) {
      double tf = static_cast<double>(posting.tf);
      double norm_len =
          static_cast<double>(docs_[posting.doc].length) / avg_len_;
      double weight = tf * (kBm25K1 + 1.0) /
                      (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * norm_len));
      scores[posting.doc] += idf * weight;
    }
  }
  std::vector<Hit> hits;
  hits.reserve(scores.size());
  for (const auto& [doc, score] : scores) {
    if (score > 0.0) hits.push_back({doc, score});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
  if (hits.size() > top_k) hits.resize(top_k);
  return hits;
}

std::vector<ReferenceSentence> search_wiki(const WikiIndex& index,
                                           const Query& query,
                                           std::size_t top_w) {
  std::vector<ReferenceSentence> results;
  for (const auto& hit : index.search_bm25(query.text, top_w)) {
    const auto& doc = index.docs()[hit.doc];
    results.push_back({tokenize(doc.text),
                       {SourceKind::wikipedia, "wiki-bm25"},
                       query.text,
                       doc.text});
  }
  return results;
}

std::vector<ReferenceSentence> WikiBackend::search(const Query& query,
                                                   std::size_t top_k) const {
  return search_wiki(*index_, query, top_k);
}

}  // namespace globalner
