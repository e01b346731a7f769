#include "globalner/conll.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "globalner/errors.hpp"

namespace globalner {

std::vector<ConllSentence> read_conll(std::istream& in) {
  std::vector<ConllSentence> sentences;
  ConllSentence current;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!current.tokens.empty()) {
      sentences.push_back(std::move(current));
      current = {};
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw DataError("malformed CoNLL line " + std::to_string(line_no) +
                      ": '" + line + "'");
    }
    std::string token = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    try {
      current.labels.push_back(parse_bio_label(label));
    } catch (const DataError&) {
      throw DataError("malformed CoNLL line " + std::to_string(line_no) +
                      ": bad label '" + label + "'");
    }
    current.tokens.push_back(std::move(token));
  }
  flush();
  return sentences;
}

std::vector<ConllSentence> read_conll_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CoNLL file: " + path);
  return read_conll(in);
}

void write_conll(std::ostream& out,
                 const std::vector<ConllSentence>& sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) out << '\n';
    const auto& sentence = sentences[s];
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      out << sentence.tokens[i] << '\t'
          << format_bio_label(sentence.labels[i]) << '\n';
    }
  }
}

void write_conll_file(const std::string& path,
                      const std::vector<ConllSentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CoNLL file: " + path);
  write_conll(out, sentences);
}

void convert_dataset(const std::string& input_path,
                     const std::string& output_path) {
  auto sentences = read_conll_file(input_path);
  for (auto& sentence : sentences) {
    sentence.labels = strip_types(std::move(sentence.labels));
  }
  write_conll_file(output_path, sentences);
}

LocalSentence to_local_sentence(const ConllSentence& sentence,
                                bool with_gold_mentions) {
  LocalSentence local;
  std::size_t offset = 0;
  for (const auto& text : sentence.tokens) {
    if (!local.tokens.empty()) ++offset;  // joining space
    local.tokens.push_back({text, offset, offset + text.size()});
    offset += text.size();
  }
  if (with_gold_mentions) {
    for (const auto& entity : bio_decode(sentence.labels)) {
      local.mentions.push_back(entity.span);
    }
  }
  return local;
}

}  // namespace globalner
