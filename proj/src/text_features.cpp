#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>

#include <fmt/format.h>

#include "mln/content.hpp"
#include "mln/error.hpp"
#include "mln/ingest.hpp"

namespace mln {

std::array<std::optional<bool>, 5> threshold_traits(const TraitScores& s, const TraitThresholds& t) {
  std::array<std::optional<bool>, 5> out;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (s.scores[i]) out[i] = *s.scores[i] >= t.means[i];
  return out;
}

std::vector<PartitionLayer> build_trait_layers(std::span<const TraitScores> scores,
                                               NodeId node_count, const TraitThresholds& t) {
  std::vector<PartitionLayer> layers(kTraitNames.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].name = layers[i].feature = std::string(kTraitNames[i]);
    layers[i].node_count = node_count;
  }
  for (const auto& s : scores) {
    if (s.user >= node_count)
      throw Error(Errc::out_of_range, fmt::format("trait scores for unknown node {}", s.user));
    const auto labels = threshold_traits(s, t);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i]) layers[i].groups[*labels[i] ? "Yes" : "No"].push_back(s.user);
  }
  for (auto& l : layers) {
    l.normalize();
    l.validate();
  }
  return layers;
}

std::set<std::string> load_word_list(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    std::string word(w);
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(std::move(word));
  }
  return words;
}

namespace {

bool is_token_byte(unsigned char c) { return std::isalnum(c) || c == '\'' || c >= 0x80; }

// Replaces U+2019 with an ASCII apostrophe and lowercases ASCII letters.
std::string normalize(std::string_view doc) {
  std::string out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (doc.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(doc[i]))));
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view doc) {
  const std::string text = normalize(doc);
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    const auto first = cur.find_first_not_of('\'');
    if (first != std::string::npos) {
      const auto last = cur.find_last_not_of('\'');
      tokens.push_back(cur.substr(first, last - first + 1));
    }
    cur.clear();
  };
  for (unsigned char c : text) {
    if (is_token_byte(c))
      cur.push_back(static_cast<char>(c));
    else
      flush();
  }
  flush();
  return tokens;
}

PolarityFeatures polarity_features(std::string_view doc, const Lexicons& lex) {
  PolarityFeatures f;
  const bool suffix_rule = lex.negations.count("n't") > 0;
  for (const auto& tok : tokenize(doc)) {
    if (lex.positive.count(tok)) ++f.positive;
    if (lex.negative.count(tok)) ++f.negative;
    if (lex.negations.count(tok) ||
        (suffix_rule && tok.size() > 3 && tok.compare(tok.size() - 3, 3, "n't") == 0))
      f.negation = true;
  }
  return f;
}

std::vector<std::string> extract_ngrams(std::string_view doc, NgramLevel level, unsigned n) {
  std::vector<std::string> out;
  if (n == 0) return out;
  if (level == NgramLevel::word) {
    const auto tokens = tokenize(doc);
    if (tokens.size() < n) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t j = 1; j < n; ++j) {
        gram.push_back(' ');
        gram += tokens[i + j];
      }
      out.push_back(std::move(gram));
    }
    return out;
  }
  std::string text;
  for (char c : normalize(doc)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!text.empty() && text.back() != ' ') text.push_back(' ');
    } else {
      text.push_back(c);
    }
  }
  if (!text.empty() && text.back() == ' ') text.pop_back();
  for (std::size_t i = 0; i + n <= text.size(); ++i) out.push_back(text.substr(i, n));
  return out;
}

std::optional<std::size_t> NgramVocabulary::column(const std::string& text) const {
  auto it = index_.find(text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void NgramVocabulary::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i].text, i);
}

NgramVocabulary fit_ngram_vocab(std::span<const std::string> corpus, NgramLevel level,
                                unsigned n_min, unsigned n_max, std::size_t top_k) {
  if (corpus.empty()) throw Error(Errc::fit, "cannot fit an n-gram vocabulary on an empty corpus");
  if (n_min == 0 || n_min > n_max)
    throw Error(Errc::parameter, fmt::format("bad n-gram range {}..{}", n_min, n_max));

  NgramVocabulary vocab;
  vocab.level = level;
  vocab.n_min = n_min;
  vocab.n_max = n_max;
  vocab.top_k = top_k;
  const double docs = static_cast<double>(corpus.size());

  for (unsigned n = n_min; n <= n_max; ++n) {
    struct Stats {
      std::size_t df = 0;
      std::size_t tf = 0;
      std::size_t last_doc = static_cast<std::size_t>(-1);
    };
    std::unordered_map<std::string, Stats> stats;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      for (auto& g : extract_ngrams(corpus[d], level, n)) {
        Stats& s = stats[std::move(g)];
        ++s.tf;
        if (s.last_doc != d) {
          s.last_doc = d;
          ++s.df;
        }
      }
    }
    std::vector<NgramTerm> ranked;
    ranked.reserve(stats.size());
    for (auto& [text, s] : stats) {
      const double idf = std::log(docs / static_cast<double>(s.df));
      ranked.push_back({text, n, idf, idf * static_cast<double>(s.tf)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const NgramTerm& a, const NgramTerm& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.text < b.text;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    vocab.terms.insert(vocab.terms.end(), std::make_move_iterator(ranked.begin()),
                       std::make_move_iterator(ranked.end()));
  }
  vocab.rebuild_index();
  return vocab;
}

namespace {

void fill_block(Eigen::Ref<Eigen::VectorXd> block, std::string_view doc,
                const NgramVocabulary& vocab) {
  for (unsigned n = vocab.n_min; n <= vocab.n_max; ++n)
    for (const auto& g : extract_ngrams(doc, vocab.level, n))
      if (auto col = vocab.column(g)) block[static_cast<Eigen::Index>(*col)] += 1.0;
  for (std::size_t i = 0; i < vocab.terms.size(); ++i)
    block[static_cast<Eigen::Index>(i)] *= vocab.terms[i].idf;
}

}  // namespace

Eigen::VectorXd vectorize(std::string_view doc, const FeaturePipeline& pipeline,
                          std::span<const double> extra) {
  if (extra.size() != pipeline.extra_width)
    throw Error(Errc::shape, fmt::format("expected {} extra features, got {}",
                                         pipeline.extra_width, extra.size()));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pipeline.dimension()));
  const auto pol = polarity_features(doc, pipeline.lexicons);
  v[0] = static_cast<double>(pol.positive);
  v[1] = static_cast<double>(pol.negative);
  v[2] = pol.negation ? 1.0 : 0.0;

  Eigen::Index offset = FeaturePipeline::kPolarityWidth;
  const auto words = static_cast<Eigen::Index>(pipeline.words.size());
  const auto chars = static_cast<Eigen::Index>(pipeline.chars.size());
  fill_block(v.segment(offset, words), doc, pipeline.words);
  offset += words;
  fill_block(v.segment(offset, chars), doc, pipeline.chars);
  offset += chars;
  for (std::size_t i = 0; i < extra.size(); ++i) v[offset + static_cast<Eigen::Index>(i)] = extra[i];
  return v;
}

}  // namespace mln
