// Copyright 2026 The qksvm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Text preprocessing and bag-of-words vectorization.
 *
 * Cleaning steps run in a fixed order — markup strip, lowercase, punctuation
 * strip, whitespace tokenize, stopword removal — each individually
 * toggleable. The vocabulary is the lexicographically sorted set of tokens
 * across the corpus, and document rows are raw token counts, optionally
 * L2-normalized so each nonzero row has unit norm.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/matrix.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

/// A compact built-in English stopword list; shipped as data/stopwords_en.txt
/// and referenced by content hash in run reports.
inline const std::vector<std::string>& builtin_stopwords() {
    static const std::vector<std::string> words = {
        "a",     "an",   "and",  "are",  "as",    "at",   "be",    "but",  "by",
        "for",   "from", "had",  "has",  "have",  "he",   "her",   "his",  "i",
        "if",    "in",   "is",   "it",   "its",   "me",   "my",    "no",   "not",
        "of",    "on",   "or",   "she",  "so",    "that", "the",   "their", "them",
        "then",  "there", "they", "this", "to",   "was",  "we",    "were", "what",
        "when",  "which", "who",  "will", "with",  "you",  "your"};
    return words;
}

struct CleanOptions {
    bool lowercase = true;
    bool strip_markup = true;
    bool strip_punctuation = true;
    bool remove_stopwords = true;
    std::set<std::string> stopword_list;

    static CleanOptions defaults() {
        CleanOptions options;
        options.stopword_list.insert(builtin_stopwords().begin(), builtin_stopwords().end());
        return options;
    }
};

struct Vocabulary {
    std::vector<std::string> tokens;          // lexicographic order
    std::map<std::string, std::size_t> index;  // token -> column

    std::size_t size() const { return tokens.size(); }
};

namespace detail {

inline bool is_ascii_alnum(unsigned char c) {
    return std::isalnum(c) != 0;
}

/// Removes <...> spans; an unterminated '<' drops the remainder of the text.
inline std::string strip_markup_tags(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_tag = false;
    for (const char c : text) {
        if (c == '<') {
            in_tag = true;
            out.push_back(' ');  // keep words on both sides separated
        } else if (c == '>') {
            in_tag = false;
        } else if (!in_tag) {
            out.push_back(c);
        }
    }
    return out;
}

inline std::string to_lower_ascii(const std::string& text) {
    std::string out = text;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

/// Replaces every non-alphanumeric byte with a space so punctuation acts as
/// a token boundary rather than fusing its neighbors.
inline std::string strip_punctuation_chars(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (!is_ascii_alnum(static_cast<unsigned char>(c))) {
            c = ' ';
        }
    }
    return out;
}

inline std::vector<std::string> whitespace_tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t start = std::string::npos;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const bool boundary =
            i == text.size() || std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (boundary) {
            if (start != std::string::npos) {
                tokens.push_back(text.substr(start, i - start));
                start = std::string::npos;
            }
        } else if (start == std::string::npos) {
            start = i;
        }
    }
    return tokens;
}

}  // namespace detail

/// Cleans one document into its token sequence. A document that cleans to
/// nothing is retained as an empty sequence.
inline std::vector<std::string> preprocess_document(const std::string& text,
                                                    const CleanOptions& options) {
    std::string work = text;
    if (options.strip_markup) {
        work = detail::strip_markup_tags(work);
    }
    if (options.lowercase) {
        work = detail::to_lower_ascii(work);
    }
    if (options.strip_punctuation) {
        work = detail::strip_punctuation_chars(work);
    }
    std::vector<std::string> tokens = detail::whitespace_tokenize(work);
    if (options.remove_stopwords) {
        if (options.stopword_list.empty()) {
            throw std::invalid_argument(
                "preprocess_document: stopword removal enabled with an empty stopword list");
        }
        std::erase_if(tokens, [&options](const std::string& token) {
            return options.stopword_list.count(token) > 0;
        });
    }
    return tokens;
}

inline std::vector<std::vector<std::string>> preprocess_corpus(
    const std::vector<std::string>& docs, const CleanOptions& options) {
    if (docs.empty()) {
        throw std::invalid_argument("preprocess_corpus: empty corpus");
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        out.push_back(preprocess_document(doc, options));
    }
    return out;
}

/// Builds the sorted vocabulary and the raw count matrix.
inline std::pair<Vocabulary, RealMatrix> vectorize(
    const std::vector<std::vector<std::string>>& corpus) {
    if (corpus.empty()) {
        throw std::invalid_argument("vectorize: empty corpus");
    }
    std::set<std::string> distinct;
    for (const auto& doc : corpus) {
        distinct.insert(doc.begin(), doc.end());
    }
    Vocabulary vocab;
    vocab.tokens.assign(distinct.begin(), distinct.end());  // std::set is sorted
    for (std::size_t j = 0; j < vocab.tokens.size(); ++j) {
        vocab.index[vocab.tokens[j]] = j;
    }
    RealMatrix counts(corpus.size(), vocab.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& token : corpus[i]) {
            counts(i, vocab.index.at(token)) += 1.0;
        }
    }
    return {std::move(vocab), std::move(counts)};
}

/// Divides each nonzero row by its L2 norm; zero rows pass through.
inline RealMatrix l2_normalize(const RealMatrix& m) {
    RealMatrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < out.cols(); ++j) {
            norm_sq += out(i, j) * out(i, j);
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (std::size_t j = 0; j < out.cols(); ++j) {
                out(i, j) *= inv;
            }
        }
    }
    return out;
}

/// FNV-1a hash of a stopword list in its stored order, for report provenance.
inline std::uint64_t stopword_list_hash(const std::set<std::string>& words) {
    std::string joined;
    for (const auto& w : words) {
        joined += w;
        joined += '\n';
    }
    return fnv1a(joined);
}

}  // namespace qksvm
