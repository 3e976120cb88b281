#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pmiembed {

using Document = std::vector<std::string>;

// Lowercased, punctuation-free tokens grouped by document (one per input line).
struct TokenStream {
    std::vector<Document> documents;
    std::size_t token_count = 0;

    bool empty() const noexcept { return token_count == 0; }
};

// Lowercases, turns Unicode punctuation (P*) and symbols (S*) into separators
// and splits on whitespace. Lines without tokens produce no document.
// Throws DecodeError on malformed UTF-8.
TokenStream tokenize(std::string_view raw_text);

// Code-point-wise Unicode lowercasing. Throws DecodeError on malformed UTF-8.
std::string to_lower_utf8(std::string_view text);

// First `target_tokens` tokens in order, keeping document boundaries. The
// last document is cut short when needed. Shorter streams come back unchanged.
TokenStream truncate_corpus(const TokenStream& stream, std::size_t target_tokens);

// Already-tokenized text: one document per line, tokens separated by spaces.
std::string render_tokens(const TokenStream& stream);

}  // namespace pmiembed
