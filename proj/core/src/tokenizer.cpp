#include "pmiembed/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "pmiembed/error.hpp"

namespace pmiembed {
namespace {

bool is_separator(UChar32 c) {
    if (u_isUWhiteSpace(c) || u_iscntrl(c)) {
        return true;
    }
    switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
        return true;
    default:
        return false;
    }
}

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
    (void)error;
    out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

TokenStream tokenize(std::string_view raw_text) {
    TokenStream stream;
    Document doc;
    std::string token;

    auto end_token = [&] {
        if (!token.empty()) {
            doc.push_back(std::move(token));
            token.clear();
        }
    };
    auto end_document = [&] {
        end_token();
        if (!doc.empty()) {
            stream.token_count += doc.size();
            stream.documents.push_back(std::move(doc));
            doc.clear();
        }
    };

    const auto* bytes = reinterpret_cast<const uint8_t*>(raw_text.data());
    const auto length = static_cast<int32_t>(raw_text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) {
            throw DecodeError(static_cast<std::size_t>(start));
        }
        if (c == '\n') {
            end_document();
        } else if (is_separator(c)) {
            end_token();
        } else {
            append_utf8(token, u_tolower(c));
        }
    }
    end_document();
    return stream;
}

std::string to_lower_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) {
            throw DecodeError(static_cast<std::size_t>(start));
        }
        append_utf8(out, u_tolower(c));
    }
    return out;
}

TokenStream truncate_corpus(const TokenStream& stream, std::size_t target_tokens) {
    if (stream.token_count <= target_tokens) {
        return stream;
    }
    TokenStream out;
    for (const auto& doc : stream.documents) {
        const std::size_t room = target_tokens - out.token_count;
        if (room == 0) {
            break;
        }
        if (doc.size() <= room) {
            out.documents.push_back(doc);
            out.token_count += doc.size();
        } else {
            out.documents.emplace_back(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(room));
            out.token_count += room;
        }
    }
    return out;
}

std::string render_tokens(const TokenStream& stream) {
    std::string out;
    for (const auto& doc : stream.documents) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (i > 0) {
                out.push_back(' ');
            }
            out.append(doc[i]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace pmiembed
