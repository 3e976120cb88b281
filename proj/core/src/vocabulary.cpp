#include "pmiembed/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "pmiembed/error.hpp"
#include "pmiembed/io.hpp"

namespace pmiembed {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
                       std::size_t shard_size)
    : words_(std::move(words)), counts_(std::move(counts)), shard_size_(shard_size) {
    if (shard_size_ == 0) {
        throw ConfigError("shard size must be at least 1");
    }
    if (words_.size() != counts_.size()) {
        throw ConfigError("vocabulary has " + std::to_string(words_.size()) + " words but " +
                          std::to_string(counts_.size()) + " counts");
    }
    if (words_.size() % shard_size_ != 0) {
        throw ConfigError("vocabulary size " + std::to_string(words_.size()) +
                          " is not a multiple of shard size " + std::to_string(shard_size_));
    }
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (counts_[i] == 0) {
            throw ConfigError("word '" + words_[i] + "' has count 0");
        }
        if (i > 0 && counts_[i] > counts_[i - 1]) {
            throw ConfigError("vocabulary counts are not frequency-ranked at id " +
                              std::to_string(i));
        }
        if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
            throw ConfigError("duplicate vocabulary word '" + words_[i] + "'");
        }
    }
}

std::optional<WordId> Vocabulary::id(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Vocabulary build_vocabulary(const TokenStream& stream, std::size_t max_size,
                            std::size_t shard_size, std::size_t min_count) {
    if (shard_size < 1) {
        throw ConfigError("shard size must be at least 1");
    }
    if (max_size < shard_size) {
        throw ConfigError("max vocabulary size " + std::to_string(max_size) +
                          " is smaller than shard size " + std::to_string(shard_size));
    }
    if (min_count < 1) {
        throw ConfigError("min count must be at least 1");
    }

    struct TypeStats {
        std::uint64_t count = 0;
        std::size_t first_seen = 0;
    };
    std::unordered_map<std::string_view, TypeStats> stats;
    std::vector<std::string_view> order;
    for (const auto& doc : stream.documents) {
        for (const auto& token : doc) {
            auto [it, inserted] = stats.try_emplace(token);
            if (inserted) {
                it->second.first_seen = order.size();
                order.push_back(token);
            }
            ++it->second.count;
        }
    }

    std::vector<std::string_view> qualifying;
    for (auto word : order) {
        if (stats[word].count >= min_count) {
            qualifying.push_back(word);
        }
    }
    std::stable_sort(qualifying.begin(), qualifying.end(), [&](auto a, auto b) {
        return stats[a].count > stats[b].count;
    });

    const std::size_t kept = std::min(max_size, qualifying.size()) / shard_size * shard_size;
    if (kept == 0) {
        throw EmptyVocabularyError(
            "no vocabulary: " + std::to_string(qualifying.size()) + " word types reach min count " +
            std::to_string(min_count) + ", fewer than one shard of " + std::to_string(shard_size));
    }

    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    words.reserve(kept);
    counts.reserve(kept);
    for (std::size_t i = 0; i < kept; ++i) {
        words.emplace_back(qualifying[i]);
        counts.push_back(stats[qualifying[i]].count);
    }
    return Vocabulary(std::move(words), std::move(counts), shard_size);
}

std::string render_vocabulary(const Vocabulary& vocab) {
    std::string out;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out += vocab.words()[i];
        out += '\t';
        out += std::to_string(vocab.counts()[i]);
        out += '\n';
    }
    return out;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    io::write_file_atomic(path, render_vocabulary(vocab));
}

Vocabulary parse_vocabulary(std::string_view text, std::size_t shard_size) {
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0) {
            throw ParseError(line_no, "expected word<TAB>count");
        }
        auto count_text = line.substr(tab + 1);
        std::uint64_t count = 0;
        auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
        if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
            throw ParseError(line_no, "bad count '" + std::string(count_text) + "'");
        }
        words.emplace_back(line.substr(0, tab));
        counts.push_back(count);
    }
    return Vocabulary(std::move(words), std::move(counts), shard_size);
}

Vocabulary load_vocabulary(const std::filesystem::path& path, std::size_t shard_size) {
    return parse_vocabulary(io::read_file(path), shard_size);
}

}  // namespace pmiembed
