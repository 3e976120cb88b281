#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmiembed/tokenizer.hpp"

namespace pmiembed {

using WordId = std::uint32_t;

inline constexpr std::size_t kDefaultShardSize = 4096;

// Frequency-ranked word list. Ids are dense and the size is always a
// multiple of the shard size.
class Vocabulary {
public:
    Vocabulary() = default;

    // Throws ConfigError if words repeat, counts increase, a count is zero or
    // the size is not a multiple of shard_size.
    Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
               std::size_t shard_size);

    std::size_t size() const noexcept { return words_.size(); }
    std::size_t shard_size() const noexcept { return shard_size_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    const std::string& word(WordId id) const { return words_.at(id); }

    std::optional<WordId> id(std::string_view word) const;

    // Compares words and counts; the shard size is a training-time setting.
    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.words_ == b.words_ && a.counts_ == b.counts_;
    }

private:
    std::vector<std::string> words_;
    std::vector<std::uint64_t> counts_;
    std::size_t shard_size_ = 1;
    struct TransparentHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, WordId, TransparentHash, std::equal_to<>> index_;
};

// Ranks by descending frequency, breaking ties by first occurrence, and keeps
// the largest multiple of shard_size not exceeding min(max_size, #types with
// count >= min_count). Throws EmptyVocabularyError if that is zero.
Vocabulary build_vocabulary(const TokenStream& stream, std::size_t max_size,
                            std::size_t shard_size, std::size_t min_count);

// `word<TAB>count` per line; line index is the id.
std::string render_vocabulary(const Vocabulary& vocab);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary parse_vocabulary(std::string_view text, std::size_t shard_size);
Vocabulary load_vocabulary(const std::filesystem::path& path, std::size_t shard_size);

}  // namespace pmiembed
