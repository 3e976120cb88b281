#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pmiembed/trainer.hpp"

namespace pmiembed {

// Words aligned with the rows of an n x d matrix of finite values.
class VectorTable {
public:
    VectorTable() = default;

    // Throws ConfigError on duplicate words, misaligned rows or non-finite entries.
    VectorTable(std::vector<std::string> words, Matrix vectors);

    std::size_t size() const noexcept { return words_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const Matrix& vectors() const noexcept { return vectors_; }

    std::optional<std::size_t> find(std::string_view word) const;

    friend bool operator==(const VectorTable& a, const VectorTable& b) {
        return a.words_ == b.words_ && a.vectors_.rows() == b.vectors_.rows() &&
               a.vectors_.cols() == b.vectors_.cols() && a.vectors_ == b.vectors_;
    }

private:
    std::vector<std::string> words_;
    Matrix vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

VectorTable make_table(const EmbeddingModel& model, CombineMode mode);

// "n d" header, then `word v1 ... vd` with 17 significant digits per value.
std::string render_text(const VectorTable& table);
VectorTable parse_text(std::string_view text);
void save_text(const VectorTable& table, const std::filesystem::path& path);
VectorTable load_text(const std::filesystem::path& path);

inline constexpr std::uint32_t kModelFormatVersion = 1;

// "PMEM", version, n, d, W and C row-major as f64, then the vocabulary as a
// u32 word count followed by (u32 byte length, UTF-8 bytes, u64 count) per
// word. All little-endian. Loaded vocabularies carry shard size 1.
std::string render_binary(const EmbeddingModel& model);
EmbeddingModel parse_binary(std::string_view bytes);
void save_binary(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_binary(const std::filesystem::path& path);

// Binary model if the file starts with the model magic, text table otherwise.
VectorTable load_table(const std::filesystem::path& path, CombineMode mode);

}  // namespace pmiembed
