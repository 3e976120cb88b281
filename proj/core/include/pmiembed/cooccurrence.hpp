#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmiembed/tokenizer.hpp"
#include "pmiembed/vocabulary.hpp"

namespace pmiembed {

enum class Weighting { uniform, harmonic };

Weighting parse_weighting(std::string_view name);
std::string_view to_string(Weighting w);

// One stored cell of the co-occurrence matrix. Zero cells are never stored.
struct CooccurrenceEntry {
    WordId row = 0;
    WordId col = 0;
    double value = 0.0;

    friend bool operator==(const CooccurrenceEntry&, const CooccurrenceEntry&) = default;
};

// Sparse n x n co-occurrence counts with marginals. Entries are kept sorted
// by (row, col).
class CooccurrenceMatrix {
public:
    CooccurrenceMatrix() = default;

    // Sorts the entries and derives marginals. Throws ConfigError on
    // out-of-range ids, duplicate cells, non-positive or non-finite values, or
    // n not divisible by shard_size.
    static CooccurrenceMatrix from_entries(std::size_t n, std::size_t shard_size,
                                           std::vector<CooccurrenceEntry> entries);

    std::size_t n() const noexcept { return n_; }
    std::size_t shard_size() const noexcept { return shard_size_; }
    std::span<const CooccurrenceEntry> entries() const noexcept { return entries_; }
    std::span<const double> row_sums() const noexcept { return row_sums_; }
    std::span<const double> col_sums() const noexcept { return col_sums_; }
    double total() const noexcept { return total_; }

    // x_ij, or 0 when the cell is not stored.
    double value(WordId row, WordId col) const;

    bool is_symmetric() const;

    friend bool operator==(const CooccurrenceMatrix&, const CooccurrenceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::size_t shard_size_ = 1;
    std::vector<CooccurrenceEntry> entries_;
    std::vector<double> row_sums_;
    std::vector<double> col_sums_;
    double total_ = 0.0;

    friend CooccurrenceMatrix parse_cooccurrences(std::string_view bytes);
};

// Symmetric-window counting. Each in-vocabulary pair at distance k <= window
// inside one document adds 1 (uniform) or 1/k (harmonic) to both (a, b) and
// (b, a). Out-of-vocabulary tokens keep their positions. Documents are split
// into fixed chunks counted by up to `workers` threads; the result does not
// depend on the worker count.
CooccurrenceMatrix count_cooccurrences(const TokenStream& stream, const Vocabulary& vocab,
                                       std::size_t window, Weighting weighting,
                                       std::size_t workers = 1);

inline constexpr std::uint32_t kCooccurrenceFormatVersion = 1;

std::string render_cooccurrences(const CooccurrenceMatrix& cooc);
CooccurrenceMatrix parse_cooccurrences(std::string_view bytes);
void save_cooccurrences(const CooccurrenceMatrix& cooc, const std::filesystem::path& path);
CooccurrenceMatrix load_cooccurrences(const std::filesystem::path& path);

}  // namespace pmiembed
