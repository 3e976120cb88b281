#include "pmiembed/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "pmiembed/error.hpp"
#include "pmiembed/io.hpp"

namespace pmiembed {
namespace {

constexpr std::string_view kMagic = "PMCO";
constexpr std::size_t kChunkTokens = 1 << 16;

std::uint64_t cell_key(WordId row, WordId col) {
    return (static_cast<std::uint64_t>(row) << 32) | col;
}

struct Chunk {
    std::size_t first_doc = 0;
    std::size_t last_doc = 0;  // exclusive
};

// Chunk boundaries depend only on the stream, never on the worker count.
std::vector<Chunk> split_into_chunks(const TokenStream& stream) {
    std::vector<Chunk> chunks;
    Chunk current;
    std::size_t tokens = 0;
    for (std::size_t d = 0; d < stream.documents.size(); ++d) {
        tokens += stream.documents[d].size();
        current.last_doc = d + 1;
        if (tokens >= kChunkTokens) {
            chunks.push_back(current);
            current.first_doc = d + 1;
            tokens = 0;
        }
    }
    if (current.last_doc > current.first_doc) {
        chunks.push_back(current);
    }
    return chunks;
}

template <typename Acc>
using CellMap = std::unordered_map<std::uint64_t, Acc>;

template <typename Acc, typename WeightFn>
CellMap<Acc> count_chunk(const TokenStream& stream, const Vocabulary& vocab, Chunk chunk,
                         std::size_t window, WeightFn weight) {
    CellMap<Acc> cells;
    std::vector<std::int64_t> ids;
    for (std::size_t d = chunk.first_doc; d < chunk.last_doc; ++d) {
        const auto& doc = stream.documents[d];
        ids.resize(doc.size());
        for (std::size_t t = 0; t < doc.size(); ++t) {
            auto id = vocab.id(doc[t]);
            ids[t] = id ? static_cast<std::int64_t>(*id) : -1;
        }
        for (std::size_t t = 0; t < ids.size(); ++t) {
            if (ids[t] < 0) {
                continue;
            }
            const auto focus = static_cast<WordId>(ids[t]);
            const std::size_t reach = std::min(window, ids.size() - 1 - t);
            for (std::size_t k = 1; k <= reach; ++k) {
                if (ids[t + k] < 0) {
                    continue;
                }
                const auto context = static_cast<WordId>(ids[t + k]);
                const Acc w = weight(k);
                cells[cell_key(focus, context)] += w;
                cells[cell_key(context, focus)] += w;
            }
        }
    }
    return cells;
}

template <typename Acc, typename WeightFn>
std::vector<CooccurrenceEntry> count_all(const TokenStream& stream, const Vocabulary& vocab,
                                         std::size_t window, std::size_t workers,
                                         WeightFn weight) {
    const auto chunks = split_into_chunks(stream);
    std::vector<CellMap<Acc>> partial(chunks.size());
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, chunks.size()));
    auto run = [&](std::size_t worker) {
        for (std::size_t c = worker; c < chunks.size(); c += threads) {
            partial[c] = count_chunk<Acc>(stream, vocab, chunks[c], window, weight);
        }
    };
    if (threads == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back(run, w);
        }
    }

    // Merge in chunk order so floating-point sums are reproducible.
    CellMap<Acc> merged;
    for (auto& part : partial) {
        if (merged.empty()) {
            merged = std::move(part);
            continue;
        }
        for (const auto& [key, acc] : part) {
            merged[key] += acc;
        }
        part = {};
    }

    std::vector<CooccurrenceEntry> entries;
    entries.reserve(merged.size());
    for (const auto& [key, acc] : merged) {
        entries.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xffffffffu),
                           static_cast<double>(acc)});
    }
    return entries;
}

}  // namespace

Weighting parse_weighting(std::string_view name) {
    if (name == "uniform") {
        return Weighting::uniform;
    }
    if (name == "harmonic") {
        return Weighting::harmonic;
    }
    throw ConfigError("unknown weighting '" + std::string(name) + "' (expected uniform|harmonic)");
}

std::string_view to_string(Weighting w) {
    return w == Weighting::uniform ? "uniform" : "harmonic";
}

CooccurrenceMatrix CooccurrenceMatrix::from_entries(std::size_t n, std::size_t shard_size,
                                                    std::vector<CooccurrenceEntry> entries) {
    if (shard_size == 0 || n % shard_size != 0) {
        throw ConfigError("matrix side " + std::to_string(n) + " is not a multiple of shard size " +
                          std::to_string(shard_size));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return cell_key(a.row, a.col) < cell_key(b.row, b.col);
    });
    CooccurrenceMatrix m;
    m.n_ = n;
    m.shard_size_ = shard_size;
    m.row_sums_.assign(n, 0.0);
    m.col_sums_.assign(n, 0.0);
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& cell = entries[e];
        if (cell.row >= n || cell.col >= n) {
            throw ConfigError("co-occurrence cell (" + std::to_string(cell.row) + ", " +
                              std::to_string(cell.col) + ") outside a " + std::to_string(n) +
                              "-word matrix");
        }
        if (!(cell.value > 0.0) || !std::isfinite(cell.value)) {
            throw ConfigError("co-occurrence cell (" + std::to_string(cell.row) + ", " +
                              std::to_string(cell.col) + ") has non-positive or non-finite value");
        }
        if (e > 0 && entries[e - 1].row == cell.row && entries[e - 1].col == cell.col) {
            throw ConfigError("duplicate co-occurrence cell (" + std::to_string(cell.row) + ", " +
                              std::to_string(cell.col) + ")");
        }
        m.row_sums_[cell.row] += cell.value;
        m.col_sums_[cell.col] += cell.value;
    }
    for (double s : m.row_sums_) {
        m.total_ += s;
    }
    m.entries_ = std::move(entries);
    return m;
}

double CooccurrenceMatrix::value(WordId row, WordId col) const {
    auto key = cell_key(row, col);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](const auto& e, auto k) {
        return cell_key(e.row, e.col) < k;
    });
    if (it != entries_.end() && it->row == row && it->col == col) {
        return it->value;
    }
    return 0.0;
}

bool CooccurrenceMatrix::is_symmetric() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return value(e.col, e.row) == e.value; });
}

CooccurrenceMatrix count_cooccurrences(const TokenStream& stream, const Vocabulary& vocab,
                                       std::size_t window, Weighting weighting,
                                       std::size_t workers) {
    if (window < 1) {
        throw ConfigError("window must be at least 1");
    }
    if (vocab.size() == 0) {
        throw ConfigError("cannot count co-occurrences with an empty vocabulary");
    }
    std::vector<CooccurrenceEntry> entries;
    if (weighting == Weighting::uniform) {
        entries = count_all<std::uint64_t>(stream, vocab, window, workers,
                                           [](std::size_t) { return std::uint64_t{1}; });
    } else {
        entries = count_all<double>(stream, vocab, window, workers,
                                    [](std::size_t k) { return 1.0 / static_cast<double>(k); });
    }
    return CooccurrenceMatrix::from_entries(vocab.size(), vocab.shard_size(), std::move(entries));
}

std::string render_cooccurrences(const CooccurrenceMatrix& cooc) {
    io::BinaryWriter out;
    out.bytes(kMagic);
    out.u32(kCooccurrenceFormatVersion);
    out.u32(static_cast<std::uint32_t>(cooc.n()));
    out.u32(static_cast<std::uint32_t>(cooc.shard_size()));
    out.f64(cooc.total());
    for (double s : cooc.row_sums()) {
        out.f64(s);
    }
    for (double s : cooc.col_sums()) {
        out.f64(s);
    }
    out.u64(cooc.entries().size());
    for (const auto& e : cooc.entries()) {
        out.u32(e.row);
        out.u32(e.col);
        out.f64(e.value);
    }
    return out.buffer();
}

CooccurrenceMatrix parse_cooccurrences(std::string_view bytes) {
    io::BinaryReader in(bytes);
    if (in.remaining() < kMagic.size() || in.bytes(kMagic.size()) != kMagic) {
        throw FormatError("not a co-occurrence file (bad magic)");
    }
    const auto version = in.u32();
    if (version != kCooccurrenceFormatVersion) {
        throw FormatError("unsupported co-occurrence format version: expected " +
                          std::to_string(kCooccurrenceFormatVersion) + ", found " +
                          std::to_string(version));
    }
    const std::size_t n = in.u32();
    const std::size_t shard_size = in.u32();
    const double total = in.f64();
    std::vector<double> row_sums(n);
    std::vector<double> col_sums(n);
    for (auto& s : row_sums) {
        s = in.f64();
    }
    for (auto& s : col_sums) {
        s = in.f64();
    }
    const auto count = in.u64();
    if (count > in.remaining() / 16) {
        throw CorruptionError("truncated file: header claims " + std::to_string(count) + " entries");
    }
    std::vector<CooccurrenceEntry> entries(count);
    for (auto& e : entries) {
        e.row = in.u32();
        e.col = in.u32();
        e.value = in.f64();
    }
    if (in.remaining() != 0) {
        throw CorruptionError(std::to_string(in.remaining()) + " trailing bytes after entries");
    }
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (cell_key(entries[i - 1].row, entries[i - 1].col) >= cell_key(entries[i].row, entries[i].col)) {
            throw CorruptionError("entries are not sorted by (row, col) at index " + std::to_string(i));
        }
    }
    CooccurrenceMatrix m;
    try {
        m = CooccurrenceMatrix::from_entries(n, shard_size, std::move(entries));
    } catch (const ConfigError& e) {
        throw CorruptionError(e.what());
    }
    // Stored marginals are authoritative; they must agree with the entries.
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
    for (std::size_t i = 0; i < n; ++i) {
        if (!close(row_sums[i], m.row_sums_[i]) || !close(col_sums[i], m.col_sums_[i])) {
            throw CorruptionError("stored marginals disagree with entries at id " + std::to_string(i));
        }
    }
    if (!close(total, m.total_)) {
        throw CorruptionError("stored total disagrees with entries");
    }
    m.row_sums_ = std::move(row_sums);
    m.col_sums_ = std::move(col_sums);
    m.total_ = total;
    return m;
}

void save_cooccurrences(const CooccurrenceMatrix& cooc, const std::filesystem::path& path) {
    io::write_file_atomic(path, render_cooccurrences(cooc));
}

CooccurrenceMatrix load_cooccurrences(const std::filesystem::path& path) {
    return parse_cooccurrences(io::read_file(path));
}

}  // namespace pmiembed
