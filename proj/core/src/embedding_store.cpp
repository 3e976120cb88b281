#include "pmiembed/embedding_store.hpp"

#include <charconv>
#include <cmath>

#include "pmiembed/error.hpp"
#include "pmiembed/io.hpp"

namespace pmiembed {
namespace {

constexpr std::string_view kMagic = "PMEM";

std::string_view next_line(std::string_view& text) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        auto start = line.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = line.find_first_of(" \t", start);
        if (end == std::string_view::npos) {
            end = line.size();
        }
        fields.push_back(line.substr(start, end - start));
        pos = end;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

VectorTable::VectorTable(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
    if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
        throw ConfigError("vector table has " + std::to_string(words_.size()) + " words but " +
                          std::to_string(vectors_.rows()) + " rows");
    }
    if (!vectors_.allFinite()) {
        throw ConfigError("vector table contains non-finite values");
    }
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) {
            throw ConfigError("duplicate word '" + words_[i] + "' in vector table");
        }
    }
}

std::optional<std::size_t> VectorTable::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

VectorTable make_table(const EmbeddingModel& model, CombineMode mode) {
    return VectorTable(model.vocab.words(), combine_embeddings(model, mode));
}

std::string render_text(const VectorTable& table) {
    std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
    char buf[64];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out += table.words()[i];
        for (std::size_t j = 0; j < table.dim(); ++j) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf,
                                           table.vectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                           std::chars_format::general, 17);
            out += ' ';
            out.append(buf, ptr);
        }
        out += '\n';
    }
    return out;
}

VectorTable parse_text(std::string_view text) {
    std::size_t line_no = 1;
    const auto header = split_spaces(next_line(text));
    std::size_t n = 0;
    std::size_t d = 0;
    if (header.size() != 2 || !parse_number(header[0], n) || !parse_number(header[1], d)) {
        throw ParseError(line_no, "expected header 'n d'");
    }
    std::vector<std::string> words;
    words.reserve(n);
    Matrix vectors(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        ++line_no;
        if (text.empty()) {
            throw ParseError(line_no, "expected " + std::to_string(n) + " vectors, file ends early");
        }
        const auto fields = split_spaces(next_line(text));
        if (fields.size() != d + 1) {
            throw ParseError(line_no, "expected a word and " + std::to_string(d) + " values, found " +
                                          std::to_string(fields.size()) + " fields");
        }
        words.emplace_back(fields[0]);
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            if (!parse_number(fields[j + 1], v) || !std::isfinite(v)) {
                throw ParseError(line_no, "bad or non-finite value '" + std::string(fields[j + 1]) + "'");
            }
            vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    while (!text.empty()) {
        ++line_no;
        if (!split_spaces(next_line(text)).empty()) {
            throw ParseError(line_no, "unexpected content after " + std::to_string(n) + " vectors");
        }
    }
    try {
        return VectorTable(std::move(words), std::move(vectors));
    } catch (const ConfigError& e) {
        throw FormatError(e.what());
    }
}

void save_text(const VectorTable& table, const std::filesystem::path& path) {
    io::write_file_atomic(path, render_text(table));
}

VectorTable load_text(const std::filesystem::path& path) {
    return parse_text(io::read_file(path));
}

std::string render_binary(const EmbeddingModel& model) {
    io::BinaryWriter out;
    out.bytes(kMagic);
    out.u32(kModelFormatVersion);
    out.u32(static_cast<std::uint32_t>(model.row_vectors.rows()));
    out.u32(static_cast<std::uint32_t>(model.row_vectors.cols()));
    for (Eigen::Index i = 0; i < model.row_vectors.size(); ++i) {
        out.f64(model.row_vectors.data()[i]);
    }
    for (Eigen::Index i = 0; i < model.col_vectors.size(); ++i) {
        out.f64(model.col_vectors.data()[i]);
    }
    const auto& words = model.vocab.words();
    out.u32(static_cast<std::uint32_t>(words.size()));
    for (std::size_t i = 0; i < words.size(); ++i) {
        out.u32(static_cast<std::uint32_t>(words[i].size()));
        out.bytes(words[i]);
        out.u64(model.vocab.counts()[i]);
    }
    return out.buffer();
}

EmbeddingModel parse_binary(std::string_view bytes) {
    io::BinaryReader in(bytes);
    if (in.remaining() < kMagic.size() || in.bytes(kMagic.size()) != kMagic) {
        throw FormatError("not an embedding model file (bad magic)");
    }
    const auto version = in.u32();
    if (version != kModelFormatVersion) {
        throw FormatError("unsupported model format version: expected " +
                          std::to_string(kModelFormatVersion) + ", found " + std::to_string(version));
    }
    const auto n = static_cast<Eigen::Index>(in.u32());
    const auto d = static_cast<Eigen::Index>(in.u32());
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 16 > in.remaining()) {
        throw CorruptionError("truncated file: header claims a " + std::to_string(n) + " x " +
                              std::to_string(d) + " model");
    }
    EmbeddingModel model;
    model.row_vectors.resize(n, d);
    model.col_vectors.resize(n, d);
    for (Eigen::Index i = 0; i < model.row_vectors.size(); ++i) {
        model.row_vectors.data()[i] = in.f64();
    }
    for (Eigen::Index i = 0; i < model.col_vectors.size(); ++i) {
        model.col_vectors.data()[i] = in.f64();
    }
    if (!model.row_vectors.allFinite() || !model.col_vectors.allFinite()) {
        throw CorruptionError("model contains non-finite values");
    }
    const auto count = in.u32();
    if (count != static_cast<std::uint32_t>(n)) {
        throw CorruptionError("vocabulary has " + std::to_string(count) + " words for a model of " +
                              std::to_string(n) + " rows");
    }
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    words.reserve(count);
    counts.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = in.u32();
        words.emplace_back(in.bytes(len));
        counts.push_back(in.u64());
    }
    if (in.remaining() != 0) {
        throw CorruptionError(std::to_string(in.remaining()) + " trailing bytes after vocabulary");
    }
    try {
        model.vocab = Vocabulary(std::move(words), std::move(counts), 1);
    } catch (const ConfigError& e) {
        throw CorruptionError(std::string("invalid vocabulary block: ") + e.what());
    }
    return model;
}

void save_binary(const EmbeddingModel& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, render_binary(model));
}

EmbeddingModel load_binary(const std::filesystem::path& path) {
    return parse_binary(io::read_file(path));
}

VectorTable load_table(const std::filesystem::path& path, CombineMode mode) {
    const auto bytes = io::read_file(path);
    if (std::string_view(bytes).starts_with(kMagic)) {
        return make_table(parse_binary(bytes), mode);
    }
    return parse_text(bytes);
}

}  // namespace pmiembed
