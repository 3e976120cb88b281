#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "pmiembed/error.hpp"

namespace pmiembed::io {

// Reads a whole file. Throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Reads a file that may be gzip-compressed; plain files pass through.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Little-endian encoder into an in-memory buffer.
class BinaryWriter {
public:
    void bytes(std::string_view raw) { buffer_.append(raw); }

    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }

    const std::string& buffer() const noexcept { return buffer_; }

private:
    template <typename T>
    void put(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
        }
    }

    std::string buffer_;
};

// Little-endian decoder. Reading past the end throws CorruptionError.
class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    std::string_view bytes(std::size_t n) {
        require(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }

private:
    void require(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw CorruptionError("truncated file: needed " + std::to_string(n) +
                                  " bytes at offset " + std::to_string(pos_) + ", " +
                                  std::to_string(data_.size() - pos_) + " available");
        }
    }

    template <typename T>
    T get() {
        require(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return v;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace pmiembed::io
