#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmiembed {

// Base for every error caused by user input, configuration or data. The CLI
// maps these to exit code 1; anything else escaping a subcommand is internal.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    explicit DecodeError(std::size_t byte_offset)
        : Error("invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

class EmptyVocabularyError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(std::size_t row_block, std::size_t col_block, std::size_t epoch,
                    const std::string& what)
        : Error("training diverged in shard (" + std::to_string(row_block) + ", " +
                std::to_string(col_block) + ") at epoch " + std::to_string(epoch) + ": " + what),
          row_block_(row_block), col_block_(col_block), epoch_(epoch) {}

    std::size_t row_block() const noexcept { return row_block_; }
    std::size_t col_block() const noexcept { return col_block_; }
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t row_block_;
    std::size_t col_block_;
    std::size_t epoch_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class CorruptionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class InsufficientDataError : public Error {
public:
    InsufficientDataError(const std::string& what, std::size_t skipped_oov)
        : Error(what + " (" + std::to_string(skipped_oov) + " items skipped as out-of-vocabulary)"),
          skipped_oov_(skipped_oov) {}

    std::size_t skipped_oov() const noexcept { return skipped_oov_; }

private:
    std::size_t skipped_oov_;
};

class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

// Broken internal contract (shape mismatch and the like). Not an Error subclass.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pmiembed
