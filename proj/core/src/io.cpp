#include "pmiembed/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>
#include <zlib.h>

namespace pmiembed::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading " + path.string());
    }
    return std::move(ss).str();
}

std::string read_text_file(const std::filesystem::path& path) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::string out;
    char buf[1 << 16];
    for (;;) {
        const int got = gzread(file, buf, sizeof buf);
        if (got < 0) {
            int code = 0;
            const std::string msg = gzerror(file, &code);
            gzclose(file);
            throw IoError("error while reading " + path.string() + ": " + msg);
        }
        if (got == 0) {
            break;
        }
        out.append(buf, static_cast<std::size_t>(got));
    }
    gzclose(file);
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("error while writing " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

}  // namespace pmiembed::io
