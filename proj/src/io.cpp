#include "ggd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ggd/error.hpp"

namespace ggd {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw IngestError(path.string() + ": " + what);
}

// Header tokens are separated by whitespace; '#' starts a comment to end of line.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

std::size_t parse_size(const std::filesystem::path& path, const std::string& tok, const char* what) {
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        fail(path, std::string("bad PGM ") + what + " '" + tok + "'");
    }
    return v;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    if (next_token(in) != "P5") fail(path, "not a binary PGM (P5)");
    GrayImage img;
    img.width = parse_size(path, next_token(in), "width");
    img.height = parse_size(path, next_token(in), "height");
    const std::size_t maxval = parse_size(path, next_token(in), "maxval");
    if (maxval == 0 || maxval > 65535) fail(path, "maxval out of range");
    if (img.width == 0 || img.height == 0) fail(path, "empty image");
    img.maxval = static_cast<std::uint32_t>(maxval);
    const std::size_t count = img.width * img.height;
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(count * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) fail(path, "truncated pixel data");
    img.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        img.pixels[i] = bytes == 1 ? raw[i]
                                   : static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return img;
}

void write_pgm16(const std::filesystem::path& path, const GrayImage& img) {
    if (img.pixels.size() != img.width * img.height) {
        throw InvalidArgument("write_pgm16: pixel count does not match dimensions");
    }
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n65535\n";
    const std::size_t header = out.size();
    out.resize(header + 2 * img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        out[header + 2 * i] = static_cast<char>(img.pixels[i] >> 8);
        out[header + 2 * i + 1] = static_cast<char>(img.pixels[i] & 0xff);
    }
    write_text(path, out);
}

std::vector<double> read_value_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open");
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const char* first = line.data() + b;
        const char* last = line.data() + e + 1;
        double v = 0.0;
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
            fail(path, "line " + std::to_string(lineno) + ": not a finite number '" +
                           std::string(first, last) + "'");
        }
        out.push_back(v);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ggd
