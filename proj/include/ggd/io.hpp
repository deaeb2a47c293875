#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ggd {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint32_t maxval = 0;
    std::vector<std::uint16_t> pixels;  // row-major
};

/// Binary (P5) PGM with 8- or 16-bit samples. Throws IngestError naming the path.
[[nodiscard]] GrayImage read_pgm(const std::filesystem::path& path);
/// Writes 16-bit binary PGM (maxval 65535).
void write_pgm16(const std::filesystem::path& path, const GrayImage& img);

/// One number per line; blank lines are skipped. Errors cite the line number.
[[nodiscard]] std::vector<double> read_value_csv(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

}  // namespace ggd
