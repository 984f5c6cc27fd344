#pragma once

// Byte-stable output helpers shared by the experiment runners.

#include <Eigen/Dense>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lccad {

/// Any failure to create, write or read a file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Six significant digits, printf "%g" style; "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Creates the directory and its parents; throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

struct HeatmapScale {
    double min = 0.0;
    double max = 0.0;
};

/// Binary P5 image, maxval 255, one pixel per matrix entry (rows top to
/// bottom). Values are min-max scaled to 0..255 with rounding; a constant
/// matrix maps to 0.
std::string encode_pgm(const Eigen::MatrixXd& values, HeatmapScale* scale = nullptr);

}  // namespace lccad
