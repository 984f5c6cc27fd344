#include "lccad/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace lccad {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string encode_pgm(const Eigen::MatrixXd& values, HeatmapScale* scale) {
    const double lo = values.size() ? values.minCoeff() : 0.0;
    const double hi = values.size() ? values.maxCoeff() : 0.0;
    if (scale) *scale = {lo, hi};
    std::string out = "P5\n" + std::to_string(values.cols()) + " " + std::to_string(values.rows()) + "\n255\n";
    const double span = hi - lo;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            const double t = span > 0.0 ? (values(r, c) - lo) / span : 0.0;
            out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
        }
    }
    return out;
}

}  // namespace lccad
