#pragma once

// Flat binary model file, all values little-endian:
//
//   magic "LCCADMDL", u32 version
//   u32 n, u32 d, u32 D, u32 K
//   u32 feature map kind (0 random Fourier, 1 identity), u32 class count policy,
//   u32 initialisation (0 k-means, 1 seeds)
//   u64 seed, f64 sigma
//   f64 theta, f64 nu, f64 gamma (NaN when unresolved)
//   u32 max outer iterations, u32 lbp iterations, f64 lbp damping
//   f64 centers[K*D], f64 radii_sq[K], u32 counts[K]
//   f64 trans[K*K], f64 emis[K*D]            (row-major)
//   i32 assignment[n]
//
// The random Fourier frequencies are regenerated from (seed, sigma, d, D).

#include "lccad/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace lccad {

inline constexpr std::uint32_t kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> serialize_model(const LccadModel& model);
LccadModel deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const LccadModel& model, const std::filesystem::path& path);
LccadModel load_model(const std::filesystem::path& path);

}  // namespace lccad
