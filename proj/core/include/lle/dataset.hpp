#pragma once

#include "lle/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>

namespace lle::dataset {

/// Deterministic random source: mt19937_64 with uniforms taken from the
/// top 53 bits and normals from a Box-Muller transform. Streams are
/// reproducible across platforms for a fixed seed (std::*_distribution is
/// deliberately not used, its output is implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal deviate.
    double normal();

  private:
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Load a CSV of points (one point per row on disk, columns in memory).
Matrix load_csv(const std::string& path, bool has_header);

/// Load a CSV whose final column holds integer class labels (empty field =
/// unlabeled). Labels are remapped to dense ids in [0, c).
LabeledDataset load_labeled_csv(const std::string& path, bool has_header);

/// Write points to CSV (one point per row, 17 significant digits, atomic
/// write via temp file + rename).
void save_csv(const Matrix& points, const std::string& path);

/// Swiss roll: point i = (t cos t, h, t sin t) + noise, t in [1.5pi, 4.5pi],
/// h in [0, 21]. Returns the 3 x n data and the 2 x n intrinsic (t, h)
/// parameters. The (t, h) stream is drawn before any noise, so the same
/// seed yields the same surface at every noise level.
std::pair<Matrix, Matrix> generate_swiss_roll(Index n, double noise_sd,
                                              std::uint64_t seed);

/// S-curve: point i = (sin t, h, sign(t)(cos t - 1)) + noise,
/// t in [-1.5pi, 1.5pi], h in [0, 2].
std::pair<Matrix, Matrix> generate_s_curve(Index n, double noise_sd,
                                           std::uint64_t seed);

/// Subtract the mean of each dimension.
Matrix center(const Matrix& x);

}  // namespace lle::dataset
