#pragma once

#include "rkcca/linalg.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rkcca {

/// None: ideal data. Mixture: round(rate * n) rows drawn from the
/// contaminating law, all others identical to the ideal draw with the same
/// seed. Shift: every row drawn from the contaminating law.
struct Contamination {
  enum class Kind { None, Mixture, Shift };
  Kind kind = Kind::None;
  double rate = 0.05;

  static Contamination none() { return {Kind::None, 0.0}; }
  static Contamination mixture(double rate = 0.05) { return {Kind::Mixture, rate}; }
  static Contamination shift() { return {Kind::Shift, 1.0}; }
  /// "none", "mixture:0.05", "shift".
  std::string to_string() const;
  static Contamination parse(const std::string& text);
};

struct Dataset {
  std::string name;
  Matrix x;
  /// Empty (0 columns) for single-view designs.
  Matrix y;
  /// Sorted, 0-based.
  std::vector<Index> contaminated_indices;
  std::uint64_t seed = 0;
  /// Generator record: every parameter needed to regenerate the data.
  std::vector<std::pair<std::string, std::string>> spec;

  bool paired() const { return y.cols() > 0; }
};

/// Rows of an n-row design that are contaminated (sorted).
std::vector<Index> contaminated_rows(Index n, const Contamination& c, std::uint64_t seed,
                                     std::uint64_t stream);

/// Contaminated TCSD rows. Box: both coordinates U[-box, box] (gross
/// outliers scattered over the plane). Angle: the angle is drawn from
/// U[-box, box] instead of U[-pi, pi], which leaves the points on their circles.
enum class TcsdOutlierLaw { Box, Angle };

struct TcsdParams {
  Index n1 = 50, n2 = 50, n3 = 50;
  double noise_sd = 0.1;
  TcsdOutlierLaw law = TcsdOutlierLaw::Box;
  double box = 10.0;
};
Dataset gen_tcsd(const TcsdParams& p, const Contamination& c, std::uint64_t seed);

struct SfsdParams {
  Index n = 1500;
  double noise_sd = 0.1;
  double contaminated_noise_sd = 3.1622776601683795;  // variance 10
};
Dataset gen_sfsd(const SfsdParams& p, const Contamination& c, std::uint64_t seed);

/// 12 x 12 covariance [[A, cA], [cA, A]] with A the 6 x 6 equicorrelation
/// matrix (unit diagonal, off-diagonal `within`). PSD for |cross| <= 1 and
/// -1/5 <= within <= 1.
struct MgsdSigma {
  double within = 0.9;
  double cross = 0.5;
  Matrix matrix() const;
};

struct MgsdParams {
  Index n = 100;
  MgsdSigma sigma;
  /// Overrides `sigma` when non-empty (must be 12 x 12 PSD).
  Matrix custom_sigma;
  double contaminated_mean = 1.0;
};
Dataset gen_mgsd(const MgsdParams& p, const Contamination& c, std::uint64_t seed);

struct ScfsdParams {
  Index n = 100;
  Index dim = 100;
  double noise_sd = 0.1;
  double contaminated_mean = 1.0;
};
Dataset gen_scfsd(const ScfsdParams& p, const Contamination& c, std::uint64_t seed);

/// Reconstructed latent model: u ~ N(0,1); sparse 0/1 loadings (a `sparsity`
/// fraction of coordinates); X = signal u beta_x + noise eps, discretized to
/// {0,1,2} at +-snp_cut times the ideal marginal sd; Y = signal u beta_y + noise eps.
/// Contaminated rows use `contaminated_noise`.
struct SmsdParams {
  Index n = 100;
  Index snp_dim = 1000;
  Index voxel_dim = 1000;
  double signal = 0.5;
  double noise = 1.0;
  double contaminated_noise = 20.0;
  double sparsity = 0.1;
  double snp_cut = 0.674;
};
Dataset gen_smsd(const SmsdParams& p, const Contamination& c, std::uint64_t seed);

}  // namespace rkcca
