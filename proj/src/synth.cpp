#include "rkcca/synth.hpp"

#include "rkcca/csv.hpp"
#include "rkcca/error.hpp"
#include "rkcca/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rkcca {

namespace {

enum Stream : std::uint64_t { kTcsd = 1, kSfsd = 2, kMgsd = 3, kScfsd = 4, kSmsd = 5 };

enum Purpose : std::uint64_t {
  kSelect = 1,
  kAngle = 2,
  kNoise = 3,
  kOutlier = 4,
  kLatent = 5,
  kNoiseY = 6,
  kLoadX = 7,
  kLoadY = 8,
};

std::string num(double v) { return format_double(v); }

std::vector<bool> mask_of(Index n, const std::vector<Index>& rows) {
  std::vector<bool> m(static_cast<std::size_t>(n), false);
  for (Index r : rows) m[static_cast<std::size_t>(r)] = true;
  return m;
}

/// Indices of the k smallest keys, ties by index; returned sorted.
std::vector<Index> smallest_keys(const CounterRng& rng, Index count, Index k, std::uint64_t purpose) {
  std::vector<std::pair<double, Index>> keys;
  keys.reserve(static_cast<std::size_t>(count));
  for (Index r = 0; r < count; ++r) keys.emplace_back(rng.uniform(static_cast<std::uint64_t>(r), purpose), r);
  std::sort(keys.begin(), keys.end());
  std::vector<Index> out;
  for (Index i = 0; i < k; ++i) out.push_back(keys[static_cast<std::size_t>(i)].second);
  std::sort(out.begin(), out.end());
  return out;
}

void record_common(Dataset& d, const Contamination& c, std::uint64_t seed) {
  d.seed = seed;
  d.spec.insert(d.spec.begin(), {"dataset", d.name});
  d.spec.emplace_back("contamination", c.to_string());
  d.spec.emplace_back("seed", std::to_string(seed));
}

void check_rate(const Contamination& c) {
  if (c.kind == Contamination::Kind::Mixture && !(c.rate >= 0.0 && c.rate <= 1.0)) {
    throw InputError("contamination rate must lie in [0, 1]");
  }
}

}  // namespace

std::string Contamination::to_string() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Mixture: return "mixture:" + num(rate);
    case Kind::Shift: return "shift";
  }
  return "none";
}

Contamination Contamination::parse(const std::string& text) {
  if (text == "none" || text == "ideal") return none();
  if (text == "shift") return shift();
  if (text == "mixture") return mixture();
  if (text.rfind("mixture:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = text.substr(8);
      const double rate = std::stod(tail, &used);
      if (used != tail.size() || !(rate >= 0.0 && rate <= 1.0)) throw InputError("");
      return mixture(rate);
    } catch (const std::exception&) {
      throw InputError("invalid contamination rate in '" + text + "'");
    }
  }
  throw InputError("unknown contamination mode '" + text + "' (none, mixture:RATE, shift)");
}

std::vector<Index> contaminated_rows(Index n, const Contamination& c, std::uint64_t seed,
                                     std::uint64_t stream) {
  check_rate(c);
  switch (c.kind) {
    case Contamination::Kind::None: return {};
    case Contamination::Kind::Shift: {
      std::vector<Index> all(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }
    case Contamination::Kind::Mixture: {
      const auto k = static_cast<Index>(std::llround(c.rate * static_cast<double>(n)));
      return smallest_keys(CounterRng(seed, stream), n, std::min(k, n), kSelect);
    }
  }
  return {};
}

Dataset gen_tcsd(const TcsdParams& p, const Contamination& c, std::uint64_t seed) {
  if (p.n1 < 0 || p.n2 < 0 || p.n3 < 0) throw InputError("tcsd: group sizes must be non-negative");
  const Index n = p.n1 + p.n2 + p.n3;
  if (n < 2) throw InputError("tcsd: need at least 2 points in total");
  if (!(p.noise_sd >= 0.0) || !(p.box > 0.0)) throw InputError("tcsd: invalid noise or box size");
  const CounterRng rng(seed, kTcsd);
  Dataset d;
  d.name = "tcsd";
  d.contaminated_indices = contaminated_rows(n, c, seed, kTcsd);
  const std::vector<bool> bad = mask_of(n, d.contaminated_indices);
  d.x.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::uint64_t>(i);
    const double radius = i < p.n1 ? 1.0 : (i < p.n1 + p.n2 ? 0.5 : 0.25);
    if (bad[static_cast<std::size_t>(i)] && p.law == TcsdOutlierLaw::Box) {
      d.x(i, 0) = rng.uniform(-p.box, p.box, r, kOutlier, 0);
      d.x(i, 1) = rng.uniform(-p.box, p.box, r, kOutlier, 1);
      continue;
    }
    const double angle = bad[static_cast<std::size_t>(i)] ? rng.uniform(-p.box, p.box, r, kOutlier)
                                                         : rng.uniform(-std::numbers::pi, std::numbers::pi, r, kAngle);
    d.x(i, 0) = radius * std::cos(angle) + p.noise_sd * rng.normal(r, kNoise, 0);
    d.x(i, 1) = radius * std::sin(angle) + p.noise_sd * rng.normal(r, kNoise, 1);
  }
  d.spec = {{"n1", std::to_string(p.n1)}, {"n2", std::to_string(p.n2)}, {"n3", std::to_string(p.n3)},
            {"noise_sd", num(p.noise_sd)}, {"outlier_law", p.law == TcsdOutlierLaw::Box ? "box" : "angle"},
            {"box", num(p.box)}};
  record_common(d, c, seed);
  return d;
}

Dataset gen_sfsd(const SfsdParams& p, const Contamination& c, std::uint64_t seed) {
  if (p.n < 2) throw InputError("sfsd: n must be >= 2");
  if (!(p.noise_sd >= 0.0) || !(p.contaminated_noise_sd >= 0.0)) throw InputError("sfsd: invalid noise");
  const CounterRng rng(seed, kSfsd);
  Dataset d;
  d.name = "sfsd";
  d.contaminated_indices = contaminated_rows(p.n, c, seed, kSfsd);
  const std::vector<bool> bad = mask_of(p.n, d.contaminated_indices);
  d.x.resize(p.n, 10);
  for (Index i = 0; i < p.n; ++i) {
    const auto r = static_cast<std::uint64_t>(i);
    const double z = rng.uniform(-2.0 * std::numbers::pi, 0.0, r, kAngle);
    const double sd = bad[static_cast<std::size_t>(i)] ? p.contaminated_noise_sd : p.noise_sd;
    d.x(i, 0) = z + sd * rng.normal(r, kNoise, 0);
    for (Index k = 2; k <= 10; ++k) {
      const double kk = static_cast<double>(k);
      d.x(i, k - 1) = kk * std::sin(kk * z) + sd * rng.normal(r, kNoise, static_cast<std::uint64_t>(k - 1));
    }
  }
  d.spec = {{"n", std::to_string(p.n)}, {"noise_sd", num(p.noise_sd)},
            {"contaminated_noise_sd", num(p.contaminated_noise_sd)}};
  record_common(d, c, seed);
  return d;
}

Matrix MgsdSigma::matrix() const {
  Matrix A = Matrix::Constant(6, 6, within);
  A.diagonal().setOnes();
  Matrix S(12, 12);
  S << A, cross * A, cross * A, A;
  return S;
}

Dataset gen_mgsd(const MgsdParams& p, const Contamination& c, std::uint64_t seed) {
  if (p.n < 2) throw InputError("mgsd: n must be >= 2");
  const Matrix S = p.custom_sigma.size() > 0 ? p.custom_sigma : p.sigma.matrix();
  if (S.rows() != 12 || S.cols() != 12) throw InputError("mgsd: covariance must be 12 x 12");
  if (!S.isApprox(S.transpose(), 1e-12)) throw InputError("mgsd: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.eigenvalues().minCoeff() < -1e-10) throw InputError("mgsd: covariance is not positive semidefinite");
  const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();
  const CounterRng rng(seed, kMgsd);
  Dataset d;
  d.name = "mgsd";
  d.contaminated_indices = contaminated_rows(p.n, c, seed, kMgsd);
  const std::vector<bool> bad = mask_of(p.n, d.contaminated_indices);
  d.x.resize(p.n, 6);
  d.y.resize(p.n, 6);
  Vector g(12);
  for (Index i = 0; i < p.n; ++i) {
    const auto r = static_cast<std::uint64_t>(i);
    for (Index k = 0; k < 12; ++k) g(k) = rng.normal(r, kNoise, static_cast<std::uint64_t>(k));
    Vector z = root * g;
    if (bad[static_cast<std::size_t>(i)]) z.array() += p.contaminated_mean;
    for (Index k = 0; k < 6; ++k) {
      d.x(i, k) = z(k);
      d.y(i, k) = std::log(std::abs(z(6 + k)));
    }
  }
  if (p.custom_sigma.size() > 0) {
    d.spec = {{"n", std::to_string(p.n)}, {"sigma", "custom"}};
  } else {
    d.spec = {{"n", std::to_string(p.n)}, {"sigma_within", num(p.sigma.within)},
              {"sigma_cross", num(p.sigma.cross)}};
  }
  d.spec.emplace_back("contaminated_mean", num(p.contaminated_mean));
  record_common(d, c, seed);
  return d;
}

Dataset gen_scfsd(const ScfsdParams& p, const Contamination& c, std::uint64_t seed) {
  if (p.n < 2 || p.dim < 1) throw InputError("scfsd: need n >= 2 and dim >= 1");
  const CounterRng rng(seed, kScfsd);
  Dataset d;
  d.name = "scfsd";
  d.contaminated_indices = contaminated_rows(p.n, c, seed, kScfsd);
  const std::vector<bool> bad = mask_of(p.n, d.contaminated_indices);
  d.x.resize(p.n, p.dim);
  d.y.resize(p.n, p.dim);
  for (Index i = 0; i < p.n; ++i) {
    const auto r = static_cast<std::uint64_t>(i);
    const double z = rng.uniform(-std::numbers::pi, std::numbers::pi, r, kAngle);
    double eta = p.noise_sd * rng.normal(r, kNoise);
    if (bad[static_cast<std::size_t>(i)]) eta += p.contaminated_mean;
    for (Index j = 1; j <= p.dim; ++j) {
      const double jj = static_cast<double>(j);
      d.x(i, j - 1) = std::sin(jj * z) + eta;
      d.y(i, j - 1) = std::cos(jj * z) + eta;
    }
  }
  d.spec = {{"n", std::to_string(p.n)}, {"dim", std::to_string(p.dim)}, {"noise_sd", num(p.noise_sd)},
            {"contaminated_mean", num(p.contaminated_mean)}};
  record_common(d, c, seed);
  return d;
}

Dataset gen_smsd(const SmsdParams& p, const Contamination& c, std::uint64_t seed) {
  if (p.n < 2 || p.snp_dim < 1 || p.voxel_dim < 1) throw InputError("smsd: need n >= 2 and dims >= 1");
  if (!(p.signal >= 0.0) || !(p.noise > 0.0) || !(p.contaminated_noise > 0.0)) {
    throw InputError("smsd: signal must be >= 0 and noise levels > 0");
  }
  if (!(p.sparsity > 0.0 && p.sparsity <= 1.0)) throw InputError("smsd: sparsity must lie in (0, 1]");
  const CounterRng rng(seed, kSmsd);
  auto loadings = [&](Index dim, std::uint64_t purpose) {
    const auto k = std::max<Index>(1, static_cast<Index>(std::llround(p.sparsity * static_cast<double>(dim))));
    Vector beta = Vector::Zero(dim);
    for (Index idx : smallest_keys(rng, dim, k, purpose)) beta(idx) = 1.0;
    return beta;
  };
  const Vector bx = loadings(p.snp_dim, kLoadX);
  const Vector by = loadings(p.voxel_dim, kLoadY);

  Dataset d;
  d.name = "smsd";
  d.contaminated_indices = contaminated_rows(p.n, c, seed, kSmsd);
  const std::vector<bool> bad = mask_of(p.n, d.contaminated_indices);
  d.x.resize(p.n, p.snp_dim);
  d.y.resize(p.n, p.voxel_dim);
  for (Index i = 0; i < p.n; ++i) {
    const auto r = static_cast<std::uint64_t>(i);
    const double u = rng.normal(r, kLatent);
    const double noise = bad[static_cast<std::size_t>(i)] ? p.contaminated_noise : p.noise;
    for (Index k = 0; k < p.snp_dim; ++k) {
      const double sd = std::sqrt(p.signal * p.signal * bx(k) * bx(k) + p.noise * p.noise);
      const double v = p.signal * u * bx(k) + noise * rng.normal(r, kNoise, static_cast<std::uint64_t>(k));
      const double cut = p.snp_cut * sd;
      d.x(i, k) = v < -cut ? 0.0 : (v > cut ? 2.0 : 1.0);
    }
    for (Index k = 0; k < p.voxel_dim; ++k) {
      d.y(i, k) = p.signal * u * by(k) + noise * rng.normal(r, kNoiseY, static_cast<std::uint64_t>(k));
    }
  }
  d.spec = {{"n", std::to_string(p.n)},         {"snp_dim", std::to_string(p.snp_dim)},
            {"voxel_dim", std::to_string(p.voxel_dim)}, {"signal", num(p.signal)},
            {"noise", num(p.noise)},             {"contaminated_noise", num(p.contaminated_noise)},
            {"sparsity", num(p.sparsity)},       {"snp_cut", num(p.snp_cut)}};
  record_common(d, c, seed);
  return d;
}

}  // namespace rkcca
