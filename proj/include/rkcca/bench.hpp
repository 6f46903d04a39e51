#pragma once

#include "rkcca/influence.hpp"
#include "rkcca/kcca.hpp"
#include "rkcca/kernel.hpp"
#include "rkcca/linalg.hpp"
#include "rkcca/loss.hpp"
#include "rkcca/synth.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rkcca {

enum class MetricKind { EtaKCO, EtaRKCO, EtaKCOR, EtaRKCOR, EtaRho, EtaF, CvGap };
std::string to_string(MetricKind kind);

struct MetricRun {
  MetricKind metric = MetricKind::EtaKCO;
  std::string label;
  std::vector<double> per_replicate;
  double mean = 0.0;
  double sd = 0.0;
  std::string config;

  int replicates() const { return static_cast<int>(per_replicate.size()); }
};

/// Mean and sample standard deviation, accumulated over the sorted values
/// with compensated summation so the result does not depend on order.
void aggregate(MetricRun& run);
MetricRun make_run(MetricKind kind, std::string label, std::vector<double> values, std::string config = {});

/// Kernel CO estimate: centered Gram plus operator weights.
struct CoEstimate {
  Matrix raw;
  Matrix centered;
  Vector centering;
  Vector weights;
};

/// Standard: uniform centering and weights. Robust: robust-ME centering and
/// robust CO weights.
CoEstimate estimate_co(const Matrix& K, bool robust, const LossConfig& loss = LossConfig::huber_median());

/// ||Sigma_sample - Sigma_population||^2_HS of the uncentered operators
/// sum_i w_i k(., X_i) (x) k(., X_i) against the uniform population operator.
double eta_population_distance(const KernelSpec& kernel, const Matrix& sample, const Vector& sample_weights,
                               const Matrix& population);
/// Same with a precomputed population Gram (saves the N x N evaluation).
double eta_population_distance(const KernelSpec& kernel, const Matrix& sample, const Vector& sample_weights,
                               const Matrix& population, const Matrix& population_gram);

enum class NormKind { Frobenius, MaxModulus };
std::string to_string(NormKind kind);

/// |1 - ||V_ideal|| / ||V_contaminated||| with V = K~ diag(w) K~.
double eta_contamination_ratio(const Matrix& V_ideal, const Matrix& V_contaminated, NormKind norm);
double operator_norm(const Matrix& V, NormKind norm);

struct EtaPair {
  double eta_rho = 0.0;
  double eta_f = 0.0;
};
/// eta_rho from the EIF of rho^2; eta_f from EIF(., f_X) - EIF(., f_Y)
/// (NaN when either report lacks the variate IFs).
EtaPair eta_rho_and_f(const InfluenceReport& ideal, const InfluenceReport& contaminated);

enum class Method { Standard, Robust };
std::string to_string(Method m);

struct CcaSetup {
  KernelSpec kernel_x = KernelSpec::gaussian_median();
  KernelSpec kernel_y = KernelSpec::gaussian_median();
  LossConfig loss = LossConfig::huber_median();
  double kappa = 1e-5;
  RobustWeighting weighting = RobustWeighting::Shared;
};

/// Fits either method on a paired dataset (bandwidths resolved on the data).
CcaModel fit_method(const Dataset& d, Method method, const CcaSetup& setup);

/// 10-fold (by default) CV: |train rho_1 - test correlation| per fold.
/// Folds come from a seeded permutation of the rows.
MetricRun cv_correlation_gap(const Dataset& d, Method method, const CcaSetup& setup, int folds,
                             std::uint64_t seed);

/// Runs `count` jobs on `threads` workers; job i writes only slot i, so the
/// outcome is independent of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

/// Worker count from RKCCA_THREADS (default 1).
int default_threads();

enum class Scale { Desk, Full };
std::string to_string(Scale s);

/// A plot/table-ready CSV body.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<MetricRun> runs;
};

struct Table1Config {
  std::vector<std::string> datasets{"tcsd", "sfsd"};
  std::vector<std::string> kernels{"poly:1", "poly:2", "poly:3", "gaussian:median", "laplacian:1"};
  std::vector<NormKind> norms{NormKind::Frobenius, NormKind::MaxModulus};
  Index n = 500;
  int replicates = 25;
  Contamination contamination = Contamination::mixture(0.05);
  std::uint64_t seed = 1;
  int threads = 1;
  static Table1Config at(Scale s);
};
Table run_table1(const Table1Config& cfg);

struct Table2Config {
  std::vector<std::string> datasets{"mgsd", "scfsd", "smsd"};
  std::vector<Index> sizes{100};
  int replicates = 25;
  Contamination contamination = Contamination::mixture(0.05);
  CcaSetup setup;
  bool functions = true;
  std::uint64_t seed = 1;
  int threads = 1;
  static Table2Config at(Scale s);
};
Table run_table2(const Table2Config& cfg);

struct Table3Config {
  std::vector<std::string> datasets{"mgsd", "scfsd"};
  Index n = 200;
  int folds = 10;
  int replicates = 10;
  Contamination contamination = Contamination::mixture(0.05);
  CcaSetup setup;
  std::uint64_t seed = 1;
  int threads = 1;
  static Table3Config at(Scale s);
};
Table run_table3(const Table3Config& cfg);

struct Fig4Config {
  std::vector<Index> populations{1500};
  std::vector<Index> sizes{15, 30, 45, 60, 90, 120, 150, 180, 210, 240, 270, 300};
  int replicates = 20;
  Contamination contamination = Contamination::mixture(0.05);
  /// With the Gaussian kernel the box outliers are nearly orthogonal to
  /// everything and the two estimators tie.
  KernelSpec kernel = KernelSpec::laplacian(1.0);
  LossConfig loss = LossConfig::huber_median();
  std::uint64_t seed = 1;
  int threads = 1;
  static Fig4Config at(Scale s);
};
Table run_fig4(const Fig4Config& cfg);

/// Paired dataset by name for the benches ("mgsd", "scfsd", "smsd").
Dataset make_paired(const std::string& name, Index n, const Contamination& c, std::uint64_t seed);
/// Single-view dataset by name ("tcsd": n split evenly over the circles, "sfsd").
Dataset make_single(const std::string& name, Index n, const Contamination& c, std::uint64_t seed);

}  // namespace rkcca
