#include "rkcca/bench.hpp"

#include "rkcca/error.hpp"
#include "rkcca/kirwls.hpp"
#include "rkcca/rng.hpp"
#include "rkcca/robust_cov.hpp"
#include "rkcca/robust_mean.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace rkcca {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::EtaKCO: return "eta_kco";
    case MetricKind::EtaRKCO: return "eta_rkco";
    case MetricKind::EtaKCOR: return "eta_kcor";
    case MetricKind::EtaRKCOR: return "eta_rkcor";
    case MetricKind::EtaRho: return "eta_rho";
    case MetricKind::EtaF: return "eta_f";
    case MetricKind::CvGap: return "cv_gap";
  }
  return "unknown";
}

std::string to_string(NormKind kind) { return kind == NormKind::Frobenius ? "F" : "M"; }
std::string to_string(Method m) { return m == Method::Standard ? "standard" : "robust"; }
std::string to_string(Scale s) { return s == Scale::Desk ? "desk" : "full"; }

namespace {

double compensated_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
    else comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void aggregate(MetricRun& run) {
  const auto& v = run.per_replicate;
  if (v.empty()) {
    run.mean = std::numeric_limits<double>::quiet_NaN();
    run.sd = run.mean;
    return;
  }
  run.mean = compensated_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) {
    run.sd = 0.0;
    return;
  }
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - run.mean) * (x - run.mean));
  run.sd = std::sqrt(compensated_sum(std::move(sq)) / static_cast<double>(v.size() - 1));
}

MetricRun make_run(MetricKind kind, std::string label, std::vector<double> values, std::string config) {
  MetricRun run;
  run.metric = kind;
  run.label = std::move(label);
  run.per_replicate = std::move(values);
  run.config = std::move(config);
  aggregate(run);
  return run;
}

CoEstimate estimate_co(const Matrix& K, bool robust, const LossConfig& loss) {
  CoEstimate est;
  est.raw = K;
  const Index n = K.rows();
  if (!robust) {
    est.centering = uniform_weights(n);
    est.centered = center(K, est.centering).centered;
    est.weights = uniform_weights(n);
    return est;
  }
  est.centering = fit_robust_mean(K, loss).weights;
  const WeightedCenteredGram g = center(K, est.centering);
  est.centered = g.centered;
  est.weights = fit_robust_co(g, loss).weights;
  return est;
}

double eta_population_distance(const KernelSpec& kernel, const Matrix& sample, const Vector& sample_weights,
                               const Matrix& population, const Matrix& population_gram) {
  if (population.rows() < sample.rows()) throw ContractError("eta: population smaller than sample");
  if (population.cols() != sample.cols()) throw ContractError("eta: sample and population dimensions differ");
  if (kernel.median_bandwidth) throw ContractError("eta: kernel bandwidth must be resolved");
  CrossGramBlocks blocks;
  blocks.aa = gram(kernel, sample);
  blocks.ab = cross_gram(kernel, sample, population);
  blocks.bb = population_gram;
  return hs_distance_sq(sample_weights, blocks, blocks, uniform_weights(population.rows()));
}

double eta_population_distance(const KernelSpec& kernel, const Matrix& sample, const Vector& sample_weights,
                               const Matrix& population) {
  const KernelSpec k = resolve(kernel, population);
  return eta_population_distance(k, sample, sample_weights, population, gram(k, population));
}

double operator_norm(const Matrix& V, NormKind norm) {
  return norm == NormKind::Frobenius ? V.norm() : V.cwiseAbs().maxCoeff();
}

double eta_contamination_ratio(const Matrix& V_ideal, const Matrix& V_contaminated, NormKind norm) {
  const double den = operator_norm(V_contaminated, norm);
  if (!(den > 0.0)) throw DegenerateDataError("eta: contaminated operator has zero norm");
  return std::abs(1.0 - operator_norm(V_ideal, norm) / den);
}

EtaPair eta_rho_and_f(const InfluenceReport& ideal, const InfluenceReport& contaminated) {
  if (ideal.eif_rho.size() != contaminated.eif_rho.size()) {
    throw ContractError("eta_rho_and_f: reports differ in sample size");
  }
  if (ideal.component != contaminated.component) throw ContractError("eta_rho_and_f: components differ");
  EtaPair out;
  const double den = contaminated.eif_rho.norm();
  if (!(den > 0.0)) throw DegenerateDataError("eta_rho: contaminated EIF is identically zero");
  out.eta_rho = std::abs(1.0 - ideal.eif_rho.norm() / den);
  if (ideal.eif_fx.size() == 0 || contaminated.eif_fx.size() == 0) {
    out.eta_f = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double den_f = (contaminated.eif_fx - contaminated.eif_fy).norm();
  if (!(den_f > 0.0)) throw DegenerateDataError("eta_f: contaminated EIF difference is identically zero");
  out.eta_f = std::abs(1.0 - (ideal.eif_fx - ideal.eif_fy).norm() / den_f);
  return out;
}

namespace {

struct Fitted {
  CcaModel model;
  KernelSpec kx, ky;
  Matrix Kx, Ky;
};

Fitted fit_on(const Matrix& X, const Matrix& Y, Method method, const CcaSetup& setup) {
  Fitted f;
  f.kx = resolve(setup.kernel_x, X);
  f.ky = resolve(setup.kernel_y, Y);
  f.Kx = gram(f.kx, X);
  f.Ky = gram(f.ky, Y);
  if (method == Method::Standard) {
    f.model = fit_standard_kcca(f.Kx, f.Ky, setup.kappa, 1);
  } else {
    RobustKccaOptions o;
    o.kcca.kappa = setup.kappa;
    o.weighting = setup.weighting;
    f.model = fit_robust_kcca(f.Kx, f.Ky, setup.loss, o);
  }
  return f;
}

Matrix rows_of(const Matrix& M, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), M.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = M.row(idx[r]);
  return out;
}

}  // namespace

CcaModel fit_method(const Dataset& d, Method method, const CcaSetup& setup) {
  if (!d.paired()) throw InputError("kernel CCA needs a paired dataset");
  return fit_on(d.x, d.y, method, setup).model;
}

MetricRun cv_correlation_gap(const Dataset& d, Method method, const CcaSetup& setup, int folds,
                             std::uint64_t seed) {
  if (!d.paired()) throw InputError("cv: dataset must be paired");
  const Index n = d.x.rows();
  if (folds < 2 || n < 2 * folds) throw InputError("cv: need folds >= 2 and n >= 2 * folds");
  const CounterRng rng(seed, 0xcf);
  std::vector<std::pair<double, Index>> keys;
  for (Index i = 0; i < n; ++i) keys.emplace_back(rng.uniform(static_cast<std::uint64_t>(i), 1), i);
  std::sort(keys.begin(), keys.end());
  std::vector<double> gaps;
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train, test;
    for (Index r = 0; r < n; ++r) {
      (r % folds == f ? test : train).push_back(keys[static_cast<std::size_t>(r)].second);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const Matrix Xtr = rows_of(d.x, train), Ytr = rows_of(d.y, train);
    const Matrix Xte = rows_of(d.x, test), Yte = rows_of(d.y, test);
    const Fitted fit = fit_on(Xtr, Ytr, method, setup);
    const Projection p = project_raw(fit.model, cross_gram(fit.kx, Xte, Xtr), fit.Kx,
                                     cross_gram(fit.ky, Yte, Ytr), fit.Ky);
    if (!p.correlation_defined) throw DegenerateDataError("cv: test correlation undefined in fold " + std::to_string(f));
    gaps.push_back(std::abs(fit.model.rho(0) - p.correlations(0)));
  }
  std::ostringstream cfg;
  cfg << "dataset=" << d.name << ";method=" << to_string(method) << ";folds=" << folds << ";seed=" << seed;
  return make_run(MetricKind::CvGap, d.name + "/" + to_string(method), std::move(gaps), cfg.str());
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  if (count <= 0) return;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto guarded = [&](int i) {
    try {
      job(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) guarded(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int default_threads() {
  const char* env = std::getenv("RKCCA_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const int t = std::stoi(env, &used);
    if (used == std::string(env).size() && t >= 1) return t;
  } catch (const std::exception&) {
  }
  throw InputError(std::string("RKCCA_THREADS must be a positive integer, got '") + env + "'");
}

Dataset make_paired(const std::string& name, Index n, const Contamination& c, std::uint64_t seed) {
  if (name == "mgsd") {
    MgsdParams p;
    p.n = n;
    return gen_mgsd(p, c, seed);
  }
  if (name == "scfsd") {
    ScfsdParams p;
    p.n = n;
    return gen_scfsd(p, c, seed);
  }
  if (name == "smsd") {
    SmsdParams p;
    p.n = n;
    return gen_smsd(p, c, seed);
  }
  throw InputError("unknown paired dataset '" + name + "'");
}

Dataset make_single(const std::string& name, Index n, const Contamination& c, std::uint64_t seed) {
  if (name == "tcsd") {
    TcsdParams p;
    p.n1 = n / 3 + (n % 3 > 0 ? 1 : 0);
    p.n2 = n / 3 + (n % 3 > 1 ? 1 : 0);
    p.n3 = n / 3;
    return gen_tcsd(p, c, seed);
  }
  if (name == "sfsd") {
    SfsdParams p;
    p.n = n;
    return gen_sfsd(p, c, seed);
  }
  throw InputError("unknown single-view dataset '" + name + "'");
}

Table1Config Table1Config::at(Scale s) {
  Table1Config c;
  if (s == Scale::Full) {
    c.n = 1500;
    c.replicates = 100;
  }
  return c;
}

Table2Config Table2Config::at(Scale s) {
  Table2Config c;
  if (s == Scale::Full) {
    c.sizes = {100, 500, 1000};
    c.replicates = 100;
  }
  return c;
}

Table3Config Table3Config::at(Scale s) {
  Table3Config c;
  if (s == Scale::Full) {
    c.n = 500;
    c.replicates = 100;
  }
  return c;
}

Fig4Config Fig4Config::at(Scale s) {
  Fig4Config c;
  if (s == Scale::Full) {
    c.populations = {1500, 3000, 6000, 9000};
    c.replicates = 100;
  }
  return c;
}

Table run_table1(const Table1Config& cfg) {
  const std::size_t D = cfg.datasets.size(), Kn = cfg.kernels.size(), R = static_cast<std::size_t>(cfg.replicates);
  const std::size_t Nn = cfg.norms.size();
  std::vector<KernelSpec> kernels;
  for (const auto& k : cfg.kernels) kernels.push_back(KernelSpec::parse(k));
  // values[((d * Kn + k) * 2 + method) * Nn + norm][r]
  std::vector<std::vector<double>> values(D * Kn * 2 * Nn, std::vector<double>(R));
  parallel_for(static_cast<int>(D * Kn * R), cfg.threads, [&](int job) {
    const std::size_t r = static_cast<std::size_t>(job) % R;
    const std::size_t k = (static_cast<std::size_t>(job) / R) % Kn;
    const std::size_t d = static_cast<std::size_t>(job) / (R * Kn);
    const std::uint64_t seed = CounterRng::derive(cfg.seed, r);
    const Dataset ideal = make_single(cfg.datasets[d], cfg.n, Contamination::none(), seed);
    const Dataset cont = make_single(cfg.datasets[d], cfg.n, cfg.contamination, seed);
    const Matrix Ki = gram(resolve(kernels[k], ideal.x), ideal.x);
    const Matrix Kc = gram(resolve(kernels[k], cont.x), cont.x);
    for (int m = 0; m < 2; ++m) {
      const CoEstimate ei = estimate_co(Ki, m == 1);
      const CoEstimate ec = estimate_co(Kc, m == 1);
      const Matrix Vi = operator_matrix(ei.centered, ei.centered, ei.weights);
      const Matrix Vc = operator_matrix(ec.centered, ec.centered, ec.weights);
      for (std::size_t q = 0; q < Nn; ++q) {
        values[((d * Kn + k) * 2 + static_cast<std::size_t>(m)) * Nn + q][r] =
            eta_contamination_ratio(Vi, Vc, cfg.norms[q]);
      }
    }
  });

  Table t;
  t.columns = {"measure", "kernel"};
  for (const auto& ds : cfg.datasets) {
    for (const char* m : {"standard", "robust"}) {
      t.columns.push_back(ds + "_" + m + "_mean");
      t.columns.push_back(ds + "_" + m + "_sd");
    }
  }
  for (std::size_t q = 0; q < Nn; ++q) {
    for (std::size_t k = 0; k < Kn; ++k) {
      std::vector<std::string> row{to_string(cfg.norms[q]), cfg.kernels[k]};
      for (std::size_t d = 0; d < D; ++d) {
        for (int m = 0; m < 2; ++m) {
          MetricRun run = make_run(m == 0 ? MetricKind::EtaKCOR : MetricKind::EtaRKCOR,
                                   cfg.datasets[d] + "/" + cfg.kernels[k] + "/" + to_string(cfg.norms[q]),
                                   values[((d * Kn + k) * 2 + static_cast<std::size_t>(m)) * Nn + q]);
          row.push_back(fmt(run.mean));
          row.push_back(fmt(run.sd));
          t.runs.push_back(std::move(run));
        }
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table run_table2(const Table2Config& cfg) {
  const std::size_t D = cfg.datasets.size(), S = cfg.sizes.size(), R = static_cast<std::size_t>(cfg.replicates);
  // slot [(d * S + s) * 4 + {rho std, rho rob, f std, f rob}][r]
  std::vector<std::vector<double>> values(D * S * 4, std::vector<double>(R));
  parallel_for(static_cast<int>(D * S * R), cfg.threads, [&](int job) {
    const std::size_t r = static_cast<std::size_t>(job) % R;
    const std::size_t s = (static_cast<std::size_t>(job) / R) % S;
    const std::size_t d = static_cast<std::size_t>(job) / (R * S);
    const std::uint64_t seed = CounterRng::derive(cfg.seed, r);
    const Dataset ideal = make_paired(cfg.datasets[d], cfg.sizes[s], Contamination::none(), seed);
    const Dataset cont = make_paired(cfg.datasets[d], cfg.sizes[s], cfg.contamination, seed);
    KccaInfluenceOptions io;
    io.functions = cfg.functions;
    for (int m = 0; m < 2; ++m) {
      const Method method = m == 0 ? Method::Standard : Method::Robust;
      const InfluenceReport ri = influence_report(fit_method(ideal, method, cfg.setup), 0, io);
      const InfluenceReport rc = influence_report(fit_method(cont, method, cfg.setup), 0, io);
      const EtaPair e = eta_rho_and_f(ri, rc);
      values[(d * S + s) * 4 + static_cast<std::size_t>(m)][r] = e.eta_rho;
      values[(d * S + s) * 4 + 2 + static_cast<std::size_t>(m)][r] = e.eta_f;
    }
  });

  Table t;
  t.columns = {"data", "n", "eta_rho_standard_mean", "eta_rho_standard_sd", "eta_rho_robust_mean",
               "eta_rho_robust_sd", "eta_f_standard_mean", "eta_f_standard_sd", "eta_f_robust_mean",
               "eta_f_robust_sd"};
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t s = 0; s < S; ++s) {
      std::vector<std::string> row{cfg.datasets[d], std::to_string(cfg.sizes[s])};
      for (int slot = 0; slot < 4; ++slot) {
        const MetricKind kind = slot < 2 ? MetricKind::EtaRho : MetricKind::EtaF;
        MetricRun run = make_run(kind,
                                 cfg.datasets[d] + "/" + std::to_string(cfg.sizes[s]) + "/" +
                                     (slot % 2 == 0 ? "standard" : "robust"),
                                 values[(d * S + s) * 4 + static_cast<std::size_t>(slot)]);
        row.push_back(fmt(run.mean));
        row.push_back(fmt(run.sd));
        t.runs.push_back(std::move(run));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table run_table3(const Table3Config& cfg) {
  const std::size_t D = cfg.datasets.size(), R = static_cast<std::size_t>(cfg.replicates);
  // slot [(d * 2 + condition) * 2 + method][r]
  std::vector<std::vector<double>> values(D * 4, std::vector<double>(R));
  parallel_for(static_cast<int>(D * 2 * R), cfg.threads, [&](int job) {
    const std::size_t r = static_cast<std::size_t>(job) % R;
    const std::size_t cond = (static_cast<std::size_t>(job) / R) % 2;
    const std::size_t d = static_cast<std::size_t>(job) / (R * 2);
    const std::uint64_t seed = CounterRng::derive(cfg.seed, r);
    const Dataset data =
        make_paired(cfg.datasets[d], cfg.n, cond == 0 ? Contamination::none() : cfg.contamination, seed);
    for (int m = 0; m < 2; ++m) {
      const MetricRun run = cv_correlation_gap(data, m == 0 ? Method::Standard : Method::Robust, cfg.setup,
                                               cfg.folds, CounterRng::derive(seed, 1));
      values[(d * 2 + cond) * 2 + static_cast<std::size_t>(m)][r] = run.mean;
    }
  });

  Table t;
  t.columns = {"data", "condition", "standard_mean", "standard_sd", "robust_mean", "robust_sd"};
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t cond = 0; cond < 2; ++cond) {
      std::vector<std::string> row{cfg.datasets[d], cond == 0 ? "ID" : "CD"};
      for (int m = 0; m < 2; ++m) {
        MetricRun run = make_run(MetricKind::CvGap,
                                 cfg.datasets[d] + "/" + row[1] + "/" + (m == 0 ? "standard" : "robust"),
                                 values[(d * 2 + cond) * 2 + static_cast<std::size_t>(m)]);
        row.push_back(fmt(run.mean));
        row.push_back(fmt(run.sd));
        t.runs.push_back(std::move(run));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table run_fig4(const Fig4Config& cfg) {
  const std::size_t P = cfg.populations.size(), S = cfg.sizes.size(), R = static_cast<std::size_t>(cfg.replicates);
  // slot [(p * S + s) * 2 + method][r]
  std::vector<std::vector<double>> values(P * S * 2, std::vector<double>(R));
  parallel_for(static_cast<int>(P * R), cfg.threads, [&](int job) {
    const std::size_t r = static_cast<std::size_t>(job) % R;
    const std::size_t p = static_cast<std::size_t>(job) / R;
    const std::uint64_t rep_seed = CounterRng::derive(cfg.seed, r);
    const Dataset pop = make_single("tcsd", cfg.populations[p], Contamination::none(),
                                    CounterRng::derive(rep_seed, 0xB0B));
    const KernelSpec k = resolve(cfg.kernel, pop.x);
    const Matrix Kpop = gram(k, pop.x);
    for (std::size_t s = 0; s < S; ++s) {
      const Dataset sample =
          make_single("tcsd", cfg.sizes[s], cfg.contamination, CounterRng::derive(rep_seed, cfg.sizes[s]));
      const Matrix Ks = gram(k, sample.x);
      // Uncentered operator, matching the distance being measured.
      const Vector robust_w = kirwls(Ks.cwiseProduct(Ks), cfg.loss, {}).weights;
      values[(p * S + s) * 2][r] =
          eta_population_distance(k, sample.x, uniform_weights(sample.x.rows()), pop.x, Kpop);
      values[(p * S + s) * 2 + 1][r] = eta_population_distance(k, sample.x, robust_w, pop.x, Kpop);
    }
  });

  Table t;
  t.columns = {"N", "n", "estimator", "mean", "sd", "replicates"};
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t s = 0; s < S; ++s) {
      for (int m = 0; m < 2; ++m) {
        MetricRun run = make_run(m == 0 ? MetricKind::EtaKCO : MetricKind::EtaRKCO,
                                 std::to_string(cfg.populations[p]) + "/" + std::to_string(cfg.sizes[s]),
                                 values[(p * S + s) * 2 + static_cast<std::size_t>(m)]);
        t.rows.push_back({std::to_string(cfg.populations[p]), std::to_string(cfg.sizes[s]),
                          m == 0 ? "kco" : "rkco", fmt(run.mean), fmt(run.sd), std::to_string(run.replicates())});
        t.runs.push_back(std::move(run));
      }
    }
  }
  return t;
}

}  // namespace rkcca
