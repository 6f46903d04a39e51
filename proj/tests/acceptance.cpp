// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "rkcca/bench.hpp"
#include "rkcca/cli.hpp"
#include "rkcca/csv.hpp"
#include "rkcca/influence.hpp"
#include "rkcca/kcca.hpp"
#include "rkcca/kernel.hpp"
#include "rkcca/kirwls.hpp"
#include "rkcca/robust_cov.hpp"
#include "rkcca/robust_mean.hpp"
#include "rkcca/synth.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace rkcca;
using namespace rkcca::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Outcome quadratic_degeneracy() {
  double worst_w = 0.0, worst_rho = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index n = 20 + static_cast<Index>(s) * 9;  // 20 .. 191
    const Matrix X = normals(n, 3, 1000 + s), Y = normals(n, 2, 2000 + s) + 0.5 * X.leftCols(2);
    const Matrix Kx = gram(resolve(KernelSpec::gaussian_median(), X), X);
    const Matrix Ky = gram(resolve(KernelSpec::gaussian_median(), Y), Y);
    const Vector u = uniform_weights(n), uc = standard_cco_weights(n);
    const WeightedCenteredGram gx = center(Kx, u), gy = center(Ky, u);
    worst_w = std::max(worst_w, max_abs(fit_robust_mean(Kx, LossConfig::quadratic()).weights - u));
    worst_w = std::max(worst_w, max_abs(fit_robust_co(gx, LossConfig::quadratic()).weights - uc));
    worst_w = std::max(worst_w, max_abs(fit_robust_cov(gx, gy, LossConfig::quadratic()).weights - uc));
    const CcaModel a = fit_standard_kcca(Kx, Ky, 1e-5, 2);
    const CcaModel b = fit_robust_kcca(Kx, Ky, LossConfig::quadratic(), 1e-5, 2);
    worst_w = std::max(worst_w, max_abs(b.weights.w_xy - u));
    worst_rho = std::max(worst_rho, max_abs(a.rho - b.rho));
  }
  return {worst_w == 0.0 && worst_rho <= 1e-10,
          "max weight deviation " + num(worst_w) + ", max rho deviation " + num(worst_rho)};
}

Outcome kirwls_descent() {
  double worst_rise = 0.0, worst_change = 0.0;
  bool all_converged = true;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    TcsdParams p;
    const Dataset d = gen_tcsd(p, Contamination::mixture(0.05), s);
    const Matrix K = gram(resolve(KernelSpec::gaussian_median(), d.x), d.x);
    const CovOperatorFit f = fit_robust_co(center(K, uniform_weights(d.x.rows())), LossConfig::huber_median());
    all_converged = all_converged && f.converged;
    const auto& J = f.objective_trace;
    for (std::size_t h = 1; h < J.size(); ++h) {
      worst_rise = std::max(worst_rise, (J[h] - J[h - 1]) / J[h - 1]);
    }
    worst_change = std::max(worst_change, f.weight_changes.empty() ? 0.0 : f.weight_changes.back());
  }
  return {all_converged && worst_rise <= 1e-12 && worst_change < 1e-6,
          "max relative rise " + num(worst_rise) + ", max final sup change " + num(worst_change)};
}

Outcome surrogate_majorization() {
  double worst_gap = 0.0, worst_touch = 0.0;
  for (const RobustLoss& loss : {RobustLoss::huber(1.0), RobustLoss::hampel(1.0, 2.0, 3.0), RobustLoss::tukey(3.0)}) {
    for (int a = 0; a < 100; ++a) {
      const double c = 0.05 + 5.0 * a / 99.0;
      worst_touch = std::max(worst_touch, std::abs(loss.surrogate(c, c) - loss.zeta(c)));
      for (int b = 0; b < 100; ++b) {
        const double t = 6.0 * b / 99.0;
        worst_gap = std::max(worst_gap, loss.zeta(t) - loss.surrogate(t, c));
      }
    }
  }
  return {worst_gap <= 0.0 && worst_touch <= 1e-12,
          "max zeta - p " + num(worst_gap) + ", max |p(c;c) - zeta(c)| " + num(worst_touch)};
}

double tensor_distance(const Matrix& Fx, const Matrix& Fy, const Vector& wa, Index na, const Vector& wb) {
  double sum = 0.0;
  for (Index a = 0; a < Fx.cols(); ++a) {
    for (Index b = 0; b < Fy.cols(); ++b) {
      double s = 0.0;
      for (Index i = 0; i < na; ++i) s += wa(i) * Fx(i, a) * Fy(i, b);
      for (Index i = 0; i < wb.size(); ++i) s -= wb(i) * Fx(na + i, a) * Fy(na + i, b);
      sum += s * s;
    }
  }
  return sum;
}

Outcome hs_oracle() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Index n = 2 + static_cast<Index>(s % 9);
    const Vector w = simplex(n, s);
    const Matrix Kx = center(gram(KernelSpec::gaussian(1.0), normals(n, 2, s)), uniform_weights(n)).centered;
    const Matrix Ky = center(gram(KernelSpec::polynomial(2), normals(n, 2, s + 500)), uniform_weights(n)).centered;
    const Matrix Fx = features(Kx), Fy = features(Ky);
    const Vector e = residual_vector(Kx, Ky, w);
    for (Index i = 0; i < n; ++i) {
      double sum = 0.0;
      for (Index a = 0; a < Fx.cols(); ++a) {
        for (Index b = 0; b < Fy.cols(); ++b) {
          double sig = 0.0;
          for (Index j = 0; j < n; ++j) sig += w(j) * Fx(j, a) * Fy(j, b);
          const double d = Fx(i, a) * Fy(i, b) - sig;
          sum += d * d;
        }
      }
      // squared: near-zero residuals make the square root ill-conditioned
      worst = std::max(worst, std::abs(e(i) * e(i) - sum));
    }

    const Index na = 1 + static_cast<Index>(s % 5), nb = 1 + static_cast<Index>((s * 7) % 6);
    const Matrix Xa = normals(na, 2, s + 1), Xb = normals(nb, 2, s + 2), Ya = normals(na, 1, s + 3),
                 Yb = normals(nb, 1, s + 4);
    Matrix X(na + nb, 2), Y(na + nb, 1);
    X << Xa, Xb;
    Y << Ya, Yb;
    const KernelSpec kx = KernelSpec::gaussian(0.9), ky = KernelSpec::laplacian(1.3);
    const Vector wa = simplex(na, s + 5), wb = simplex(nb, s + 6);
    const CrossGramBlocks bx{gram(kx, Xa), cross_gram(kx, Xa, Xb), gram(kx, Xb)};
    const CrossGramBlocks by{gram(ky, Ya), cross_gram(ky, Ya, Yb), gram(ky, Yb)};
    const double ref = tensor_distance(features(gram(kx, X)), features(gram(ky, Y)), wa, na, wb);
    worst = std::max(worst, std::abs(hs_distance_sq(wa, bx, by, wb) - ref));
  }
  return {worst <= 1e-10, "max abs deviation " + num(worst)};
}

Outcome influence_fd() {
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    MgsdParams p;
    p.n = 30;
    const Dataset d = gen_mgsd(p, Contamination::none(), s);
    const Matrix Kx = gram(resolve(KernelSpec::gaussian_median(), d.x), d.x);
    const Matrix Ky = gram(resolve(KernelSpec::gaussian_median(), d.y), d.y);
    KccaOptions o;
    o.kappa = 1e-5;
    const CcaModel m = fit_weighted(Kx, Ky, CcaWeights::uniform(30), o);
    const Index i = static_cast<Index>((s * 11) % 30);
    const double fd = contamination_slope(Kx, Ky, o, 0, i, 1e-4);
    const double an = eif_kcca(m, 0, i).if_rho;
    worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1e-12));
  }
  return {worst <= 1e-2, "max relative error " + num(worst)};
}

Outcome smsd_separation() {
  Table2Config c;
  c.datasets = {"smsd"};
  c.sizes = {100};
  c.replicates = 25;
  c.functions = false;
  const Table t = run_table2(c);
  const double standard = t.runs.at(0).mean, robust = t.runs.at(1).mean;
  return {robust < standard && standard > 3.0 * robust,
          "standard " + num(standard) + ", robust " + num(robust) + ", ratio " + num(standard / robust)};
}

Outcome tcsd_kernel_ratios() {
  Table1Config c;
  c.datasets = {"tcsd"};
  c.norms = {NormKind::Frobenius};
  c.n = 500;
  c.replicates = 25;
  const Table t = run_table1(c);
  // runs: kernel-major, standard then robust
  auto run = [&](std::size_t k, int m) { return t.runs.at(2 * k + static_cast<std::size_t>(m)).mean; };
  bool ok = run(2, 0) > 0.9 && run(3, 0) < 0.3;
  std::string detail = "poly:3 " + num(run(2, 0)) + ", gaussian " + num(run(3, 0));
  for (std::size_t k = 0; k < 3; ++k) {
    ok = ok && run(k, 1) <= run(k, 0);
    detail += ", " + c.kernels[k] + " robust/standard " + num(run(k, 1)) + "/" + num(run(k, 0));
  }
  return {ok, detail};
}

Outcome linear_cca() {
  const Index n = 1000;
  const Matrix Z = normals(n, 4, 77);
  const double r = 0.8;
  Matrix X(n, 2), Y(n, 2);
  X << Z.col(0), Z.col(1);
  Y << r * Z.col(0) + std::sqrt(1 - r * r) * Z.col(2), Z.col(3);
  const Matrix Xc = X.rowwise() - X.colwise().mean(), Yc = Y.rowwise() - Y.colwise().mean();
  auto isqrt = [](const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    return Matrix(es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose());
  };
  const Matrix T = isqrt(Xc.transpose() * Xc) * (Xc.transpose() * Yc) * isqrt(Yc.transpose() * Yc);
  const double classical = Eigen::JacobiSVD<Matrix>(T).singularValues()(0);
  const CcaModel m = fit_standard_kcca(gram(KernelSpec::linear(), X), gram(KernelSpec::linear(), Y), 1e-8, 1);
  return {std::abs(m.rho(0) - classical) <= 0.03,
          "kernel " + num(m.rho(0)) + ", classical " + num(classical)};
}

Outcome population_distance_trend() {
  Fig4Config c;
  c.populations = {1500};
  c.sizes = {15, 300};
  c.replicates = 20;
  const Table t = run_fig4(c);
  const double kco15 = t.runs.at(0).mean, rkco15 = t.runs.at(1).mean, kco300 = t.runs.at(2).mean,
               rkco300 = t.runs.at(3).mean;
  return {kco300 < kco15 && rkco300 < rkco15 && rkco300 <= kco300,
          "kco " + num(kco15) + " -> " + num(kco300) + ", rkco " + num(rkco15) + " -> " + num(rkco300)};
}

Outcome outlier_recall() {
  double total = 0.0;
  CcaSetup setup;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const Dataset d = make_paired("smsd", 100, Contamination::mixture(0.05), s);
    const InfluenceReport r = influence_report(fit_method(d, Method::Standard, setup), 0);
    Index hit = 0;
    for (Index i : d.contaminated_indices) hit += r.outlier_flags[static_cast<std::size_t>(i)] ? 1 : 0;
    total += static_cast<double>(hit) / static_cast<double>(d.contaminated_indices.size());
  }
  const double recall = total / 20.0;
  return {recall >= 0.6, "mean recall " + num(recall)};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

Outcome replay_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "rkcca_acceptance";
  fs::remove_all(root);
  const std::string a = (root / "a").string(), b = (root / "b").string();
  fs::create_directories(a);
  fs::create_directories(b);
  std::vector<std::string> failures;
  auto step = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  step(cli({"gen", "--dataset", "smsd", "--n", "60", "--contamination", "mixture:0.05", "--seed", "3", "--out",
            a + "/d"}) == 0,
       "gen");
  step(cli({"fit", "--data", a + "/d", "--method", "standard", "--m", "2", "--out", a + "/std.csv"}) == 0, "fit");
  step(cli({"fit", "--data", a + "/d", "--method", "robust", "--loss", "tukey", "--out", a + "/rob.csv"}) == 0,
       "fit robust");
  step(cli({"influence", "--model", a + "/std.csv", "--out", a + "/inf.csv"}) == 0, "influence");
  const std::vector<std::pair<std::string, std::string>> tables{{"t1", "2"}, {"t2", "2"}, {"t3", "1"}, {"fig4", "2"}};
  for (const auto& [table, reps] : tables) {
    step(cli({"bench", "--table", table, "--replicates", reps, "--threads", "1", "--out", a + "/" + table + ".csv"}) ==
             0,
         "bench " + table);
  }
  std::vector<std::pair<std::string, std::string>> files{{"d.manifest.csv", "d"},
                                                         {"std.csv", "std.csv"},
                                                         {"rob.csv", "rob.csv"},
                                                         {"inf.csv", "inf.csv"}};
  for (const auto& [table, reps] : tables) files.emplace_back(table + ".csv", table + ".csv");
  int compared = 0;
  for (const std::string threads : {"1", "3"}) {
    for (const auto& [file, target] : files) {
      fs::remove_all(b);
      fs::create_directories(b);
      if (cli({"replay", a + "/" + file, "--threads", threads, "--out", b + "/" + target}) != 0) {
        failures.push_back("replay " + file);
        continue;
      }
      std::vector<std::string> outputs{target};
      if (target == "d") outputs = {"d.x.csv", "d.y.csv", "d.manifest.csv"};
      for (const auto& o : outputs) {
        ++compared;
        if (!fs::exists(b + "/" + o) || read_file(a + "/" + o) != read_file(b + "/" + o)) {
          failures.push_back(o + " (threads " + threads + ")");
        }
      }
    }
  }
  std::string detail = std::to_string(compared) + " files compared";
  for (const auto& f : failures) detail += "; mismatch: " + f;
  return {failures.empty() && compared > 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quadratic loss degeneracy", quadratic_degeneracy},
      {"KIRWLS descent on TCSD", kirwls_descent},
      {"surrogate majorization", surrogate_majorization},
      {"HS-norm oracle", hs_oracle},
      {"influence finite difference", influence_fd},
      {"SMSD eta_rho separation", smsd_separation},
      {"TCSD contamination ratio by kernel", tcsd_kernel_ratios},
      {"linear CCA oracle", linear_cca},
      {"TCSD population distance trend", population_distance_trend},
      {"outlier injection recall", outlier_recall},
      {"CLI replay determinism", replay_determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, check] : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << k << " " << name << ": " << o.detail << " (" << num(secs)
              << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
