#include "rkcca/cli.hpp"

#include "rkcca/bench.hpp"
#include "rkcca/csv.hpp"
#include "rkcca/error.hpp"
#include "rkcca/influence.hpp"
#include "rkcca/kcca.hpp"
#include "rkcca/kernel.hpp"
#include "rkcca/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace rkcca {

using json = nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> default_multipliers(LossFamily f) {
  switch (f) {
    case LossFamily::Quadratic: return {};
    case LossFamily::Huber: return {1.0};
    case LossFamily::Hampel: return {1.0, 2.0, 3.0};
    case LossFamily::Tukey: return {3.0};
  }
  return {};
}

}  // namespace

LossConfig parse_loss_spec(const std::string& text) {
  const auto parts = split(text, ':');
  const LossFamily family = parse_loss_family(parts[0]);
  if (family == LossFamily::Quadratic) {
    if (parts.size() != 1) throw InputError("quadratic loss takes no constants");
    return LossConfig::quadratic();
  }
  LossConfig c;
  c.family = family;
  std::size_t first = 1;
  c.median_scaled = parts.size() == 1 || parts[1] == "median";
  if (parts.size() > 1 && parts[1] == "median") first = 2;
  c.constants.clear();
  for (std::size_t i = first; i < parts.size(); ++i) c.constants.push_back(parse_double(parts[i]));
  if (c.constants.empty()) {
    if (!c.median_scaled) throw InputError("loss '" + text + "' needs constants");
    c.constants = default_multipliers(family);
  }
  // multipliers obey the same ordering/positivity rules as the constants
  (void)RobustLoss::make(family, c.constants);
  return c;
}

std::string loss_spec_string(const LossConfig& config) {
  std::string s = to_string(config.family);
  if (config.family == LossFamily::Quadratic) return s;
  if (config.median_scaled) s += ":median";
  for (double v : config.constants) s += ":" + format_double(v);
  return s;
}

namespace {

constexpr int kUserError = 1;
constexpr int kIoError = 2;
constexpr int kNumericError = 3;

CsvMeta make_meta(const json& config) {
  CsvMeta meta;
  meta.set("command", "rkcca " + config.at("command").get<std::string>());
  if (config.contains("seed")) meta.set("seed", config.at("seed").dump());
  meta.set("config", config.dump());
  return meta;
}

std::string view_path(const std::string& prefix, char view) { return prefix + "." + view + ".csv"; }

// ---------------------------------------------------------------- gen

struct GenFlags {
  std::string dataset;
  std::string n;
  std::string contamination = "none";
  std::uint64_t seed = 1;
  std::map<std::string, double> numbers;
  std::string law;
};

const std::map<std::string, std::vector<std::string>>& gen_params() {
  static const std::map<std::string, std::vector<std::string>> p{
      {"tcsd", {"noise_sd", "box"}},
      {"sfsd", {"noise_sd", "contaminated_noise_sd"}},
      {"mgsd", {"within", "cross", "contaminated_mean"}},
      {"scfsd", {"dim", "noise_sd", "contaminated_mean"}},
      {"smsd", {"snp_dim", "voxel_dim", "signal", "noise", "contaminated_noise", "sparsity", "snp_cut"}},
  };
  return p;
}

Index to_count(double v, const std::string& what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) throw InputError(what + " must be a positive integer");
  return static_cast<Index>(v);
}

json gen_config(const GenFlags& f) {
  const auto& known = gen_params();
  const auto it = known.find(f.dataset);
  if (it == known.end()) throw InputError("unknown dataset '" + f.dataset + "'");
  for (const auto& [k, v] : f.numbers) {
    if (std::find(it->second.begin(), it->second.end(), k) == it->second.end()) {
      throw InputError("--" + k + " does not apply to " + f.dataset);
    }
  }
  if (!f.law.empty() && f.dataset != "tcsd") throw InputError("--law applies to tcsd only");
  const Contamination c = Contamination::parse(f.contamination);

  std::vector<Index> sizes;
  for (const auto& part : split(f.n.empty() ? std::string("100") : f.n, ',')) {
    sizes.push_back(to_count(parse_double(part), "--n"));
  }
  auto num = [&](const std::string& key, double fallback) {
    const auto v = f.numbers.find(key);
    return v == f.numbers.end() ? fallback : v->second;
  };

  json params;
  if (f.dataset == "tcsd") {
    TcsdParams p;
    if (f.n.empty()) sizes = {p.n1, p.n2, p.n3};
    if (sizes.size() == 1) {
      const Index n = sizes[0];
      sizes = {n / 3 + (n % 3 > 0 ? 1 : 0), n / 3 + (n % 3 > 1 ? 1 : 0), n / 3};
    }
    if (sizes.size() != 3) throw InputError("tcsd takes --n total or --n n1,n2,n3");
    params = {{"n1", sizes[0]}, {"n2", sizes[1]}, {"n3", sizes[2]}, {"noise_sd", num("noise_sd", p.noise_sd)},
              {"box", num("box", p.box)}, {"law", f.law.empty() ? std::string("box") : f.law}};
  } else {
    if (sizes.size() != 1) throw InputError("--n takes a single count for " + f.dataset);
    const Index n = sizes[0];
    if (f.dataset == "sfsd") {
      SfsdParams p;
      params = {{"n", n}, {"noise_sd", num("noise_sd", p.noise_sd)},
                {"contaminated_noise_sd", num("contaminated_noise_sd", p.contaminated_noise_sd)}};
    } else if (f.dataset == "mgsd") {
      MgsdParams p;
      params = {{"n", n}, {"within", num("within", p.sigma.within)}, {"cross", num("cross", p.sigma.cross)},
                {"contaminated_mean", num("contaminated_mean", p.contaminated_mean)}};
    } else if (f.dataset == "scfsd") {
      ScfsdParams p;
      params = {{"n", n}, {"dim", to_count(num("dim", static_cast<double>(p.dim)), "--dim")},
                {"noise_sd", num("noise_sd", p.noise_sd)},
                {"contaminated_mean", num("contaminated_mean", p.contaminated_mean)}};
    } else {
      SmsdParams p;
      params = {{"n", n},
                {"snp_dim", to_count(num("snp_dim", static_cast<double>(p.snp_dim)), "--snp-dim")},
                {"voxel_dim", to_count(num("voxel_dim", static_cast<double>(p.voxel_dim)), "--voxel-dim")},
                {"signal", num("signal", p.signal)},
                {"noise", num("noise", p.noise)},
                {"contaminated_noise", num("contaminated_noise", p.contaminated_noise)},
                {"sparsity", num("sparsity", p.sparsity)},
                {"snp_cut", num("snp_cut", p.snp_cut)}};
    }
  }
  return {{"command", "gen"}, {"dataset", f.dataset}, {"contamination", c.to_string()},
          {"seed", f.seed}, {"params", params}};
}

Dataset generate(const json& cfg) {
  const std::string name = cfg.at("dataset");
  const json& p = cfg.at("params");
  const Contamination c = Contamination::parse(cfg.at("contamination"));
  const std::uint64_t seed = cfg.at("seed");
  if (name == "tcsd") {
    TcsdParams t;
    t.n1 = p.at("n1");
    t.n2 = p.at("n2");
    t.n3 = p.at("n3");
    t.noise_sd = p.at("noise_sd");
    t.box = p.at("box");
    const std::string law = p.at("law");
    if (law == "box") t.law = TcsdOutlierLaw::Box;
    else if (law == "angle") t.law = TcsdOutlierLaw::Angle;
    else throw InputError("--law must be box or angle");
    return gen_tcsd(t, c, seed);
  }
  if (name == "sfsd") {
    SfsdParams s;
    s.n = p.at("n");
    s.noise_sd = p.at("noise_sd");
    s.contaminated_noise_sd = p.at("contaminated_noise_sd");
    return gen_sfsd(s, c, seed);
  }
  if (name == "mgsd") {
    MgsdParams m;
    m.n = p.at("n");
    m.sigma.within = p.at("within");
    m.sigma.cross = p.at("cross");
    m.contaminated_mean = p.at("contaminated_mean");
    return gen_mgsd(m, c, seed);
  }
  if (name == "scfsd") {
    ScfsdParams s;
    s.n = p.at("n");
    s.dim = p.at("dim");
    s.noise_sd = p.at("noise_sd");
    s.contaminated_mean = p.at("contaminated_mean");
    return gen_scfsd(s, c, seed);
  }
  if (name == "smsd") {
    SmsdParams s;
    s.n = p.at("n");
    s.snp_dim = p.at("snp_dim");
    s.voxel_dim = p.at("voxel_dim");
    s.signal = p.at("signal");
    s.noise = p.at("noise");
    s.contaminated_noise = p.at("contaminated_noise");
    s.sparsity = p.at("sparsity");
    s.snp_cut = p.at("snp_cut");
    return gen_smsd(s, c, seed);
  }
  throw InputError("unknown dataset '" + name + "'");
}

std::string base_name(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

void exec_gen(const json& cfg, const std::string& out, std::ostream& log) {
  const Dataset d = generate(cfg);
  const CsvMeta meta = make_meta(cfg);
  const Contamination c = Contamination::parse(cfg.at("contamination"));

  CsvTable x = from_matrix(d.x, numbered_columns("x", d.x.cols()));
  x.meta = meta;
  write_csv(view_path(out, 'x'), x);
  if (d.paired()) {
    CsvTable y = from_matrix(d.y, numbered_columns("y", d.y.cols()));
    y.meta = meta;
    write_csv(view_path(out, 'y'), y);
  }

  CsvTable manifest;
  manifest.meta = meta;
  manifest.columns = {"key", "value"};
  manifest.rows.push_back({"rows", std::to_string(d.x.rows())});
  manifest.rows.push_back({"x_file", base_name(view_path(out, 'x'))});
  manifest.rows.push_back({"x_columns", std::to_string(d.x.cols())});
  if (d.paired()) {
    manifest.rows.push_back({"y_file", base_name(view_path(out, 'y'))});
    manifest.rows.push_back({"y_columns", std::to_string(d.y.cols())});
  }
  const char* mode = c.kind == Contamination::Kind::None      ? "none"
                     : c.kind == Contamination::Kind::Mixture ? "mixture"
                                                              : "shift";
  manifest.rows.push_back({"contamination_mode", mode});
  for (const auto& [k, v] : d.spec) manifest.rows.push_back({k, v});
  manifest.rows.push_back({"contaminated_count", std::to_string(d.contaminated_indices.size())});
  std::string idx;
  for (std::size_t i = 0; i < d.contaminated_indices.size(); ++i) {
    idx += (i ? ";" : "") + std::to_string(d.contaminated_indices[i]);
  }
  manifest.rows.push_back({"contaminated_indices", idx});
  write_csv(out + ".manifest.csv", manifest);
  log << "wrote " << d.x.rows() << " rows of " << d.name << " to " << out << ".*\n";
}

// ---------------------------------------------------------------- fit

struct FitFlags {
  std::string x, y, data;
  std::string method = "robust";
  std::string kernel_x = "gaussian:median";
  std::string kernel_y = "gaussian:median";
  std::string loss = "huber";
  double kappa = 1e-5;
  int m = 1;
  std::string weighting = "shared";
  std::string centering = "robust";
  std::string inner = "operator";
  double tol = 1e-8;
  double weight_tol = 1e-6;
  int max_iter = 200;
};

std::pair<std::string, std::string> data_paths(const std::string& x, const std::string& y,
                                               const std::string& data) {
  if (!data.empty()) {
    if (!x.empty() || !y.empty()) throw InputError("give either --data or --x/--y");
    return {view_path(data, 'x'), view_path(data, 'y')};
  }
  if (x.empty() || y.empty()) throw InputError("need --data PREFIX or both --x and --y");
  return {x, y};
}

json fit_config(const FitFlags& f) {
  const auto [x, y] = data_paths(f.x, f.y, f.data);
  if (!(f.kappa > 0.0)) throw InputError("--kappa must be positive");
  if (f.m < 1) throw InputError("--m must be at least 1");
  if (f.max_iter < 1) throw InputError("--max-iter must be at least 1");
  json cfg{{"command", "fit"},
           {"x", x},
           {"y", y},
           {"method", f.method},
           {"kernel_x", KernelSpec::parse(f.kernel_x).to_string()},
           {"kernel_y", KernelSpec::parse(f.kernel_y).to_string()},
           {"kappa", f.kappa},
           {"m", f.m},
           {"inner", f.inner}};
  if (f.method == "robust") {
    cfg["loss"] = loss_spec_string(parse_loss_spec(f.loss));
    cfg["weighting"] = f.weighting;
    cfg["centering"] = f.centering;
    cfg["tol"] = f.tol;
    cfg["weight_tol"] = f.weight_tol;
    cfg["max_iter"] = f.max_iter;
  }
  return cfg;
}

struct Views {
  Matrix X, Y;
  std::optional<std::string> seed;
};

Views load_views(const std::string& x, const std::string& y) {
  const CsvTable tx = read_csv(x);
  const CsvTable ty = read_csv(y);
  Views v{to_matrix(tx), to_matrix(ty), tx.meta.get("seed")};
  if (v.X.rows() == 0 || v.X.cols() == 0 || v.Y.rows() == 0 || v.Y.cols() == 0) {
    throw InputError("empty data file");
  }
  if (v.X.rows() != v.Y.rows()) {
    throw InputError("row count mismatch: " + x + " has " + std::to_string(v.X.rows()) + ", " + y + " has " +
                     std::to_string(v.Y.rows()));
  }
  return v;
}

InnerExponent parse_inner(const std::string& s) {
  if (s == "operator") return InnerExponent::Operator;
  if (s == "printed") return InnerExponent::Printed;
  throw InputError("--inner must be operator or printed");
}

std::string to_string(InnerExponent e) { return e == InnerExponent::Operator ? "operator" : "printed"; }

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::string summary_text(const CcaModel& model, const json& cfg, Index n) {
  std::ostringstream os;
  os << "method " << cfg.at("method").get<std::string>() << ", n " << n << ", kappa "
     << format_double(model.kappa) << '\n';
  for (Index j = 0; j < model.rho.size(); ++j) os << "rho_" << j + 1 << ' ' << format_double(model.rho(j)) << '\n';
  if (!model.iterations.empty()) {
    static const char* names[] = {"me_x", "me_y", "cco", "co_x", "co_y"};
    os << "iterations";
    for (std::size_t i = 0; i < model.iterations.size() && i < 5; ++i) {
      os << (i ? ", " : " ") << names[i] << ' ' << model.iterations[i];
    }
    os << '\n';
  }
  os << "converged " << (model.converged ? "yes" : "no") << '\n';
  for (const auto& w : model.warnings) os << "warning: " << w << '\n';
  return os.str();
}

void exec_fit(const json& cfg, const std::string& out, std::ostream& log) {
  const Views v = load_views(cfg.at("x"), cfg.at("y"));
  const KernelSpec kx = resolve(KernelSpec::parse(cfg.at("kernel_x")), v.X);
  const KernelSpec ky = resolve(KernelSpec::parse(cfg.at("kernel_y")), v.Y);
  const Matrix Kx = gram(kx, v.X);
  const Matrix Ky = gram(ky, v.Y);
  KccaOptions ko;
  ko.kappa = cfg.at("kappa");
  ko.m = cfg.at("m");
  ko.inner = parse_inner(cfg.at("inner"));

  const std::string method = cfg.at("method");
  CcaModel model;
  if (method == "standard") {
    model = fit_weighted(Kx, Ky, CcaWeights::uniform(v.X.rows()), ko);
  } else if (method == "robust") {
    RobustKccaOptions ro;
    ro.kcca = ko;
    ro.kirwls.tol = cfg.at("tol");
    ro.kirwls.weight_tol = cfg.at("weight_tol");
    ro.kirwls.max_iter = cfg.at("max_iter");
    const std::string w = cfg.at("weighting");
    if (w == "shared") ro.weighting = RobustWeighting::Shared;
    else if (w == "separate") ro.weighting = RobustWeighting::Separate;
    else throw InputError("--weighting must be shared or separate");
    const std::string c = cfg.at("centering");
    if (c == "robust") ro.centering = CenteringMode::RobustMean;
    else if (c == "uniform") ro.centering = CenteringMode::Uniform;
    else throw InputError("--centering must be robust or uniform");
    model = fit_robust_kcca(Kx, Ky, parse_loss_spec(cfg.at("loss")), ro);
  } else {
    throw InputError("--method must be standard or robust");
  }

  SectionedFile file;
  file.meta = make_meta(cfg);
  if (v.seed) file.meta.set("data_seed", *v.seed);

  CsvTable info;
  info.columns = {"key", "value"};
  std::string iters;
  for (std::size_t i = 0; i < model.iterations.size(); ++i) iters += (i ? ";" : "") + std::to_string(model.iterations[i]);
  info.rows = {{"method", method},
               {"n", std::to_string(v.X.rows())},
               {"kernel_x", kx.to_string()},
               {"kernel_y", ky.to_string()},
               {"kappa", format_double(model.kappa)},
               {"m", std::to_string(model.rho.size())},
               {"inner", to_string(model.inner)},
               {"max_raw_rho", format_double(model.max_raw_rho)},
               {"converged", model.converged ? "1" : "0"},
               {"iterations", iters}};
  for (const auto& w : model.warnings) info.rows.push_back({"warning", sanitize(w)});
  file.sections.emplace_back("fit", info);

  CsvTable rho;
  rho.columns = {"component", "rho"};
  for (Index j = 0; j < model.rho.size(); ++j) rho.rows.push_back({std::to_string(j + 1), format_double(model.rho(j))});
  file.sections.emplace_back("rho", rho);
  file.sections.emplace_back("alpha_x", from_matrix(model.alpha_x, numbered_columns("c", model.alpha_x.cols())));
  file.sections.emplace_back("alpha_y", from_matrix(model.alpha_y, numbered_columns("c", model.alpha_y.cols())));
  Matrix W(v.X.rows(), 5);
  W << model.weights.center_x, model.weights.center_y, model.weights.w_xx, model.weights.w_yy, model.weights.w_xy;
  file.sections.emplace_back("weights", from_matrix(W, {"center_x", "center_y", "w_xx", "w_yy", "w_xy"}));
  write_file(out, render_sections(file));
  log << summary_text(model, cfg, v.X.rows());
}

// ---------------------------------------------------------- influence

struct InfluenceFlags {
  std::string model, x, y, data;
  int component = 1;
  std::string form = "regularized";
  double multiplier = 3.0;
};

json influence_config(const InfluenceFlags& f) {
  if (f.model.empty()) throw InputError("--model is required");
  std::string x = f.x, y = f.y;
  if (f.data.empty() && x.empty() && y.empty()) {
    // default to the data the model was fitted on
    const json fit = json::parse(parse_meta(read_file(f.model)).get("config").value_or("{}"));
    if (!fit.contains("x")) throw InputError("model header lacks data paths; pass --data or --x/--y");
    x = fit.at("x");
    y = fit.at("y");
  }
  const auto paths = data_paths(x, y, f.data);
  if (f.component < 1) throw InputError("--component is 1-based");
  if (f.form != "regularized" && f.form != "asymptotic") throw InputError("--form must be regularized or asymptotic");
  if (!(f.multiplier > 0.0)) throw InputError("--multiplier must be positive");
  return {{"command", "influence"}, {"model", f.model},       {"x", paths.first},          {"y", paths.second},
          {"component", f.component}, {"form", f.form}, {"multiplier", f.multiplier}};
}

std::string info_value(const CsvTable& info, const std::string& key) {
  for (const auto& row : info.rows) {
    if (row[0] == key) return row[1];
  }
  throw InputError("model file lacks '" + key + "'");
}

void exec_influence(const json& cfg, const std::string& out, std::ostream& log) {
  const SectionedFile file = parse_sections(read_file(cfg.at("model")));
  const CsvTable& info = file.section("fit");
  const Views v = load_views(cfg.at("x"), cfg.at("y"));
  const Index n = std::stol(info_value(info, "n"));
  if (v.X.rows() != n) {
    throw InputError("model was fitted on " + std::to_string(n) + " subjects, data has " + std::to_string(v.X.rows()));
  }
  const KernelSpec kx = KernelSpec::parse(info_value(info, "kernel_x"));
  const KernelSpec ky = KernelSpec::parse(info_value(info, "kernel_y"));
  KccaOptions ko;
  ko.kappa = parse_double(info_value(info, "kappa"));
  ko.m = std::stoi(info_value(info, "m"));
  ko.inner = parse_inner(info_value(info, "inner"));
  const Matrix W = to_matrix(file.section("weights"));
  if (W.rows() != n || W.cols() != 5) throw InputError("model weights section is malformed");
  CcaWeights w{W.col(0), W.col(1), W.col(2), W.col(3), W.col(4)};
  const CcaModel model = fit_weighted(gram(kx, v.X), gram(ky, v.Y), w, ko);

  const CsvTable& rho = file.section("rho");
  for (std::size_t j = 0; j < rho.rows.size(); ++j) {
    const double stored = parse_double(rho.rows[j][1]);
    if (static_cast<Index>(j) >= model.rho.size() || std::abs(model.rho(static_cast<Index>(j)) - stored) > 1e-8) {
      throw InputError("model and data are inconsistent (rho_" + std::to_string(j + 1) + " does not reproduce)");
    }
  }
  const int component = cfg.at("component");
  if (component > model.rho.size()) {
    throw InputError("--component " + std::to_string(component) + " out of range (model has " +
                     std::to_string(model.rho.size()) + ")");
  }
  KccaInfluenceOptions io;
  io.form = cfg.at("form") == "asymptotic" ? IfRhoForm::Asymptotic : IfRhoForm::Regularized;
  io.functions = false;
  const InfluenceReport r = influence_report(model, component - 1, io, cfg.at("multiplier"));

  CsvTable t;
  t.meta = make_meta(cfg);
  if (v.seed) t.meta.set("data_seed", *v.seed);
  t.meta.set("threshold", "center " + format_double(r.threshold_rule.center) + " scale " +
                              format_double(r.threshold_rule.scale) + " basis " + r.threshold_rule.basis);
  t.columns = {"subject_index", "eif_rho", "flag"};
  std::size_t flagged = 0;
  for (Index i = 0; i < n; ++i) {
    const bool f = r.outlier_flags[static_cast<std::size_t>(i)];
    flagged += f;
    t.rows.push_back({std::to_string(i), format_double(r.eif_rho(i)), f ? "1" : "0"});
  }
  write_csv(out, t);
  log << "component " << component << ": " << flagged << " of " << n << " subjects flagged\n";
}

// -------------------------------------------------------------- bench

struct BenchFlags {
  std::string table;
  std::string scale = "desk";
  std::uint64_t seed = 1;
  int replicates = 0;
  std::string kernel;
};

json bench_config(const BenchFlags& f) {
  if (f.table != "t1" && f.table != "t2" && f.table != "t3" && f.table != "fig4") {
    throw InputError("--table must be t1, t2, t3 or fig4");
  }
  if (f.scale != "desk" && f.scale != "full") throw InputError("--scale must be desk or full");
  if (f.replicates < 0) throw InputError("--replicates must be positive");
  json cfg{{"command", "bench"}, {"table", f.table}, {"scale", f.scale}, {"seed", f.seed}};
  if (f.replicates > 0) cfg["replicates"] = f.replicates;
  if (!f.kernel.empty()) {
    if (f.table != "fig4") throw InputError("--kernel applies to fig4 only");
    cfg["kernel"] = KernelSpec::parse(f.kernel).to_string();
  }
  return cfg;
}

void exec_bench(const json& cfg, const std::string& out, int threads, std::ostream& log) {
  const std::string which = cfg.at("table");
  const Scale scale = cfg.at("scale") == "full" ? Scale::Full : Scale::Desk;
  const std::uint64_t seed = cfg.at("seed");
  const int reps = cfg.value("replicates", 0);
  auto setup = [&](auto c) {
    c.seed = seed;
    c.threads = threads;
    if (reps > 0) c.replicates = reps;
    return c;
  };
  Table table;
  if (which == "t1") {
    table = run_table1(setup(Table1Config::at(scale)));
  } else if (which == "t2") {
    table = run_table2(setup(Table2Config::at(scale)));
  } else if (which == "t3") {
    table = run_table3(setup(Table3Config::at(scale)));
  } else {
    Fig4Config c = setup(Fig4Config::at(scale));
    if (cfg.contains("kernel")) c.kernel = KernelSpec::parse(cfg.at("kernel"));
    table = run_fig4(c);
  }
  CsvTable t;
  t.meta = make_meta(cfg);
  t.columns = table.columns;
  t.rows = table.rows;
  write_csv(out, t);
  log << "wrote " << t.rows.size() << " rows to " << out << '\n';
}

// ------------------------------------------------------------- replay

void exec_any(const json& cfg, const std::string& out, int threads, std::ostream& log) {
  const std::string cmd = cfg.at("command");
  if (cmd == "gen") exec_gen(cfg, out, log);
  else if (cmd == "fit") exec_fit(cfg, out, log);
  else if (cmd == "influence") exec_influence(cfg, out, log);
  else if (cmd == "bench") exec_bench(cfg, out, threads, log);
  else throw InputError("unknown command '" + cmd + "' in config header");
}

void exec_replay(const std::string& file, const std::string& out, int threads, std::ostream& log) {
  const auto header = parse_meta(read_file(file)).get("config");
  if (!header) throw InputError("'" + file + "' has no '# config:' header line");
  json cfg;
  try {
    cfg = json::parse(*header);
  } catch (const json::exception& e) {
    throw InputError(std::string("unreadable config header: ") + e.what());
  }
  exec_any(cfg, out, threads, log);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust kernel CCA: data generation, fitting, influence reports and benchmarks", "rkcca"};
  app.set_config("--config", "", "TOML/INI file; options go under [gen], [fit], [influence] or [bench]");
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path;
  int threads = default_threads();

  GenFlags gf;
  std::map<std::string, std::optional<double>> gen_numbers{
      {"noise_sd", {}}, {"contaminated_noise_sd", {}}, {"box", {}}, {"within", {}}, {"cross", {}},
      {"contaminated_mean", {}}, {"dim", {}}, {"signal", {}}, {"noise", {}}, {"contaminated_noise", {}},
      {"sparsity", {}}, {"snp_dim", {}}, {"voxel_dim", {}}, {"snp_cut", {}}};
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--dataset", gf.dataset, "tcsd, sfsd, mgsd, scfsd or smsd")->required();
  gen->add_option("--n", gf.n, "rows (tcsd: total or n1,n2,n3)");
  gen->add_option("--contamination", gf.contamination, "none, mixture:RATE or shift");
  gen->add_option("--seed", gf.seed, "seed");
  gen->add_option("--law", gf.law, "tcsd outlier law: box or angle");
  for (auto& [key, value] : gen_numbers) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    gen->add_option(flag, value, "dataset parameter");
  }
  gen->add_option("--out", out_path, "output prefix (PREFIX.x.csv, PREFIX.y.csv, PREFIX.manifest.csv)")->required();

  FitFlags ff;
  auto* fit = app.add_subcommand("fit", "Fit standard or robust kernel CCA");
  fit->add_option("--data", ff.data, "dataset prefix written by gen");
  fit->add_option("--x", ff.x, "X view CSV");
  fit->add_option("--y", ff.y, "Y view CSV");
  fit->add_option("--method", ff.method, "standard or robust");
  fit->add_option("--kernel-x", ff.kernel_x, "kernel for X");
  fit->add_option("--kernel-y", ff.kernel_y, "kernel for Y");
  fit->add_option("--loss", ff.loss, "robust loss spec");
  fit->add_option("--kappa", ff.kappa, "regularization");
  fit->add_option("--m", ff.m, "number of canonical pairs");
  fit->add_option("--weighting", ff.weighting, "shared or separate");
  fit->add_option("--centering", ff.centering, "robust or uniform");
  fit->add_option("--inner", ff.inner, "operator or printed");
  fit->add_option("--tol", ff.tol, "KIRWLS relative objective tolerance");
  fit->add_option("--weight-tol", ff.weight_tol, "KIRWLS weight tolerance");
  fit->add_option("--max-iter", ff.max_iter, "KIRWLS iteration cap");
  fit->add_option("--out", out_path, "model file")->required();

  InfluenceFlags inf;
  auto* influence = app.add_subcommand("influence", "Index plot of the influence on rho_j");
  influence->add_option("--model", inf.model, "model file written by fit")->required();
  influence->add_option("--data", inf.data, "dataset prefix (default: the model's data)");
  influence->add_option("--x", inf.x, "X view CSV");
  influence->add_option("--y", inf.y, "Y view CSV");
  influence->add_option("--component", inf.component, "canonical component, 1-based");
  influence->add_option("--form", inf.form, "regularized or asymptotic");
  influence->add_option("--multiplier", inf.multiplier, "MAD multiplier of the outlier rule");
  influence->add_option("--out", out_path, "output CSV")->required();

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Run a benchmark table");
  bench->add_option("--table", bf.table, "t1, t2, t3 or fig4")->required();
  bench->add_option("--scale", bf.scale, "desk or full");
  bench->add_option("--seed", bf.seed, "base seed");
  bench->add_option("--replicates", bf.replicates, "override the replicate count");
  bench->add_option("--kernel", bf.kernel, "fig4 kernel");
  bench->add_option("--threads", threads, "worker threads (default RKCCA_THREADS or 1)");
  bench->add_option("--out", out_path, "output CSV")->required();

  std::string replay_file;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a file's config header");
  replay->add_option("file", replay_file, "any file written by rkcca")->required();
  replay->add_option("--threads", threads, "worker threads");
  replay->add_option("--out", out_path, "output path (prefix for gen)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUserError;
  }
  if (threads < 1) {
    err << "error: --threads must be at least 1\n";
    return kUserError;
  }

  try {
    if (gen->parsed()) {
      for (const auto& [key, value] : gen_numbers) {
        if (value) gf.numbers[key] = *value;
      }
      exec_gen(gen_config(gf), out_path, out);
    } else if (fit->parsed()) {
      exec_fit(fit_config(ff), out_path, out);
    } else if (influence->parsed()) {
      exec_influence(influence_config(inf), out_path, out);
    } else if (bench->parsed()) {
      exec_bench(bench_config(bf), out_path, threads, out);
    } else if (replay->parsed()) {
      exec_replay(replay_file, out_path, threads, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const DegenerateDataError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const json::exception& e) {
    err << "error: bad config: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace rkcca
