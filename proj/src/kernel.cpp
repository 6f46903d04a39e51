#include "rkcca/kernel.hpp"

#include "rkcca/csv.hpp"
#include "rkcca/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace rkcca {

KernelSpec KernelSpec::linear() {
  KernelSpec s;
  s.family = KernelFamily::Linear;
  return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  KernelSpec s;
  s.family = KernelFamily::Polynomial;
  s.degree = degree;
  s.offset = offset;
  return s;
}

KernelSpec KernelSpec::gaussian(double bandwidth) {
  KernelSpec s;
  s.family = KernelFamily::Gaussian;
  s.bandwidth = bandwidth;
  return s;
}

KernelSpec KernelSpec::gaussian_median() {
  KernelSpec s = gaussian(1.0);
  s.median_bandwidth = true;
  return s;
}

KernelSpec KernelSpec::laplacian(double bandwidth, Metric metric) {
  KernelSpec s;
  s.family = KernelFamily::Laplacian;
  s.bandwidth = bandwidth;
  s.metric = metric;
  return s;
}

void KernelSpec::validate() const {
  if (family == KernelFamily::Polynomial && degree < 1) {
    throw InputError("polynomial kernel degree must be >= 1");
  }
  if ((family == KernelFamily::Gaussian || family == KernelFamily::Laplacian) &&
      !median_bandwidth && !(bandwidth > 0.0 && std::isfinite(bandwidth))) {
    throw InputError("kernel bandwidth must be finite and positive");
  }
  if (!std::isfinite(offset)) throw InputError("polynomial offset must be finite");
}

bool KernelSpec::bounded() const noexcept {
  return family == KernelFamily::Gaussian || family == KernelFamily::Laplacian;
}

std::string KernelSpec::to_string() const {
  std::ostringstream os;
  switch (family) {
    case KernelFamily::Linear: os << "linear"; break;
    case KernelFamily::Polynomial:
      os << "poly:" << degree;
      if (offset != 1.0) os << ':' << format_double(offset);
      break;
    case KernelFamily::Gaussian:
      os << "gaussian:";
      if (median_bandwidth) os << "median"; else os << format_double(bandwidth);
      break;
    case KernelFamily::Laplacian:
      os << "laplacian:" << format_double(bandwidth);
      if (metric == Metric::L2) os << ":l2";
      break;
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("cannot parse number '" + s + "' in kernel spec '" + context + "'");
  }
}

}  // namespace

KernelSpec KernelSpec::parse(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& name = parts[0];
  KernelSpec s;
  if (name == "linear" || name == "poly1" || name == "poly-1") {
    if (parts.size() != 1) throw InputError("linear kernel takes no parameters");
    s = linear();
  } else if (name == "poly" || name == "polynomial") {
    if (parts.size() < 2 || parts.size() > 3) throw InputError("usage: poly:<degree>[:<offset>]");
    const double deg = parse_number(parts[1], text);
    if (deg != std::floor(deg)) throw InputError("polynomial degree must be an integer");
    s = polynomial(static_cast<int>(deg), parts.size() == 3 ? parse_number(parts[2], text) : 1.0);
  } else if (name == "gaussian" || name == "rbf") {
    if (parts.size() == 1 || (parts.size() == 2 && parts[1] == "median")) {
      s = gaussian_median();
    } else if (parts.size() == 2) {
      s = gaussian(parse_number(parts[1], text));
    } else {
      throw InputError("usage: gaussian[:median|:<bandwidth>]");
    }
  } else if (name == "laplacian") {
    s = laplacian(parts.size() >= 2 ? parse_number(parts[1], text) : 1.0);
    if (parts.size() == 3) {
      if (parts[2] == "l2") s.metric = Metric::L2;
      else if (parts[2] == "l1") s.metric = Metric::L1;
      else throw InputError("laplacian metric must be l1 or l2");
    } else if (parts.size() > 3) {
      throw InputError("usage: laplacian[:<bandwidth>[:l1|l2]]");
    }
  } else {
    throw InputError("unknown kernel '" + text + "'");
  }
  s.validate();
  return s;
}

namespace {

void check_finite(const Matrix& X) {
  if (X.rows() < 1 || X.cols() < 1) throw InputError("data matrix must be non-empty");
  if (!X.allFinite()) throw InputError("data matrix contains non-finite entries");
}

}  // namespace

KernelSpec resolve(const KernelSpec& spec, const Matrix& X) {
  spec.validate();
  KernelSpec out = spec;
  if (spec.family == KernelFamily::Gaussian && spec.median_bandwidth) {
    out.bandwidth = median_bandwidth(X);
    out.median_bandwidth = false;
  }
  return out;
}

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                    const Eigen::Ref<const Vector>& b) {
  switch (spec.family) {
    case KernelFamily::Linear: return a.dot(b);
    case KernelFamily::Polynomial: return std::pow(a.dot(b) + spec.offset, spec.degree);
    case KernelFamily::Gaussian: {
      const double s = spec.bandwidth;
      return std::exp(-(a - b).squaredNorm() / (2.0 * s * s));
    }
    case KernelFamily::Laplacian: {
      const double d = spec.metric == Metric::L1 ? (a - b).lpNorm<1>() : (a - b).norm();
      return std::exp(-d / spec.bandwidth);
    }
  }
  return 0.0;
}

Matrix gram(const KernelSpec& spec, const Matrix& X) {
  check_finite(X);
  if (spec.median_bandwidth) throw ContractError("kernel must be resolved before building a Gram matrix");
  spec.validate();
  const Index n = X.rows();
  const Matrix Xt = X.transpose();
  Matrix K(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v = kernel_value(spec, Xt.col(i), Xt.col(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& A, const Matrix& B) {
  check_finite(A);
  check_finite(B);
  if (A.cols() != B.cols()) throw ContractError("cross_gram: dimension mismatch");
  if (spec.median_bandwidth) throw ContractError("kernel must be resolved before building a Gram matrix");
  spec.validate();
  const Matrix At = A.transpose();
  const Matrix Bt = B.transpose();
  Matrix K(A.rows(), B.rows());
  for (Index j = 0; j < B.rows(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) K(i, j) = kernel_value(spec, At.col(i), Bt.col(j));
  }
  return K;
}

double median_bandwidth(const Matrix& X) {
  check_finite(X);
  const Index n = X.rows();
  if (n < 2) throw DegenerateDataError("median bandwidth needs at least two points");
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  const Matrix Xt = X.transpose();
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double dist = (Xt.col(i) - Xt.col(j)).norm();
      if (dist > 0.0) d.push_back(dist);
    }
  }
  if (d.empty()) throw DegenerateDataError("median bandwidth: all points are identical");
  return lower_median(std::move(d));
}

void check_simplex(const Vector& w, double tol) {
  if (w.size() == 0) throw ContractError("weight vector is empty");
  if (!w.allFinite()) throw ContractError("weight vector has non-finite entries");
  if (w.minCoeff() < -tol) throw ContractError("weight vector has negative entries");
  if (std::abs(w.sum() - 1.0) > tol) throw ContractError("weights do not sum to one");
}

WeightedCenteredGram center(const Matrix& K, const Vector& w) {
  if (K.rows() != K.cols()) throw ContractError("center: Gram matrix must be square");
  if (w.size() != K.rows()) throw ContractError("center: weight length mismatch");
  check_simplex(w);
  const Vector Kw = K * w;
  const double wKw = w.dot(Kw);
  const Index n = K.rows();
  Matrix C(n, n);
  // symmetric by construction: entry (i, j) and (j, i) use the same expression
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v = K(i, j) - Kw(i) - Kw(j) + wKw;
      C(i, j) = v;
      C(j, i) = v;
    }
  }
  return {K, w, std::move(C)};
}

Matrix center_test(const Matrix& K_test, const Matrix& K, const Vector& w) {
  if (K.rows() != K.cols() || K_test.cols() != K.rows() || w.size() != K.rows()) {
    throw ContractError("center_test: shape mismatch");
  }
  check_simplex(w);
  const Vector Kw = K * w;          // (w^T K)^T, K symmetric
  const double wKw = w.dot(Kw);
  const Vector Ktw = K_test * w;    // per test point
  Matrix out = K_test;
  out.rowwise() -= Kw.transpose();
  out.colwise() -= Ktw;
  out.array() += wKw;
  return out;
}

Vector center_test_diagonal(const Vector& self, const Matrix& K_test, const Matrix& K,
                            const Vector& w) {
  if (self.size() != K_test.rows() || K_test.cols() != K.rows() || w.size() != K.rows()) {
    throw ContractError("center_test_diagonal: shape mismatch");
  }
  const double wKw = w.dot(K * w);
  return (self - 2.0 * (K_test * w)).array() + wKw;
}

}  // namespace rkcca
