#include "botdetect/ml/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "botdetect/ml/kmeans.h"

namespace botdetect::ml {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kEmptyComponent = 1e-10;

// Per-component precomputed quantities for evaluating log densities.
struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det = 0.0;
};

std::vector<Factor> factorize(const GmmModel& m) {
  std::vector<Factor> out;
  if (m.covariance != CovarianceType::kFull) return out;
  out.resize(m.k());
  for (std::size_t c = 0; c < m.k(); ++c) {
    out[c].llt.compute(m.covariances[c]);
    if (out[c].llt.info() != Eigen::Success)
      throw std::runtime_error("gmm: covariance not positive definite");
    const Eigen::MatrixXd& l = out[c].llt.matrixL();
    double ld = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) ld += 2.0 * std::log(l(i, i));
    out[c].log_det = ld;
  }
  return out;
}

// n x k matrix of ln(w_c) + ln N(x_i | c).
Matrix weighted_log_density(const GmmModel& m, const Matrix& x) {
  const Eigen::Index n = x.rows();
  const auto k = static_cast<Eigen::Index>(m.k());
  const auto d = static_cast<double>(x.cols());
  Matrix out(n, k);
  if (m.covariance == CovarianceType::kDiagonal) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const Eigen::RowVectorXd var = m.variances.row(c);
      const double log_det = var.array().log().sum();
      const double lw = std::log(m.weights(c));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double maha =
            ((x.row(i) - m.means.row(c)).array().square() / var.array()).sum();
        out(i, c) = lw - 0.5 * (d * kLog2Pi + log_det + maha);
      }
    }
    return out;
  }
  const auto factors = factorize(m);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Factor& f = factors[static_cast<std::size_t>(c)];
    const double lw = std::log(m.weights(c));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd diff = (x.row(i) - m.means.row(c)).transpose();
      const Eigen::VectorXd z = f.llt.matrixL().solve(diff);
      out(i, c) = lw - 0.5 * (d * kLog2Pi + f.log_det + z.squaredNorm());
    }
  }
  return out;
}

// Normalizes each row in log space; returns per-row log-sum-exp.
Vector normalize_rows(Matrix& logp) {
  Vector lse(logp.rows());
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    const double mx = logp.row(i).maxCoeff();
    double s = 0.0;
    for (Eigen::Index c = 0; c < logp.cols(); ++c) s += std::exp(logp(i, c) - mx);
    lse(i) = mx + std::log(s);
    for (Eigen::Index c = 0; c < logp.cols(); ++c) logp(i, c) = std::exp(logp(i, c) - lse(i));
  }
  return lse;
}

// Closest covariance with every eigenvalue >= floor: the constrained
// maximizer of the Gaussian likelihood for scatter `s`.
Eigen::MatrixXd floor_eigenvalues(const Eigen::MatrixXd& s, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  out = 0.5 * (out + out.transpose());
  out.diagonal() = out.diagonal().cwiseMax(floor);
  return out;
}

Eigen::RowVectorXd column_variance(const Matrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return (x.rowwise() - mean).array().square().colwise().sum() /
         static_cast<double>(x.rows());
}

// M-step. `point_loglik` ranks candidate points for re-seeding empty
// components (lowest first).
void m_step(GmmModel& m, const Matrix& x, const Matrix& resp,
            const Vector& point_loglik) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto k = static_cast<Eigen::Index>(m.k());
  Vector nk = resp.colwise().sum().transpose();

  std::vector<Eigen::Index> reseed_order;
  std::size_t next_reseed = 0;
  Eigen::RowVectorXd data_var = column_variance(x);

  for (Eigen::Index c = 0; c < k; ++c) {
    if (nk(c) >= kEmptyComponent) {
      m.means.row(c) = (resp.col(c).transpose() * x) / nk(c);
      if (m.covariance == CovarianceType::kDiagonal) {
        Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
        for (Eigen::Index i = 0; i < n; ++i)
          var += resp(i, c) * (x.row(i) - m.means.row(c)).array().square().matrix();
        m.variances.row(c) = (var / nk(c)).cwiseMax(m.reg);
      } else {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
          Eigen::VectorXd diff = (x.row(i) - m.means.row(c)).transpose();
          cov.noalias() += resp(i, c) * diff * diff.transpose();
        }
        m.covariances[static_cast<std::size_t>(c)] = floor_eigenvalues(cov / nk(c), m.reg);
      }
      continue;
    }
    if (reseed_order.empty()) {
      reseed_order.resize(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) reseed_order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(reseed_order.begin(), reseed_order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return point_loglik(a) < point_loglik(b);
                       });
    }
    const Eigen::Index p = reseed_order[next_reseed % reseed_order.size()];
    ++next_reseed;
    ++m.reseeds;
    m.means.row(c) = x.row(p);
    if (m.covariance == CovarianceType::kDiagonal) {
      m.variances.row(c) = data_var.cwiseMax(m.reg);
    } else {
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      cov.diagonal() = data_var.transpose().cwiseMax(m.reg);
      m.covariances[static_cast<std::size_t>(c)] = cov;
    }
    nk(c) = 1.0;
  }
  m.weights = nk / nk.sum();
}

}  // namespace

std::string_view to_string(CovarianceType c) {
  return c == CovarianceType::kDiagonal ? "diagonal" : "full";
}

CovarianceType parse_covariance(std::string_view s) {
  if (s == "diagonal" || s == "diag") return CovarianceType::kDiagonal;
  if (s == "full") return CovarianceType::kFull;
  throw std::invalid_argument("unknown covariance type '" + std::string(s) + "'");
}

GmmModel gmm_fit(const Matrix& x, std::size_t k, std::uint64_t seed,
                 const GmmOptions& options) {
  if (k == 0) throw std::invalid_argument("gmm: k must be positive");
  if (k > static_cast<std::size_t>(x.rows()))
    throw std::invalid_argument("gmm: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(x.rows()) + " rows");
  if (!(options.reg > 0.0)) throw std::invalid_argument("gmm: reg must be positive");

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto kk = static_cast<Eigen::Index>(k);
  GmmModel m;
  m.covariance = options.covariance;
  m.reg = options.reg;
  m.seed = seed;
  m.means.resize(kk, d);
  if (m.covariance == CovarianceType::kDiagonal)
    m.variances.resize(kk, d);
  else
    m.covariances.assign(k, Eigen::MatrixXd::Zero(d, d));

  // Hard responsibilities from one k-means run seeded by k-means++.
  KMeansModel km = kmeans_fit(x, k, seed, KMeansOptions{.restarts = 1});
  const std::vector<int> labels = kmeans_predict(km, x);
  Matrix resp = Matrix::Zero(n, kk);
  for (Eigen::Index i = 0; i < n; ++i) resp(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  // Before any density exists, re-seed candidates are ranked by distance to
  // the nearest centroid (farthest first).
  Vector rank(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rank(i) = -(x.row(i) - km.centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  m_step(m, x, resp, rank);

  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    Matrix logp = weighted_log_density(m, x);
    const Vector lse = normalize_rows(logp);
    const double ll = lse.sum();
    m.log_likelihood_trace.push_back(ll);
    m.iterations = it + 1;
    if (it > 0 && ll - prev < options.tolerance) break;
    prev = ll;
    m_step(m, x, logp, lse);
  }
  return m;
}

Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x) {
  Matrix logp = weighted_log_density(model, x);
  normalize_rows(logp);
  return logp;
}

std::vector<int> gmm_predict(const GmmModel& model, const Matrix& x) {
  const Matrix logp = weighted_log_density(model, x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logp.cols(); ++c)
      if (logp(i, c) > logp(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double gmm_log_likelihood(const GmmModel& model, const Matrix& x) {
  Matrix logp = weighted_log_density(model, x);
  return normalize_rows(logp).sum();
}

std::size_t gmm_free_parameters(const GmmModel& model) {
  const std::size_t k = model.k();
  const std::size_t d = model.dims();
  const std::size_t cov = model.covariance == CovarianceType::kDiagonal
                              ? k * d
                              : k * d * (d + 1) / 2;
  return k * d + cov + (k - 1);
}

double gmm_bic(const GmmModel& model, const Matrix& x) {
  return static_cast<double>(gmm_free_parameters(model)) *
             std::log(static_cast<double>(x.rows())) -
         2.0 * gmm_log_likelihood(model, x);
}

namespace {

std::vector<std::vector<double>> rows_of(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  return out;
}

Eigen::MatrixXd matrix_of(const nlohmann::json& j) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r].at(c);
  return m;
}

}  // namespace

nlohmann::json GmmModel::to_json() const {
  nlohmann::json j = {{"kind", "gmm"},
                      {"k", k()},
                      {"covariance", to_string(covariance)},
                      {"reg", reg},
                      {"seed", seed},
                      {"iterations", iterations},
                      {"reseeds", reseeds},
                      {"weights", std::vector<double>(weights.data(), weights.data() + weights.size())},
                      {"means", rows_of(means)}};
  if (covariance == CovarianceType::kDiagonal) {
    j["variances"] = rows_of(variances);
  } else {
    nlohmann::json covs = nlohmann::json::array();
    for (const auto& c : covariances) covs.push_back(rows_of(c));
    j["covariances"] = covs;
  }
  j["log_likelihood_trace"] = log_likelihood_trace;
  return j;
}

GmmModel GmmModel::from_json(const nlohmann::json& j) {
  GmmModel m;
  m.covariance = parse_covariance(j.at("covariance").get<std::string>());
  m.reg = j.at("reg").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.iterations = j.at("iterations").get<int>();
  m.reseeds = j.value("reseeds", 0);
  auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  m.means = matrix_of(j.at("means"));
  if (m.covariance == CovarianceType::kDiagonal) {
    m.variances = matrix_of(j.at("variances"));
  } else {
    for (const auto& c : j.at("covariances")) m.covariances.push_back(matrix_of(c));
  }
  m.log_likelihood_trace = j.value("log_likelihood_trace", std::vector<double>{});
  return m;
}

}  // namespace botdetect::ml
