#include "botdetect/ml/preprocess.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace botdetect::ml {

std::string_view to_string(Scaling s) {
  return s == Scaling::kMinMax ? "minmax" : "standardize";
}

std::string_view to_string(Imputation i) {
  return i == Imputation::kMean ? "mean" : "-1";
}

Scaling parse_scaling(std::string_view s) {
  if (s == "minmax") return Scaling::kMinMax;
  if (s == "standardize") return Scaling::kStandardize;
  throw std::invalid_argument("unknown scaling '" + std::string(s) + "'");
}

Imputation parse_imputation(std::string_view s) {
  if (s == "mean") return Imputation::kMean;
  if (s == "-1" || s == "minus_one" || s == "constant") return Imputation::kMinusOne;
  throw std::invalid_argument("unknown imputation '" + std::string(s) + "'");
}

void PcaEmbedding::fit(const Matrix& x) {
  const Eigen::Index d = x.cols();
  const int c = static_cast<int>(std::min<Eigen::Index>(components_, d));
  mean_ = x.colwise().mean().transpose();
  Matrix centered = x.rowwise() - mean_.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) /
                        std::max<double>(1.0, static_cast<double>(x.rows()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  basis_.resize(d, c);
  for (int k = 0; k < c; ++k) {
    // Eigenvalues come back ascending.
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big) < 0) v = -v;
    basis_.col(k) = v;
  }
}

Matrix PcaEmbedding::transform(const Matrix& x) const {
  Matrix centered = x.rowwise() - mean_.transpose();
  return centered * basis_;
}

nlohmann::json PcaEmbedding::to_json() const {
  std::vector<double> mean(mean_.data(), mean_.data() + mean_.size());
  std::vector<std::vector<double>> basis;
  for (Eigen::Index k = 0; k < basis_.cols(); ++k) {
    std::vector<double> col(static_cast<std::size_t>(basis_.rows()));
    for (Eigen::Index i = 0; i < basis_.rows(); ++i) col[i] = basis_(i, k);
    basis.push_back(std::move(col));
  }
  return {{"kind", "pca"}, {"components", components_}, {"mean", mean},
          {"basis", basis}};
}

std::shared_ptr<PcaEmbedding> PcaEmbedding::from_json(const nlohmann::json& j) {
  auto out = std::make_shared<PcaEmbedding>(j.at("components").get<int>());
  auto mean = j.at("mean").get<std::vector<double>>();
  auto basis = j.at("basis").get<std::vector<std::vector<double>>>();
  out->mean_ = Eigen::Map<Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  out->basis_.resize(static_cast<Eigen::Index>(mean.size()),
                     static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t i = 0; i < mean.size(); ++i)
      out->basis_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          basis[k][i];
  return out;
}

Preprocessor Preprocessor::fit(const Matrix& raw, const PreprocessOptions& options,
                               Diagnostics* diag) {
  if (raw.rows() == 0) throw std::invalid_argument("Preprocessor::fit: no rows");
  Preprocessor p;
  p.options_ = options;
  const auto d = static_cast<std::size_t>(raw.cols());
  p.offset_.assign(d, 0.0);
  p.scale_.assign(d, 0.0);
  p.fill_.assign(d, 0.0);
  p.observed_.assign(d, false);

  for (std::size_t c = 0; c < d; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    std::size_t n = 0;
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
      const double v = raw(r, static_cast<Eigen::Index>(c));
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++n;
    }
    if (n == 0) {
      if (diag && options.imputation == Imputation::kMean)
        diag->warn("column " + std::to_string(c) +
                   " has no observed values; imputing 0");
      continue;
    }
    p.observed_[c] = true;
    const double mean = sum / static_cast<double>(n);
    p.fill_[c] = mean;
    if (options.scaling == Scaling::kMinMax) {
      p.offset_[c] = lo;
      p.scale_[c] = hi - lo;
    } else {
      double sq = 0.0;
      for (Eigen::Index r = 0; r < raw.rows(); ++r) {
        const double v = raw(r, static_cast<Eigen::Index>(c));
        if (!std::isnan(v)) sq += (v - mean) * (v - mean);
      }
      p.offset_[c] = mean;
      p.scale_[c] = std::sqrt(sq / static_cast<double>(n));
    }
  }

  if (options.embed) {
    auto pca = std::make_shared<PcaEmbedding>(2);
    Preprocessor no_embed = p;
    no_embed.options_.embed = false;
    pca->fit(no_embed.transform(raw));
    p.embedding_ = std::move(pca);
  }
  return p;
}

Matrix Preprocessor::transform(const Matrix& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != offset_.size())
    throw std::invalid_argument("Preprocessor::transform: column count mismatch");
  Matrix out(raw.rows(), raw.cols());
  const bool minus_one = options_.imputation == Imputation::kMinusOne;
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < offset_.size(); ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      double v = raw(r, ci);
      if (std::isnan(v) && minus_one) {
        out(r, ci) = -1.0;
        continue;
      }
      if (!observed_[c]) {
        out(r, ci) = 0.0;
        continue;
      }
      if (std::isnan(v)) v = fill_[c];
      out(r, ci) = scale_[c] > 0.0 ? (v - offset_[c]) / scale_[c] : 0.0;
    }
  }
  if (options_.embed && embedding_) return embedding_->transform(out);
  return out;
}

nlohmann::json Preprocessor::to_json() const {
  nlohmann::json j = {{"scaling", to_string(options_.scaling)},
                      {"imputation", to_string(options_.imputation)},
                      {"embed", options_.embed},
                      {"offset", offset_},
                      {"scale", scale_},
                      {"fill", fill_},
                      {"observed", observed_}};
  if (embedding_) j["embedding"] = embedding_->to_json();
  return j;
}

Preprocessor Preprocessor::from_json(const nlohmann::json& j) {
  Preprocessor p;
  p.options_.scaling = parse_scaling(j.at("scaling").get<std::string>());
  p.options_.imputation = parse_imputation(j.at("imputation").get<std::string>());
  p.options_.embed = j.at("embed").get<bool>();
  p.offset_ = j.at("offset").get<std::vector<double>>();
  p.scale_ = j.at("scale").get<std::vector<double>>();
  p.fill_ = j.at("fill").get<std::vector<double>>();
  p.observed_ = j.at("observed").get<std::vector<bool>>();
  if (j.contains("embedding")) p.embedding_ = PcaEmbedding::from_json(j.at("embedding"));
  return p;
}

}  // namespace botdetect::ml
