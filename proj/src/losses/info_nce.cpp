#include "noisypairs/losses/info_nce.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "noisypairs/losses/feature_map.hpp"

namespace noisypairs::losses {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

void check_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be positive, got " + std::to_string(temperature));
  }
}

void check_unit_rows(const ConstRowMap& rows, const char* what) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double norm = rows.row(r).norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw std::invalid_argument(std::string(what) + " row " + std::to_string(r) +
                                  " is not unit-normalized (norm " + std::to_string(norm) + ")");
    }
  }
}

ConstRowMap as_rows(std::span<const double> values, int dim, const char* what) {
  if (dim <= 0 || values.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument(std::string(what) + " size is not a multiple of dim");
  }
  return ConstRowMap(values.data(), static_cast<Eigen::Index>(values.size() / dim), dim);
}

}  // namespace

InfoNceBatch info_nce_batch(std::span<const double> queries, std::span<const double> positives,
                            std::span<const double> negatives, int dim, double temperature) {
  check_temperature(temperature);
  const auto q = as_rows(queries, dim, "queries");
  const auto k = as_rows(positives, dim, "positives");
  const auto n = as_rows(negatives, dim, "negatives");
  if (q.rows() != k.rows()) throw std::invalid_argument("queries and positives differ in count");
  if (q.rows() == 0) throw std::invalid_argument("empty batch");
  check_unit_rows(q, "query");
  check_unit_rows(k, "positive");
  check_unit_rows(n, "negative");

  const Eigen::Index batch = q.rows();
  const Eigen::Index num_neg = n.rows();

  // Column 0 is the positive logit, columns 1..K the negatives.
  RowMatrix logits(batch, 1 + num_neg);
  logits.col(0) = (q.array() * k.array()).rowwise().sum() / temperature;
  if (num_neg > 0) logits.rightCols(num_neg) = q * n.transpose() / temperature;

  InfoNceBatch out;
  RowMatrix grad_logits(batch, 1 + num_neg);
  double total = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double shift = logits.row(b).maxCoeff();
    const Eigen::RowVectorXd shifted = (logits.row(b).array() - shift).exp();
    const double sum = shifted.sum();
    total += shift + std::log(sum) - logits(b, 0);
    grad_logits.row(b) = shifted / sum;
    grad_logits(b, 0) -= 1.0;
  }
  out.loss = total / static_cast<double>(batch);
  grad_logits /= static_cast<double>(batch) * temperature;

  RowMatrix grad_q = grad_logits.col(0).asDiagonal() * k;
  if (num_neg > 0) grad_q += grad_logits.rightCols(num_neg) * n;
  const RowMatrix grad_k = grad_logits.col(0).asDiagonal() * q;
  out.grad_queries.assign(grad_q.data(), grad_q.data() + grad_q.size());
  out.grad_positives.assign(grad_k.data(), grad_k.data() + grad_k.size());
  return out;
}

InfoNceGradients info_nce_with_gradients(std::span<const double> query,
                                         std::span<const double> positive,
                                         std::span<const double> negatives, double temperature) {
  check_temperature(temperature);
  const int dim = static_cast<int>(query.size());
  if (dim == 0 || positive.size() != query.size()) {
    throw std::invalid_argument("query and positive must have the same nonzero dimension");
  }
  const auto q = as_rows(query, dim, "query");
  const auto k = as_rows(positive, dim, "positive");
  const auto n = as_rows(negatives, dim, "negatives");
  check_unit_rows(q, "query");
  check_unit_rows(k, "positive");
  check_unit_rows(n, "negative");

  const Eigen::Index num_neg = n.rows();
  Eigen::RowVectorXd logits(1 + num_neg);
  logits(0) = q.row(0).dot(k.row(0)) / temperature;
  if (num_neg > 0) logits.tail(num_neg) = q.row(0) * n.transpose() / temperature;

  const double shift = logits.maxCoeff();
  Eigen::RowVectorXd prob = (logits.array() - shift).exp();
  const double sum = prob.sum();
  prob /= sum;

  InfoNceGradients out;
  out.loss = shift + std::log(sum) - logits(0);

  // dL/ds_i = softmax_i − [i = 0]
  Eigen::RowVectorXd grad_logits = prob;
  grad_logits(0) -= 1.0;
  grad_logits /= temperature;

  Eigen::RowVectorXd grad_q = grad_logits(0) * k.row(0);
  if (num_neg > 0) grad_q += grad_logits.tail(num_neg) * n;
  const Eigen::RowVectorXd grad_k = grad_logits(0) * q.row(0);
  out.query.assign(grad_q.data(), grad_q.data() + dim);
  out.positive.assign(grad_k.data(), grad_k.data() + dim);
  out.negatives.resize(static_cast<std::size_t>(num_neg) * dim);
  for (Eigen::Index i = 0; i < num_neg; ++i) {
    for (int c = 0; c < dim; ++c) out.negatives[i * dim + c] = grad_logits(1 + i) * q(0, c);
  }
  return out;
}

double info_nce(std::span<const double> query, std::span<const double> positive,
                std::span<const double> negatives, double temperature) {
  return info_nce_with_gradients(query, positive, negatives, temperature).loss;
}

}  // namespace noisypairs::losses
