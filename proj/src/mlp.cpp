#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mln/content.hpp"
#include "mln/error.hpp"

namespace mln {

std::string_view to_string(PrivacyLabel label) {
  switch (label) {
    case PrivacyLabel::LoPC: return "LoPC";
    case PrivacyLabel::MePC: return "MePC";
    case PrivacyLabel::HiPC: return "HiPC";
  }
  return "?";
}

std::optional<PrivacyLabel> parse_privacy_label(std::string_view text) {
  for (auto l : {PrivacyLabel::LoPC, PrivacyLabel::MePC, PrivacyLabel::HiPC})
    if (to_string(l) == text) return l;
  return std::nullopt;
}

MlpModel MlpModel::zeros(Eigen::Index input, Eigen::Index h1, Eigen::Index h2) {
  MlpModel m;
  m.w1 = Eigen::MatrixXd::Zero(h1, input);
  m.b1 = Eigen::VectorXd::Zero(h1);
  m.w2 = Eigen::MatrixXd::Zero(h2, h1);
  m.b2 = Eigen::VectorXd::Zero(h2);
  m.w3 = Eigen::MatrixXd::Zero(kPrivacyClasses, h2);
  m.b3 = Eigen::VectorXd::Zero(kPrivacyClasses);
  return m;
}

MlpModel MlpModel::random(Eigen::Index input, Eigen::Index h1, Eigen::Index h2,
                          std::uint64_t seed) {
  MlpModel m = zeros(input, h1, h2);
  std::mt19937_64 rng(seed);
  auto he = [&](Eigen::MatrixXd& w) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(w.cols())));
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  };
  he(m.w1);
  he(m.w2);
  he(m.w3);
  return m;
}

void MlpModel::validate() const {
  const bool ok = w1.rows() == b1.size() && w2.cols() == w1.rows() && w2.rows() == b2.size() &&
                  w3.cols() == w2.rows() && w3.rows() == kPrivacyClasses &&
                  b3.size() == kPrivacyClasses;
  if (!ok) throw Error(Errc::shape, "MLP layer shapes do not chain");
}

std::size_t MlpModel::parameter_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size() +
                                  b3.size());
}

namespace {

template <class Fn>
void visit_all(Fn&& fn, Eigen::MatrixXd& w1, Eigen::VectorXd& b1, Eigen::MatrixXd& w2,
               Eigen::VectorXd& b2, Eigen::MatrixXd& w3, Eigen::VectorXd& b3) {
  auto each = [&](auto& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) fn(x.data()[i]);
  };
  each(w1);
  each(b1);
  each(w2);
  each(b2);
  each(w3);
  each(b3);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

void MlpModel::for_each_parameter(const std::function<void(double&)>& fn) {
  visit_all(fn, w1, b1, w2, b2, w3, b3);
}

void MlpGradients::for_each(const std::function<void(double&)>& fn) {
  visit_all(fn, w1, b1, w2, b2, w3, b3);
}

Eigen::Vector3d mlp_forward(const MlpModel& m, const Eigen::VectorXd& x) {
  m.validate();
  if (x.size() != m.input_size())
    throw Error(Errc::shape,
                fmt::format("input has {} features, model expects {}", x.size(), m.input_size()));
  const Eigen::VectorXd a1 = (m.w1 * x + m.b1).cwiseMax(0.0);
  const Eigen::VectorXd a2 = (m.w2 * a1 + m.b2).cwiseMax(0.0);
  return softmax(m.w3 * a2 + m.b3);
}

PrivacyLabel mlp_predict(const MlpModel& m, const Eigen::VectorXd& x) {
  Eigen::Index best = 0;
  mlp_forward(m, x).maxCoeff(&best);
  return static_cast<PrivacyLabel>(best);
}

double mlp_loss(const MlpModel& m, std::span<const Example> batch, MlpGradients* grads) {
  m.validate();
  if (batch.empty()) throw Error(Errc::training, "empty batch");
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(m.input_size(), b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto& xj = batch[static_cast<std::size_t>(j)].x;
    if (xj.size() != m.input_size())
      throw Error(Errc::shape, fmt::format("example has {} features, model expects {}", xj.size(),
                                           m.input_size()));
    x.col(j) = xj;
  }

  const Eigen::MatrixXd z1 = (m.w1 * x).colwise() + m.b1;
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  const Eigen::MatrixXd z2 = (m.w2 * a1).colwise() + m.b2;
  const Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  const Eigen::MatrixXd z3 = (m.w3 * a2).colwise() + m.b3;

  Eigen::MatrixXd delta3(kPrivacyClasses, b);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < b; ++j) {
    const Eigen::VectorXd p = softmax(z3.col(j));
    const int y = static_cast<int>(batch[static_cast<std::size_t>(j)].y);
    const double shift = z3.col(j).maxCoeff();
    const double log_sum = std::log((z3.col(j).array() - shift).exp().sum()) + shift;
    loss += log_sum - z3(y, j);
    delta3.col(j) = p;
    delta3(y, j) -= 1.0;
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  loss *= inv_b;
  if (!grads) return loss;

  delta3 *= inv_b;
  const Eigen::MatrixXd delta2 =
      ((m.w3.transpose() * delta3).array() * (z2.array() > 0.0).cast<double>()).matrix();
  const Eigen::MatrixXd delta1 =
      ((m.w2.transpose() * delta2).array() * (z1.array() > 0.0).cast<double>()).matrix();
  grads->w3 = delta3 * a2.transpose();
  grads->b3 = delta3.rowwise().sum();
  grads->w2 = delta2 * a1.transpose();
  grads->b2 = delta2.rowwise().sum();
  grads->w1 = delta1 * x.transpose();
  grads->b1 = delta1.rowwise().sum();
  return loss;
}

TrainResult mlp_train(std::span<const Example> data, const TrainOptions& options) {
  if (data.empty()) throw Error(Errc::training, "no training examples");
  std::array<std::size_t, kPrivacyClasses> per_class{};
  for (const auto& e : data) ++per_class[static_cast<std::size_t>(e.y)];
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c] == 0)
      throw Error(Errc::training, fmt::format("no training examples for class {}",
                                              to_string(static_cast<PrivacyLabel>(c))));
  if (options.batch_size == 0) throw Error(Errc::parameter, "batch size must be positive");

  TrainResult result;
  result.model = MlpModel::random(data.front().x.size(), options.hidden1, options.hidden2,
                                  options.seed);
  MlpModel& m = result.model;
  std::mt19937_64 rng(options.seed ^ 0x9E3779B97F4A7C15ULL);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  MlpGradients g;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(data[order[k]]);
      mlp_loss(m, batch, &g);
      const double lr = options.learning_rate;
      m.w1 -= lr * g.w1;
      m.b1 -= lr * g.b1;
      m.w2 -= lr * g.w2;
      m.b2 -= lr * g.b2;
      m.w3 -= lr * g.w3;
      m.b3 -= lr * g.b3;
    }
    result.epoch_loss.push_back(mlp_loss(m, data));
  }
  return result;
}

double gradient_check(const MlpModel& model, std::span<const Example> batch,
                      const std::function<void(MlpGradients&)>& tamper) {
  constexpr double h = 1e-5;
  MlpGradients analytic;
  mlp_loss(model, batch, &analytic);
  if (tamper) tamper(analytic);

  std::vector<double> flat;
  analytic.for_each([&](double& g) { flat.push_back(g); });

  MlpModel probe = model;
  std::vector<double*> params;
  probe.for_each_parameter([&](double& p) { params.push_back(&p); });

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + h;
    const double up = mlp_loss(probe, batch);
    *params[i] = saved - h;
    const double down = mlp_loss(probe, batch);
    *params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(flat[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(flat[i] - numeric) / denom);
  }
  return worst;
}

PartitionLayer build_privacy_layer(const std::map<NodeId, PrivacyLabel>& predictions,
                                   NodeId node_count, std::string name) {
  PartitionLayer layer;
  layer.feature = name;
  layer.name = std::move(name);
  layer.node_count = node_count;
  for (const auto& [user, label] : predictions) {
    if (user >= node_count)
      throw Error(Errc::out_of_range, fmt::format("prediction for unknown node {}", user));
    layer.groups[std::string(to_string(label))].push_back(user);
  }
  return layer;
}

}  // namespace mln
