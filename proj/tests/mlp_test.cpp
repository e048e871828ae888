#include <random>

#include <gtest/gtest.h>

#include "mln/content.hpp"
#include "mln/error.hpp"
#include "mln/io.hpp"

using namespace mln;

namespace {

std::vector<Example> random_batch(std::mt19937_64& rng, Eigen::Index dim, std::size_t count) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Example> out;
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) x[j] = noise(rng);
    out.push_back({x, static_cast<PrivacyLabel>(i % 3)});
  }
  return out;
}

// Three Gaussian blobs in 2-D, centres 4 apart with sigma 0.5.
std::vector<Example> clusters(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  const double centres[3][2] = {{0, 0}, {4, 0}, {2, 3.5}};
  std::vector<Example> out;
  for (std::size_t i = 0; i < per_class; ++i)
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd x(2);
      x << centres[c][0] + noise(rng), centres[c][1] + noise(rng);
      out.push_back({x, static_cast<PrivacyLabel>(c)});
    }
  return out;
}

double accuracy(const MlpModel& m, const std::vector<Example>& data) {
  std::size_t hit = 0;
  for (const auto& e : data) hit += mlp_predict(m, e.x) == e.y;
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

}  // namespace

TEST(MlpForward, ZeroModelIsUniform) {
  const auto m = MlpModel::zeros(4, 3, 2);
  const auto p = mlp_forward(m, Eigen::VectorXd::Random(4));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], 1.0 / 3.0, 1e-15);
}

TEST(MlpForward, BiasOnlyLogits) {
  auto m = MlpModel::zeros(4, 3, 2);
  m.b3 << std::log(2.0), 0.0, 0.0;
  const auto p = mlp_forward(m, Eigen::VectorXd::Ones(4));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
}

TEST(MlpForward, ShiftInvarianceAndArgmax) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    auto m = MlpModel::random(6, 5, 4, rng());
    m.b3 = Eigen::VectorXd::Random(3);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(6);
    const auto before = mlp_forward(m, x);
    const auto label = mlp_predict(m, x);
    m.b3.array() += 7.25;
    EXPECT_LT((mlp_forward(m, x) - before).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(mlp_predict(m, x), label);
  }
}

TEST(MlpForward, SoftmaxSumsToOne) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto in = static_cast<Eigen::Index>(1 + rng() % 12);
    const auto m = MlpModel::random(in, 1 + rng() % 8, 1 + rng() % 8, rng());
    const Eigen::VectorXd x = 5.0 * Eigen::VectorXd::Random(in);
    EXPECT_NEAR(mlp_forward(m, x).sum(), 1.0, 1e-9);
  }
}

TEST(MlpForward, ShapeMismatch) {
  const auto m = MlpModel::zeros(4, 3, 2);
  EXPECT_THROW(mlp_forward(m, Eigen::VectorXd::Zero(5)), Error);
}

TEST(GradientCheck, SmallModel) {
  std::mt19937_64 rng(3);
  const auto m = MlpModel::random(8, 5, 4, 17);
  EXPECT_LT(gradient_check(m, random_batch(rng, 8, 6)), 1e-4);
}

TEST(GradientCheck, RandomShapes) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto in = static_cast<Eigen::Index>(1 + rng() % 10);
    auto m = MlpModel::random(in, 1 + rng() % 7, 1 + rng() % 7, rng());
    m.b1 = 0.1 * Eigen::VectorXd::Random(m.b1.size());
    m.b2 = 0.1 * Eigen::VectorXd::Random(m.b2.size());
    EXPECT_LT(gradient_check(m, random_batch(rng, in, 1 + rng() % 8)), 1e-4) << "shape " << t;
  }
}

TEST(GradientCheck, ZeroInputs) {
  auto m = MlpModel::random(5, 4, 3, 9);
  m.b1.setConstant(0.3);
  m.b2.setConstant(0.2);
  std::vector<Example> batch = {{Eigen::VectorXd::Zero(5), PrivacyLabel::HiPC},
                                {Eigen::VectorXd::Zero(5), PrivacyLabel::LoPC}};
  EXPECT_LT(gradient_check(m, batch), 1e-4);
}

TEST(GradientCheck, DetectsCorruptedGradient) {
  std::mt19937_64 rng(5);
  const auto m = MlpModel::random(8, 5, 4, 11);
  const double err = gradient_check(m, random_batch(rng, 8, 6),
                                    [](MlpGradients& g) { g.w2.array() += 1.0; });
  EXPECT_GT(err, 1e-1);
}

TEST(MlpTrain, SeparatesThreeClusters) {
  const auto data = clusters(20, 6);
  TrainOptions opt;
  opt.hidden1 = 16;
  opt.hidden2 = 8;
  opt.epochs = 200;
  opt.seed = 3;
  const auto result = mlp_train(data, opt);
  EXPECT_GE(accuracy(result.model, data), 0.95);
  EXPECT_LT(result.epoch_loss.back(), result.epoch_loss.front());
}

TEST(MlpTrain, DeterministicGivenSeed) {
  const auto data = clusters(10, 7);
  TrainOptions opt;
  opt.hidden1 = 6;
  opt.hidden2 = 4;
  opt.epochs = 5;
  const auto a = mlp_train(data, opt);
  const auto b = mlp_train(data, opt);
  EXPECT_EQ(a.model.w1, b.model.w1);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

TEST(MlpTrain, ZeroLearningRateKeepsInitialWeights) {
  const auto data = clusters(5, 8);
  TrainOptions opt;
  opt.hidden1 = 6;
  opt.hidden2 = 4;
  opt.learning_rate = 0.0;
  opt.epochs = 3;
  const auto result = mlp_train(data, opt);
  const auto init = MlpModel::random(2, 6, 4, opt.seed);
  EXPECT_EQ(result.model.w1, init.w1);
  EXPECT_EQ(result.model.w3, init.w3);
  EXPECT_EQ(result.model.b3, init.b3);
}

TEST(MlpTrain, FullBatchLossNeverRises) {
  const auto data = clusters(10, 9);
  TrainOptions opt;
  opt.hidden1 = 8;
  opt.hidden2 = 6;
  opt.learning_rate = 0.02;
  opt.batch_size = data.size();
  opt.epochs = 60;
  const auto result = mlp_train(data, opt);
  for (std::size_t e = 1; e < result.epoch_loss.size(); ++e)
    EXPECT_LE(result.epoch_loss[e], result.epoch_loss[e - 1] + 1e-12) << "epoch " << e;
}

TEST(MlpTrain, DuplicatedDataGivesSameFullBatchModel) {
  const auto data = clusters(8, 10);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  TrainOptions opt;
  opt.hidden1 = 6;
  opt.hidden2 = 5;
  opt.epochs = 20;
  opt.batch_size = data.size();
  auto twice = opt;
  twice.batch_size = doubled.size();

  MlpGradients g1, g2;
  const auto m = MlpModel::random(2, 6, 5, 1);
  mlp_loss(m, data, &g1);
  mlp_loss(m, doubled, &g2);
  EXPECT_LT((g1.w1 - g2.w1).cwiseAbs().maxCoeff(), 1e-12);

  const auto a = mlp_train(data, opt);
  const auto b = mlp_train(doubled, twice);
  EXPECT_LT((a.model.w1 - b.model.w1).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((a.model.w3 - b.model.w3).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MlpTrain, EmptyClassIsRejected) {
  auto data = clusters(5, 11);
  std::erase_if(data, [](const Example& e) { return e.y == PrivacyLabel::MePC; });
  try {
    mlp_train(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::training);
  }
}

TEST(MlpModel, JsonRoundTrip) {
  const auto m = MlpModel::random(5, 4, 3, 12);
  const auto back = io::mlp_from_json(io::Json::parse(io::to_json(m).dump()));
  EXPECT_EQ(back.w1, m.w1);
  EXPECT_EQ(back.w2, m.w2);
  EXPECT_EQ(back.b3, m.b3);
}

TEST(PrivacyLayer, Examples) {
  auto l = build_privacy_layer({{1, PrivacyLabel::HiPC}, {2, PrivacyLabel::HiPC}, {3, PrivacyLabel::LoPC}}, 4);
  EXPECT_EQ(l.groups.at("HiPC"), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(l.groups.at("LoPC"), (std::vector<NodeId>{3}));
  EXPECT_EQ(l.edge_count(), 1u);

  std::map<NodeId, PrivacyLabel> all;
  for (NodeId u = 0; u < 9; ++u) all[u] = PrivacyLabel::MePC;
  EXPECT_EQ(build_privacy_layer(all, 9).edge_count(), 36u);
  EXPECT_TRUE(build_privacy_layer({}, 5).groups.empty());
}
