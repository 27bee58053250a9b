#include <gtest/gtest.h>

#include "support.hpp"

using namespace crowdroute;
using namespace crowdroute::dqn;

namespace {

// Scalar loss of the network on a batch, for finite differences.
double batch_loss(const Mlp& net, const Eigen::MatrixXd& x, const std::vector<int>& actions,
                  const std::vector<double>& targets) {
    return td_loss(net.forward(x), actions, targets).loss;
}

}  // namespace

TEST(Mlp, ZeroWeightsGiveZero) {
    Mlp net({4, 8, 3}, 1);
    for (auto& w : net.weights()) w.setZero();
    for (auto& b : net.biases()) b.setZero();
    const std::vector<double> x{0.3, -1.0, 2.0, 0.5};
    const auto y = net.forward(std::span<const double>(x));
    for (Eigen::Index i = 0; i < y.size(); ++i) EXPECT_EQ(y(i), 0.0);
}

TEST(Mlp, HandComputedForward) {
    Mlp net({2, 2, 1}, 1);
    net.weights()[0] << 1, -1, 2, 0.5;
    net.biases()[0] << 0, -10;
    net.weights()[1] << 3, 7;
    net.biases()[1] << 0.25;
    const std::vector<double> x{2, 1};
    // hidden = relu([1, -5.5]) = [1, 0]
    EXPECT_DOUBLE_EQ(net.forward(std::span<const double>(x))(0), 3.25);
}

TEST(Mlp, ShapesAndInitBounds) {
    Mlp net({363, 128, 128, 128, 5}, 7);
    EXPECT_EQ(net.num_layers(), 4u);
    EXPECT_EQ(net.parameter_count(), 363u * 128 + 128 + 2 * (128 * 128 + 128) + 128 * 5 + 5);
    EXPECT_LE(net.weights()[0].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(363.0));
    EXPECT_EQ(Mlp({3, 4, 2}, 9), Mlp({3, 4, 2}, 9));
    EXPECT_FALSE(Mlp({3, 4, 2}, 9) == Mlp({3, 4, 2}, 10));
    EXPECT_THROW(Mlp({3}, 1), std::invalid_argument);
}

TEST(Huber, Values) {
    EXPECT_DOUBLE_EQ(huber(0.5), 0.125);
    EXPECT_DOUBLE_EQ(huber(-0.5), 0.125);
    EXPECT_DOUBLE_EQ(huber(2.0), 1.5);
    EXPECT_DOUBLE_EQ(huber(-2.0), 1.5);
    EXPECT_NEAR(huber(1.0 - 1e-12), huber(1.0 + 1e-12), 1e-11);
    EXPECT_NEAR(huber_derivative(1.0 - 1e-12), huber_derivative(1.0 + 1e-12), 1e-11);
    EXPECT_DOUBLE_EQ(huber_derivative(-3.0), -1.0);
}

TEST(TdLoss, OnlySelectedActionGetsGradient) {
    Eigen::MatrixXd q(3, 2);
    q << 1, 4, 2, 5, 3, 6;
    const std::vector<int> a{1, 2};
    const std::vector<double> t{2.5, 6.0};
    const auto res = td_loss(q, a, t);
    // errors 0.5 and 0.0
    EXPECT_DOUBLE_EQ(res.loss, 0.125 / 2);
    EXPECT_DOUBLE_EQ(res.mean_q, (2.0 + 6.0) / 2);
    EXPECT_DOUBLE_EQ(res.d_out(1, 0), -0.25);
    EXPECT_EQ(res.d_out.cwiseAbs().sum(), 0.25);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int net_id = 0; net_id < 5; ++net_id) {
        Mlp net({6, 7, 5, 4}, 100 + net_id);
        Eigen::MatrixXd x(6, 5);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
        std::vector<int> actions{0, 1, 2, 3, 1};
        std::vector<double> targets;
        for (int i = 0; i < 5; ++i) targets.push_back(g(rng) * 3);
        Mlp::Cache cache;
        const auto q = net.forward(x, cache);
        const auto grads = net.backward(cache, td_loss(q, actions, targets).d_out);
        const double h = 1e-6;
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            for (Eigen::Index i = 0; i < net.weights()[l].size(); ++i) {
                double& w = net.weights()[l](i);
                const double keep = w;
                w = keep + h;
                const double up = batch_loss(net, x, actions, targets);
                w = keep - h;
                const double down = batch_loss(net, x, actions, targets);
                w = keep;
                const double fd = (up - down) / (2 * h);
                const double an = grads.weights[l](i);
                EXPECT_LE(std::abs(fd - an), 1e-4 * std::max({1.0, std::abs(fd), std::abs(an)}));
            }
            for (Eigen::Index i = 0; i < net.biases()[l].size(); ++i) {
                double& b = net.biases()[l](i);
                const double keep = b;
                b = keep + h;
                const double up = batch_loss(net, x, actions, targets);
                b = keep - h;
                const double down = batch_loss(net, x, actions, targets);
                b = keep;
                EXPECT_NEAR((up - down) / (2 * h), grads.biases[l](i), 1e-6);
            }
        }
    }
}

TEST(Adam, FirstStepMovesBySignTimesRate) {
    Mlp net({2, 1}, 1);
    const Mlp start = net;
    Adam opt(net, {0.01, 0.9, 0.999, 1e-8});
    Mlp::Gradients g;
    g.weights.push_back(Eigen::MatrixXd(1, 2));
    g.weights[0] << 3.0, -0.5;
    g.biases.push_back(Eigen::VectorXd::Constant(1, 0.0));
    opt.update(net, g);
    EXPECT_EQ(opt.step(), 1);
    EXPECT_NEAR(net.weights()[0](0, 0), start.weights()[0](0, 0) - 0.01, 1e-9);
    EXPECT_NEAR(net.weights()[0](0, 1), start.weights()[0](0, 1) + 0.01, 1e-9);
    EXPECT_DOUBLE_EQ(net.biases()[0](0), start.biases()[0](0));
}

TEST(Adam, FitsLinearTarget) {
    Mlp net({1, 16, 1}, 2);
    Adam opt(net, {0.01, 0.9, 0.999, 1e-8});
    Eigen::MatrixXd x(1, 20);
    std::vector<double> y;
    std::vector<int> a(20, 0);
    for (int i = 0; i < 20; ++i) {
        x(0, i) = i / 10.0 - 1.0;
        y.push_back(2.0 * x(0, i) + 0.5);
    }
    double first = 0, last = 0;
    for (int it = 0; it < 2000; ++it) {
        Mlp::Cache cache;
        const auto q = net.forward(x, cache);
        const auto res = td_loss(q, a, y);
        if (it == 0) first = res.loss;
        last = res.loss;
        opt.update(net, net.backward(cache, res.d_out));
    }
    EXPECT_LT(last, 1e-3);
    EXPECT_LT(last, first / 100);
}
