#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdroute/errors.hpp"

namespace crowdroute::dqn {

/// Fully connected network: rectifier on hidden layers, identity on the output layer.
/// Samples are columns.
class Mlp {
public:
    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
    };

    // Post-activation outputs of every layer; [0] is the input batch.
    struct Cache {
        std::vector<Eigen::MatrixXd> activations;
    };

    Mlp() = default;

    /// Uniform fan-in initialization U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
        if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output layer");
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
            std::uniform_real_distribution<double> init(-bound, bound);
            Eigen::MatrixXd w(sizes_[l + 1], sizes_[l]);
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = init(rng);
            Eigen::VectorXd b(sizes_[l + 1]);
            for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = init(rng);
            weights_.push_back(std::move(w));
            biases_.push_back(std::move(b));
        }
    }

    const std::vector<int>& sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    std::size_t num_layers() const { return weights_.size(); }

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
        return n;
    }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
        Cache unused;
        return forward(x, unused, false);
    }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache, bool keep = true) const {
        if (x.rows() != input_size())
            throw ProfileError("network expects " + std::to_string(input_size()) + " inputs, got " +
                               std::to_string(x.rows()));
        if (keep) {
            cache.activations.clear();
            cache.activations.push_back(x);
        }
        Eigen::MatrixXd a = x;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            Eigen::MatrixXd z = weights_[l] * a;
            z.colwise() += biases_[l];
            if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
            a = std::move(z);
            if (keep) cache.activations.push_back(a);
        }
        return a;
    }

    Eigen::VectorXd forward(std::span<const double> x) const {
        const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
        return forward(Eigen::MatrixXd(v)).col(0);
    }

    /// Single-sample output given the first layer's pre-activation W0 x + b0.
    Eigen::VectorXd forward_from_first(const Eigen::VectorXd& z0) const {
        Eigen::VectorXd a = z0;
        for (std::size_t l = 1; l < weights_.size(); ++l) {
            a = a.cwiseMax(0.0);
            a = weights_[l] * a + biases_[l];
        }
        return a;
    }

    /// Gradients of a scalar loss given its derivative with respect to the output batch.
    Gradients backward(const Cache& cache, const Eigen::MatrixXd& d_out) const {
        Gradients g;
        const std::size_t n = weights_.size();
        g.weights.resize(n);
        g.biases.resize(n);
        Eigen::MatrixXd delta = d_out;
        for (std::size_t l = n; l-- > 0;) {
            const Eigen::MatrixXd& input = cache.activations[l];
            g.weights[l] = delta * input.transpose();
            g.biases[l] = delta.rowwise().sum();
            if (l == 0) break;
            Eigen::MatrixXd back = weights_[l].transpose() * delta;
            // rectifier derivative, taken as 0 at the kink
            delta = back.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
        }
        return g;
    }

    friend bool operator==(const Mlp& a, const Mlp& b) {
        if (a.sizes_ != b.sizes_) return false;
        for (std::size_t l = 0; l < a.weights_.size(); ++l)
            if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
        return true;
    }

private:
    std::vector<int> sizes_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam moment estimates for one network.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, AdamConfig cfg) : cfg_(cfg) {
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            m_.weights.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
            m_.biases.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
        }
        v_ = m_;
    }

    const AdamConfig& config() const { return cfg_; }
    std::int64_t step() const { return step_; }
    Mlp::Gradients& first_moment() { return m_; }
    const Mlp::Gradients& first_moment() const { return m_; }
    Mlp::Gradients& second_moment() { return v_; }
    const Mlp::Gradients& second_moment() const { return v_; }
    void set_step(std::int64_t s) { step_ = s; }

    void update(Mlp& net, const Mlp::Gradients& g) {
        ++step_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        auto apply = [&](auto& param, auto& m, auto& v, const auto& grad) {
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
            param.array() -= cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
        };
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            apply(net.weights()[l], m_.weights[l], v_.weights[l], g.weights[l]);
            apply(net.biases()[l], m_.biases[l], v_.biases[l], g.biases[l]);
        }
    }

private:
    AdamConfig cfg_;
    Mlp::Gradients m_;
    Mlp::Gradients v_;
    std::int64_t step_ = 0;
};

/// Quadratic inside |err| < 1, linear outside.
inline double huber(double err) {
    const double a = std::abs(err);
    return a < 1.0 ? 0.5 * err * err : a - 0.5;
}

inline double huber_derivative(double err) {
    if (std::abs(err) < 1.0) return err;
    return err > 0.0 ? 1.0 : -1.0;
}

/// Mean Huber loss of Q(s, a) against fixed targets and its gradient with respect to the
/// network output batch. `q` is outputs x batch.
struct TdLoss {
    double loss = 0.0;
    double mean_q = 0.0;
    Eigen::MatrixXd d_out;
};

inline TdLoss td_loss(const Eigen::MatrixXd& q, std::span<const int> actions, std::span<const double> targets) {
    TdLoss res;
    const auto batch = static_cast<double>(q.cols());
    res.d_out = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const double predicted = q(actions[i], i);
        const double err = targets[i] - predicted;
        res.loss += huber(err) / batch;
        res.mean_q += predicted / batch;
        res.d_out(actions[i], i) = -huber_derivative(err) / batch;
    }
    return res;
}

}  // namespace crowdroute::dqn
