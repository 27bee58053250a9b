#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crowdroute/dqn/mlp.hpp"
#include "crowdroute/errors.hpp"
#include "crowdroute/features.hpp"

namespace crowdroute::dqn {

/// A Q-network bound to the size class it was trained for.
struct QModel {
    int n_requests = 0;
    int n_crowdsourcees = 0;
    Mlp net;
    Adam optimizer;
    std::string fingerprint;  // summary of the training configuration

    std::size_t feature_length() const { return state_size(n_requests, n_crowdsourcees); }

    void check_profile(const ProblemInstance& inst) const {
        if (inst.num_requests() != n_requests || inst.num_crowdsourcees() != n_crowdsourcees)
            throw ProfileError("model was trained for " + std::to_string(n_requests) + " requests / " +
                               std::to_string(n_crowdsourcees) + " crowdsourcees, instance has " +
                               std::to_string(inst.num_requests()) + " / " +
                               std::to_string(inst.num_crowdsourcees()));
    }
};

inline constexpr char kModelMagic[8] = {'C', 'R', 'D', 'Q', 'N', 'M', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError("header", "truncated model file");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

// Row-major, host byte order (little-endian on all supported targets).
inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

inline void read_matrix(std::istream& in, Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("weights", "truncated weight data");
            m(r, c) = v;
        }
}

inline void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline void read_vector(std::istream& in, Eigen::VectorXd& v) {
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
        throw ParseError("weights", "truncated bias data");
}

inline void write_params(std::ostream& out, const std::vector<Eigen::MatrixXd>& w,
                         const std::vector<Eigen::VectorXd>& b) {
    for (std::size_t l = 0; l < w.size(); ++l) {
        write_matrix(out, w[l]);
        write_vector(out, b[l]);
    }
}

inline void read_params(std::istream& in, std::vector<Eigen::MatrixXd>& w, std::vector<Eigen::VectorXd>& b) {
    for (std::size_t l = 0; l < w.size(); ++l) {
        read_matrix(in, w[l]);
        read_vector(in, b[l]);
    }
}

}  // namespace detail

/// Binary container: magic, version, JSON header (profile, layer sizes, optimizer state
/// metadata, fingerprint), then row-major weights/biases per layer followed by the Adam
/// first and second moments in the same order.
inline void save_model(const QModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const auto& adam = model.optimizer.config();
    const nlohmann::json header = {
        {"n_requests", model.n_requests},
        {"n_crowdsourcees", model.n_crowdsourcees},
        {"feature_length", model.feature_length()},
        {"layer_sizes", model.net.sizes()},
        {"adam", {{"learning_rate", adam.learning_rate}, {"beta1", adam.beta1}, {"beta2", adam.beta2},
                  {"epsilon", adam.epsilon}, {"step", model.optimizer.step()}}},
        {"fingerprint", model.fingerprint},
    };
    const std::string text = header.dump();
    out.write(kModelMagic, sizeof kModelMagic);
    detail::write_u32(out, kModelVersion);
    detail::write_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    detail::write_params(out, model.net.weights(), model.net.biases());
    detail::write_params(out, model.optimizer.first_moment().weights, model.optimizer.first_moment().biases);
    detail::write_params(out, model.optimizer.second_moment().weights, model.optimizer.second_moment().biases);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline QModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[sizeof kModelMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
        throw ParseError("magic", "not a crowdroute model file");
    const std::uint32_t version = detail::read_u32(in);
    if (version != kModelVersion) throw ParseError("version", "unsupported model version " + std::to_string(version));
    const std::uint32_t len = detail::read_u32(in);
    if (len > (1u << 24)) throw ParseError("header", "implausible header length");
    std::string text(len, '\0');
    if (!in.read(text.data(), len)) throw ParseError("header", "truncated model header");

    nlohmann::json header;
    QModel model;
    std::vector<int> sizes;
    AdamConfig adam;
    std::int64_t step = 0;
    try {
        header = nlohmann::json::parse(text);
        model.n_requests = header.at("n_requests").get<int>();
        model.n_crowdsourcees = header.at("n_crowdsourcees").get<int>();
        sizes = header.at("layer_sizes").get<std::vector<int>>();
        const auto& a = header.at("adam");
        adam = {a.at("learning_rate").get<double>(), a.at("beta1").get<double>(), a.at("beta2").get<double>(),
                a.at("epsilon").get<double>()};
        step = a.at("step").get<std::int64_t>();
        model.fingerprint = header.at("fingerprint").get<std::string>();
        if (header.at("feature_length").get<std::size_t>() != model.feature_length())
            throw ParseError("feature_length", "feature length does not match the profile");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("header", std::string("corrupt model header: ") + e.what());
    }
    if (sizes.size() < 2 || sizes.front() != static_cast<int>(model.feature_length()))
        throw ParseError("layer_sizes", "layer sizes do not match the profile");

    model.net = Mlp(sizes, 0);
    model.optimizer = Adam(model.net, adam);
    model.optimizer.set_step(step);
    detail::read_params(in, model.net.weights(), model.net.biases());
    detail::read_params(in, model.optimizer.first_moment().weights, model.optimizer.first_moment().biases);
    detail::read_params(in, model.optimizer.second_moment().weights, model.optimizer.second_moment().biases);
    return model;
}

}  // namespace crowdroute::dqn
