#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace crowdroute::dqn {

/// One transition. States are kept in single precision; encoded features are bounded.
struct Experience {
    std::vector<float> state;
    int action = 0;
    double reward = 0.0;
    std::vector<float> next_state;
};

/// Bounded FIFO of experiences; a push at capacity evicts the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
        data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    void push(Experience e) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(e));
        } else {
            data_[head_] = std::move(e);
            head_ = (head_ + 1) % capacity_;
        }
        ++pushed_;
    }

    std::uint64_t total_pushed() const { return pushed_; }

    /// i-th stored experience counted from the oldest.
    const Experience& at(std::size_t i) const { return data_.at((head_ + i) % data_.size()); }

    /// Uniform sample of `n` distinct slots (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const {
        if (n > data_.size()) throw std::invalid_argument("minibatch larger than replay buffer");
        std::vector<std::size_t> chosen;
        chosen.reserve(n);
        const std::size_t total = data_.size();
        for (std::size_t j = total - n; j < total; ++j) {
            const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
            const bool taken = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
            chosen.push_back(taken ? j : t);
        }
        return chosen;
    }

    /// Direct slot access for sampled indices.
    const Experience& slot(std::size_t i) const { return data_[i]; }

private:
    std::size_t capacity_;
    std::vector<Experience> data_;
    std::size_t head_ = 0;
    std::uint64_t pushed_ = 0;
};

}  // namespace crowdroute::dqn
