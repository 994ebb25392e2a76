#include "deeplink/random.hpp"

#include <stdexcept>

namespace deeplink {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("alias table: empty distribution");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("alias table: negative weight");
        sum += w;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("alias table: total weight must be positive");

    prob_.resize(n);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * double(n) / sum;

    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = n; i-- > 0;) {
        if (scaled[i] < 1.0)
            small.push_back(static_cast<std::uint32_t>(i));
        else
            large.push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        std::uint32_t s = small.back();
        small.pop_back();
        std::uint32_t l = large.back();
        large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] += scaled[s] - 1.0;
        if (scaled[l] < 1.0)
            small.push_back(l);
        else
            large.push_back(l);
    }
    // leftovers are 1 up to rounding
    while (!large.empty()) {
        prob_[large.back()] = 1.0;
        large.pop_back();
    }
    while (!small.empty()) {
        prob_[small.back()] = 1.0;
        small.pop_back();
    }
}

std::size_t AliasTable::sample(Rng& rng) const {
    const std::size_t k = uniform_below(rng, prob_.size());
    return uniform01(rng) < prob_[k] ? k : alias_[k];
}

}  // namespace deeplink
