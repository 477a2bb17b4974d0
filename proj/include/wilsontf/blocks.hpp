#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wilsontf {

struct BlockPartition {
    double epsilon = 3;
    std::vector<std::size_t> cuts;  // m_0 < m_1 < ... < m_L
    std::vector<double> block_sums;
};

class BlockError : public std::runtime_error {
public:
    enum class Kind { exhausted, large_term };
    BlockError(Kind k, std::size_t index, const std::string& what) : std::runtime_error(what), kind(k), index(index) {}
    Kind kind;
    std::size_t index;
};

// Term source: returns a_n, or nullopt when the source has no more terms.
using SeriesSource = std::function<std::optional<double>(std::size_t)>;

// Greedy minimal cuts: every block closes at the first index where its sum
// exceeds epsilon/3. Terms past m_0 are < epsilon/3, so each sum stays below
// 2 epsilon/3. m_0 is the first index with a_n < epsilon/3 unless given.
inline BlockPartition partition_series(const SeriesSource& a, std::size_t blocks_wanted, double epsilon = 3,
                                       std::optional<std::size_t> m0 = std::nullopt,
                                       std::size_t max_terms = 50'000'000) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    const double third = epsilon / 3;
    BlockPartition p;
    p.epsilon = epsilon;
    std::size_t n = 0;
    auto term = [&](std::size_t i) -> double {
        if (i >= max_terms)
            throw BlockError(BlockError::Kind::exhausted, i,
                             "source exhausted after " + std::to_string(p.block_sums.size()) + " blocks (scan limit)");
        auto v = a(i);
        if (!v)
            throw BlockError(BlockError::Kind::exhausted, i,
                             "source exhausted after " + std::to_string(p.block_sums.size()) + " blocks");
        if (!(*v >= 0)) throw std::invalid_argument("terms must be non-negative (index " + std::to_string(i) + ")");
        return *v;
    };
    if (m0) {
        n = *m0;
    } else {
        while (term(n) >= third) ++n;
    }
    p.cuts.push_back(n);
    double sum = 0;
    while (p.block_sums.size() < blocks_wanted) {
        const double v = term(n);
        if (v >= third)
            throw BlockError(BlockError::Kind::large_term, n,
                             "term at index " + std::to_string(n) + " is not below epsilon/3");
        sum += v;
        ++n;
        if (sum > third) {
            p.cuts.push_back(n);
            p.block_sums.push_back(sum);
            sum = 0;
        }
    }
    return p;
}

inline BlockPartition partition_series(const std::vector<double>& a, std::size_t blocks_wanted, double epsilon = 3) {
    return partition_series(
        [&a](std::size_t i) -> std::optional<double> {
            if (i < a.size()) return a[i];
            return std::nullopt;
        },
        blocks_wanted, epsilon);
}

// Re-sums each block from the prefix and checks epsilon/3 < sum < epsilon strictly.
inline bool verify_partition(const std::vector<double>& prefix, const BlockPartition& p) {
    for (std::size_t i = 1; i < p.cuts.size(); ++i) {
        if (p.cuts[i] <= p.cuts[i - 1] || p.cuts[i] > prefix.size()) return false;
        double s = 0;
        for (std::size_t n = p.cuts[i - 1]; n < p.cuts[i]; ++n) s += prefix[n];
        if (!(s > p.epsilon / 3 && s < p.epsilon)) return false;
    }
    return true;
}

}  // namespace wilsontf
