#pragma once

// Blocking error analysis for correlated Monte Carlo samples.

#include <cmath>
#include <cstddef>
#include <vector>

#include "hsvmc/errors.hpp"

namespace hsvmc {

/// Collects per-sweep samples into non-overlapping block means.
class BlockAccumulator {
  public:
    explicit BlockAccumulator(std::size_t block_size) : block_size_(block_size) {
        if (block_size == 0) throw DomainError("blocking: block size must be positive");
    }

    void add(double v) {
        sum_ += v;
        if (++count_ == block_size_) {
            means_.push_back(sum_ / double(block_size_));
            sum_ = 0.0;
            count_ = 0;
        }
    }

    const std::vector<double>& block_means() const { return means_; }

  private:
    std::size_t block_size_;
    double sum_ = 0.0;
    std::size_t count_ = 0;
    std::vector<double> means_;
};

struct BlockingResult {
    double mean = 0.0;
    double stderror = 0.0;
    double stderror_doubled = 0.0;  // same data at twice the block length
    std::size_t n_blocks = 0;
    bool converged = false;  // doubling left the error estimate stable
};

/// Mean and standard error of the mean from equal-length block means.  The
/// doubled-block error probes residual autocorrelation: it should not grow.
inline BlockingResult blocking_analysis(const std::vector<double>& block_means) {
    if (block_means.size() < 2) throw DomainError("blocking: need at least 2 blocks");
    BlockingResult r;
    r.n_blocks = block_means.size();
    for (double b : block_means) r.mean += b;
    r.mean /= double(r.n_blocks);
    double var = 0.0;
    for (double b : block_means) var += (b - r.mean) * (b - r.mean);
    var /= double(r.n_blocks - 1);
    r.stderror = std::sqrt(var / double(r.n_blocks));

    const std::size_t pairs = block_means.size() / 2;
    if (pairs >= 2) {
        double mean2 = 0.0;
        std::vector<double> doubled(pairs);
        for (std::size_t i = 0; i < pairs; ++i) {
            doubled[i] = 0.5 * (block_means[2 * i] + block_means[2 * i + 1]);
            mean2 += doubled[i];
        }
        mean2 /= double(pairs);
        double var2 = 0.0;
        for (double d : doubled) var2 += (d - mean2) * (d - mean2);
        var2 /= double(pairs - 1);
        r.stderror_doubled = std::sqrt(var2 / double(pairs));
        r.converged = r.stderror_doubled <= 1.5 * r.stderror + 1e-300;
    } else {
        r.stderror_doubled = r.stderror;
        r.converged = true;
    }
    return r;
}

}  // namespace hsvmc
