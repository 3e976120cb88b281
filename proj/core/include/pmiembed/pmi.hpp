#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pmiembed/cooccurrence.hpp"

namespace pmiembed {

// ln(x_ij * |D| / (x_i* * x_*j)). Throws DomainError unless every argument is
// positive; unobserved cells go through smoothed_pmi instead.
double pmi(double cooccurrence, double row_sum, double col_sum, double total);

// PMI the cell would have with a count of 1.
double smoothed_pmi(double row_sum, double col_sum, double total);

// Read-only PMI view over a co-occurrence matrix with cached logarithms of
// the marginals. Rows or columns with a zero marginal are degenerate: they
// have no defined PMI and the trainer leaves their cells out of the loss.
class PmiStats {
public:
    explicit PmiStats(const CooccurrenceMatrix& cooc);

    const CooccurrenceMatrix& matrix() const noexcept { return *cooc_; }
    double total() const noexcept { return cooc_->total(); }
    double log_total() const noexcept { return log_total_; }

    bool degenerate_row(std::size_t i) const { return !std::isfinite(log_row_[i]); }
    bool degenerate_col(std::size_t j) const { return !std::isfinite(log_col_[j]); }
    std::span<const double> log_row_sums() const noexcept { return log_row_; }
    std::span<const double> log_col_sums() const noexcept { return log_col_; }

    // Same values as pmi()/smoothed_pmi(), evaluated from the cached logs.
    double observed(std::size_t i, std::size_t j, double x) const {
        return std::log(x) + log_total_ - log_row_[i] - log_col_[j];
    }
    double unobserved(std::size_t i, std::size_t j) const {
        return log_total_ - log_row_[i] - log_col_[j];
    }

private:
    const CooccurrenceMatrix* cooc_;
    double log_total_;
    std::vector<double> log_row_;
    std::vector<double> log_col_;
};

}  // namespace pmiembed
