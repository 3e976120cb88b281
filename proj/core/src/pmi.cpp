#include "pmiembed/pmi.hpp"

#include <limits>
#include <string>

#include "pmiembed/error.hpp"

namespace pmiembed {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw DomainError(std::string("PMI argument ") + name + " must be positive, got " +
                          std::to_string(v));
    }
}

}  // namespace

double pmi(double cooccurrence, double row_sum, double col_sum, double total) {
    require_positive(cooccurrence, "x_ij");
    require_positive(row_sum, "x_i*");
    require_positive(col_sum, "x_*j");
    require_positive(total, "|D|");
    return std::log(cooccurrence * total / (row_sum * col_sum));
}

double smoothed_pmi(double row_sum, double col_sum, double total) {
    return pmi(1.0, row_sum, col_sum, total);
}

PmiStats::PmiStats(const CooccurrenceMatrix& cooc) : cooc_(&cooc) {
    if (!(cooc.total() > 0.0)) {
        throw DomainError("co-occurrence matrix is empty (|D| = 0)");
    }
    log_total_ = std::log(cooc.total());
    auto log_or_nan = [](double s) {
        return s > 0.0 ? std::log(s) : std::numeric_limits<double>::quiet_NaN();
    };
    log_row_.reserve(cooc.n());
    log_col_.reserve(cooc.n());
    for (double s : cooc.row_sums()) {
        log_row_.push_back(log_or_nan(s));
    }
    for (double s : cooc.col_sums()) {
        log_col_.push_back(log_or_nan(s));
    }
}

}  // namespace pmiembed
