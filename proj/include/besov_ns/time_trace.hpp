#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "besov_ns/field.hpp"

namespace besov_ns {

/// Time-sampled sequence of fields on one grid, t_0 < t_1 < ... < t_M.
class TimeTrace {
public:
    explicit TimeTrace(const TorusGrid& grid) : grid_(grid) {}

    TimeTrace(const TorusGrid& grid, std::vector<double> times, std::vector<FourierField> fields)
        : grid_(grid), times_(std::move(times)), fields_(std::move(fields)) {
        if (times_.size() != fields_.size()) throw std::invalid_argument("TimeTrace: times/fields size mismatch");
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!(fields_[i].grid() == grid_)) throw std::invalid_argument("TimeTrace: field on a different grid");
            if (i > 0 && !(times_[i] > times_[i - 1])) {
                throw std::invalid_argument("TimeTrace: times must be strictly increasing");
            }
        }
    }

    void push_back(double t, FourierField f) {
        if (!(f.grid() == grid_)) throw std::invalid_argument("TimeTrace::push_back: field on a different grid");
        if (!times_.empty() && !(t > times_.back())) {
            throw std::invalid_argument("TimeTrace::push_back: times must be strictly increasing");
        }
        times_.push_back(t);
        fields_.push_back(std::move(f));
    }

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    const std::vector<double>& times() const { return times_; }
    double time(std::size_t i) const { return times_.at(i); }
    const FourierField& field(std::size_t i) const { return fields_.at(i); }
    FourierField& field(std::size_t i) { return fields_.at(i); }
    const std::vector<FourierField>& fields() const { return fields_; }

    double start() const { return times_.front(); }
    double end() const { return times_.back(); }

    /// Samples with index < count.
    TimeTrace prefix(std::size_t count) const {
        count = std::min(count, size());
        return TimeTrace(grid_, std::vector<double>(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(count)),
                         std::vector<FourierField>(fields_.begin(), fields_.begin() + static_cast<std::ptrdiff_t>(count)));
    }

    /// Samples with t <= horizon (plus a tolerance of one part in 1e12).
    TimeTrace up_to(double horizon) const {
        std::size_t count = 0;
        while (count < size() && times_[count] <= horizon * (1.0 + 1e-12)) ++count;
        return prefix(count);
    }

private:
    TorusGrid grid_;
    std::vector<double> times_;
    std::vector<FourierField> fields_;
};

/// Pointwise (sample-wise) difference of two traces on identical time grids.
inline TimeTrace trace_difference(const TimeTrace& a, const TimeTrace& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trace_difference: sample count mismatch");
    TimeTrace out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.time(i) != b.time(i)) throw std::invalid_argument("trace_difference: time grids differ");
        out.push_back(a.time(i), a.field(i) - b.field(i));
    }
    return out;
}

}  // namespace besov_ns
