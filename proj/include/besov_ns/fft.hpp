#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace besov_ns::detail {

// The FFTW planner is not reentrant; plan creation and destruction take this lock.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place complex DFT of a d-dimensional cube of side m, owning an aligned
/// buffer and a forward/backward plan pair. Forward is unnormalized
/// (sum u e^{-ikx}); callers apply the 1/m^d factor.
class FftEngine {
public:
    FftEngine(int dim, int side) : dim_(dim), side_(side) {
        size_ = 1;
        for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(side);
        buf_ = fftw_alloc_complex(size_);
        if (buf_ == nullptr) throw std::bad_alloc();
        std::vector<int> dims(static_cast<std::size_t>(dim), side);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft(dim, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(dim, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("FftEngine: plan creation failed");
    }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    ~FftEngine() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    std::size_t size() const { return size_; }
    int side() const { return side_; }
    int dim() const { return dim_; }

    std::span<std::complex<double>> buffer() {
        return {reinterpret_cast<std::complex<double>*>(buf_), size_};
    }

    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

private:
    int dim_;
    int side_;
    std::size_t size_ = 0;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Per-thread engine cache: one workspace per (dimension, side) per thread.
inline FftEngine& engine(int dim, int side) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<FftEngine>> cache;
    auto& slot = cache[{dim, side}];
    if (!slot) slot = std::make_unique<FftEngine>(dim, side);
    return *slot;
}

}  // namespace besov_ns::detail
