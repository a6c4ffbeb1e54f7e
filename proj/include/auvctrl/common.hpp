#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace auvctrl {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Raised for invalid configuration values (files, overrides, filter settings).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0.0, -v.z(), v.y(),
        v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

/**
 * Run fn(i) for i in [begin, end) across `workers` threads with a static
 * index partition. Results must be written to per-index slots; any reduction
 * happens after the join, so the outcome is independent of scheduling. With
 * workers <= 1 the loop runs inline on the calling thread.
 *
 * The first exception thrown by any worker is rethrown on the caller.
 */
template <class F>
void parallel_for(int workers, int begin, int end, F&& fn) {
    const int total = end - begin;
    if (total <= 0) return;
    if (workers <= 1 || total == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }

    const int nw = std::min(workers, total);
    std::vector<std::exception_ptr> errors(nw);
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        threads.emplace_back([&, w] {
            try {
                // Strided assignment keeps per-worker load balanced even if
                // cost varies smoothly with the index.
                for (int i = begin + w; i < end; i += nw) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace auvctrl
