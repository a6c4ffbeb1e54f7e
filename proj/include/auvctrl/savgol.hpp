#pragma once

#include <string>

#include "auvctrl/common.hpp"

namespace auvctrl {

/**
 * Central Savitzky-Golay smoothing weights: fit a polynomial of degree
 * poly_order to `window` equally spaced samples by least squares and
 * evaluate it at the window center. Returned as convolution coefficients
 * c (size window), ordered oldest to newest; sum(c) = 1.
 */
inline Eigen::VectorXd savgol_coefficients(int window, int poly_order) {
    if (window < 1 || window % 2 == 0) {
        throw ConfigError("savgol: window must be odd and positive, got " +
                          std::to_string(window));
    }
    if (poly_order < 0 || poly_order >= window) {
        throw ConfigError("savgol: poly_order must satisfy 0 <= poly_order < window");
    }

    const int half = window / 2;
    Eigen::MatrixXd a(window, poly_order + 1);
    for (int i = 0; i < window; ++i) {
        double p = 1.0;
        for (int j = 0; j <= poly_order; ++j) {
            a(i, j) = p;
            p *= static_cast<double>(i - half);
        }
    }

    // Center value of the fit: c = A (A^T A)^-1 e0, via an LDLT solve of the
    // normal equations (A^T A is small and positive definite).
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(poly_order + 1);
    e0[0] = 1.0;
    const Eigen::VectorXd z = (a.transpose() * a).ldlt().solve(e0);
    return a * z;
}

/**
 * Smooth each column of a (steps x axes) sequence along the step axis with
 * Savitzky-Golay coefficients. Boundaries are mirror-padded (reflection
 * about the edge sample), so polynomial signals are reproduced exactly at
 * interior points only.
 */
inline Eigen::MatrixXd sg_smooth(const Eigen::MatrixXd& sequence, int window, int poly_order) {
    const Eigen::Index steps = sequence.rows();
    if (window > steps) {
        throw ConfigError("savgol: window (" + std::to_string(window) +
                          ") exceeds sequence length (" + std::to_string(steps) + ")");
    }
    const Eigen::VectorXd c = savgol_coefficients(window, poly_order);
    const int half = window / 2;

    Eigen::MatrixXd out(steps, sequence.cols());
    for (Eigen::Index t = 0; t < steps; ++t) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(sequence.cols());
        for (int k = -half; k <= half; ++k) {
            Eigen::Index idx = t + k;
            if (idx < 0) idx = -idx;                                // mirror at the start
            if (idx >= steps) idx = 2 * (steps - 1) - idx;          // mirror at the end
            acc += c[k + half] * sequence.row(idx);
        }
        out.row(t) = acc;
    }
    return out;
}

}  // namespace auvctrl
