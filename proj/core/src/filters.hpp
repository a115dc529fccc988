#pragma once

#include <cstddef>
#include <vector>

#include "qca/raster.hpp"

namespace qca::detail {

struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    FloatImage() = default;
    FloatImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

FloatImage to_float(const GrayImage& img);

/// Sampled Gaussian (order 0, unit sum), first derivative (odd), or second
/// derivative (zero sum) over radius ceil(3 * sigma).
std::vector<double> gaussian_kernel(double sigma, int order);

/// Separable correlation with replicated borders.
FloatImage convolve(const FloatImage& src, const std::vector<double>& kx, const std::vector<double>& ky);

}  // namespace qca::detail
