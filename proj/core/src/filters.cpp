#include "filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qca::detail {

FloatImage to_float(const GrayImage& img)
{
    FloatImage out(img.width(), img.height());
    auto px = img.pixels();
    std::copy(px.begin(), px.end(), out.data.begin());
    return out;
}

std::vector<double> gaussian_kernel(double sigma, int order)
{
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    const double s2 = sigma * sigma;
    std::vector<double> k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) {
        const double g = std::exp(-0.5 * i * i / s2) / (std::sqrt(2.0 * M_PI) * sigma);
        double v = g;
        if (order == 1) {
            v = -i / s2 * g;
        } else if (order == 2) {
            v = (i * i - s2) / (s2 * s2) * g;
        }
        k[i + radius] = v;
    }
    if (order == 0) {
        const double sum = std::accumulate(k.begin(), k.end(), 0.0);
        for (auto& v : k) {
            v /= sum;
        }
    } else if (order == 2) {
        const double mean = std::accumulate(k.begin(), k.end(), 0.0) / static_cast<double>(k.size());
        for (auto& v : k) {
            v -= mean;
        }
    }
    return k;
}

FloatImage convolve(const FloatImage& src, const std::vector<double>& kx, const std::vector<double>& ky)
{
    const int w = src.width;
    const int h = src.height;
    const int rx = static_cast<int>(kx.size() / 2);
    const int ry = static_cast<int>(ky.size() / 2);

    FloatImage tmp(w, h);
    std::vector<double> row(static_cast<std::size_t>(w + 2 * rx));
    for (int y = 0; y < h; ++y) {
        for (int x = -rx; x < w + rx; ++x) {
            row[x + rx] = src.at(std::clamp(x, 0, w - 1), y);
        }
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(kx.size()); ++k) {
                acc += kx[k] * row[x + k];
            }
            tmp.at(x, y) = acc;
        }
    }

    FloatImage out(w, h);
    std::vector<double> col(static_cast<std::size_t>(h + 2 * ry));
    for (int x = 0; x < w; ++x) {
        for (int y = -ry; y < h + ry; ++y) {
            col[y + ry] = tmp.at(x, std::clamp(y, 0, h - 1));
        }
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(ky.size()); ++k) {
                acc += ky[k] * col[y + k];
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace qca::detail
