#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace qca {

struct Size {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

/// Pixel coordinate: x is the column, y the row, origin at the top-left.
struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
    /// Raster order: by row, then column.
    friend std::strong_ordering operator<=>(const Point& a, const Point& b)
    {
        if (auto c = a.y <=> b.y; c != 0) {
            return c;
        }
        return a.x <=> b.x;
    }
};

/// 8-bit grayscale raster, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> data);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] Size size() const noexcept { return {width_, height_}; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    [[nodiscard]] std::uint8_t at(int x, int y) const noexcept
    {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    void set(int x, int y, std::uint8_t v) noexcept
    {
        data_[static_cast<std::size_t>(y) * width_ + x] = v;
    }

    [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return data_; }
    [[nodiscard]] std::span<std::uint8_t> pixels() noexcept { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Binary foreground raster, row-major.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height);
    Mask(Size size) : Mask(size.width, size.height) {}

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] Size size() const noexcept { return {width_, height_}; }
    [[nodiscard]] bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }
    [[nodiscard]] bool contains(Point p) const noexcept { return contains(p.x, p.y); }

    /// Out-of-bounds reads are background.
    [[nodiscard]] bool test(int x, int y) const noexcept
    {
        return contains(x, y) && data_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    [[nodiscard]] bool test(Point p) const noexcept { return test(p.x, p.y); }

    void set(int x, int y, bool v = true) noexcept
    {
        data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }
    void set(Point p, bool v = true) noexcept { set(p.x, p.y, v); }

    [[nodiscard]] std::size_t count() const noexcept;
    /// Foreground pixels in raster order.
    [[nodiscard]] std::vector<Point> points() const;

    static Mask from_points(Size size, std::span<const Point> points);

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

struct Component {
    std::vector<Point> pixels;  // raster order

    [[nodiscard]] std::size_t size() const noexcept { return pixels.size(); }
};

/// Foreground points among the eight cells around p, excluding p itself.
/// Throws Error(bounds) if p lies outside the grid.
std::vector<Point> neighbors8(const Mask& mask, Point p);

/// 8-connected components, ordered by their first pixel in raster order.
std::vector<Component> connected_components(const Mask& mask);

/// Mask holding only the largest 8-connected component (first in raster
/// order on ties). Empty input yields an empty mask of the same size.
Mask largest_component(const Mask& mask);

Mask threshold(const GrayImage& image, std::uint8_t threshold = 127);
GrayImage to_gray(const Mask& mask);

// Binary PGM ("P5", maxval 255).
GrayImage read_pgm(std::istream& in);
void write_pgm(std::ostream& out, const GrayImage& image);

/// Loads P5 PGM, or 8-bit grayscale PNG when built with libpng.
GrayImage load_gray(const std::filesystem::path& path);
void save_gray(const GrayImage& image, const std::filesystem::path& path);

/// A pixel is foreground iff its intensity exceeds `threshold`.
Mask load_mask(const std::filesystem::path& path, std::uint8_t threshold = 127);
/// Written as 0/255.
void save_mask(const Mask& mask, const std::filesystem::path& path);

bool png_supported() noexcept;

}  // namespace qca
