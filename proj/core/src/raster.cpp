#include "qca/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#ifdef QCA_HAVE_PNG
#include <png.h>
#endif

#include "qca/error.hpp"

namespace qca {

namespace {

constexpr std::array<Point, 8> kOffsets8 = {
    Point{-1, -1}, Point{0, -1}, Point{1, -1}, Point{-1, 0},
    Point{1, 0},   Point{-1, 1}, Point{0, 1},  Point{1, 1},
};

void check_dims(int width, int height)
{
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::too_small, "raster dimensions must be positive, got " +
                                              std::to_string(width) + "x" + std::to_string(height));
    }
}

// Skips whitespace and '#' comments between PGM header tokens.
void skip_header_space(std::istream& in)
{
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

int read_header_int(std::istream& in, const char* what)
{
    skip_header_space(in);
    int value = 0;
    if (!(in >> value)) {
        throw Error(ErrorCode::format, std::string("PGM header: cannot read ") + what);
    }
    return value;
}

bool has_png_extension(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png";
}

#ifdef QCA_HAVE_PNG
GrayImage load_png(const std::filesystem::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw Error(ErrorCode::format, path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::format, path.string() + ": " + image.message);
    }
    return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height),
                     std::move(buffer));
}

void save_png(const GrayImage& img, const std::filesystem::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels().data(), 0, nullptr)) {
        throw Error(ErrorCode::io, path.string() + ": " + image.message);
    }
}
#endif

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data))
{
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::shape_mismatch, "pixel buffer length does not match dimensions");
    }
}

Mask::Mask(int width, int height) : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t Mask::count() const noexcept
{
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

std::vector<Point> Mask::points() const
{
    std::vector<Point> out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (data_[static_cast<std::size_t>(y) * width_ + x]) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

Mask Mask::from_points(Size size, std::span<const Point> points)
{
    Mask m(size);
    for (const auto& p : points) {
        if (!m.contains(p)) {
            throw Error(ErrorCode::bounds, "point outside grid");
        }
        m.set(p);
    }
    return m;
}

std::vector<Point> neighbors8(const Mask& mask, Point p)
{
    if (!mask.contains(p)) {
        throw Error(ErrorCode::bounds, "point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                           ") outside " + std::to_string(mask.width()) + "x" +
                                           std::to_string(mask.height()) + " grid");
    }
    std::vector<Point> out;
    for (const auto& d : kOffsets8) {
        Point q{p.x + d.x, p.y + d.y};
        if (mask.test(q)) {
            out.push_back(q);
        }
    }
    return out;
}

std::vector<Component> connected_components(const Mask& mask)
{
    std::vector<Component> out;
    if (mask.width() == 0) {
        return out;
    }
    Mask seen(mask.size());
    std::vector<Point> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.test(x, y) || seen.test(x, y)) {
                continue;
            }
            Component comp;
            seen.set(x, y);
            stack.push_back({x, y});
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                for (const auto& d : kOffsets8) {
                    Point q{p.x + d.x, p.y + d.y};
                    if (mask.test(q) && !seen.test(q)) {
                        seen.set(q);
                        stack.push_back(q);
                    }
                }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end());
            out.push_back(std::move(comp));
        }
    }
    return out;
}

Mask largest_component(const Mask& mask)
{
    if (mask.width() == 0) {
        return {};
    }
    auto comps = connected_components(mask);
    Mask out(mask.size());
    const Component* best = nullptr;
    for (const auto& c : comps) {
        if (!best || c.size() > best->size()) {
            best = &c;
        }
    }
    if (best) {
        for (const auto& p : best->pixels) {
            out.set(p);
        }
    }
    return out;
}

Mask threshold(const GrayImage& image, std::uint8_t level)
{
    Mask m(image.size());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (image.at(x, y) > level) {
                m.set(x, y);
            }
        }
    }
    return m;
}

GrayImage to_gray(const Mask& mask)
{
    GrayImage img(mask.width(), mask.height(), 0);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.test(x, y)) {
                img.set(x, y, 255);
            }
        }
    }
    return img;
}

GrayImage read_pgm(std::istream& in)
{
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') {
        throw Error(ErrorCode::format, "not a binary PGM (expected magic P5)");
    }
    const int width = read_header_int(in, "width");
    const int height = read_header_int(in, "height");
    const int maxval = read_header_int(in, "maxval");
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::format, "PGM header: non-positive dimensions");
    }
    if (maxval != 255) {
        throw Error(ErrorCode::format, "PGM header: maxval must be 255, got " + std::to_string(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(in.get())) {
        throw Error(ErrorCode::format, "PGM header: missing separator before raster");
    }
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
        throw Error(ErrorCode::format, "PGM raster truncated");
    }
    return GrayImage(width, height, std::move(data));
}

void write_pgm(std::ostream& out, const GrayImage& image)
{
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    auto px = image.pixels();
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

GrayImage load_gray(const std::filesystem::path& path)
{
    if (has_png_extension(path)) {
#ifdef QCA_HAVE_PNG
        if (!std::filesystem::exists(path)) {
            throw Error(ErrorCode::io, "cannot open " + path.string());
        }
        return load_png(path);
#else
        throw Error(ErrorCode::format, "PNG support not compiled in: " + path.string());
#endif
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open " + path.string());
    }
    try {
        return read_pgm(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_gray(const GrayImage& image, const std::filesystem::path& path)
{
    if (has_png_extension(path)) {
#ifdef QCA_HAVE_PNG
        save_png(image, path);
        return;
#else
        throw Error(ErrorCode::format, "PNG support not compiled in: " + path.string());
#endif
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot write " + path.string());
    }
    write_pgm(out, image);
    if (!out) {
        throw Error(ErrorCode::io, "write failed: " + path.string());
    }
}

Mask load_mask(const std::filesystem::path& path, std::uint8_t level)
{
    return threshold(load_gray(path), level);
}

void save_mask(const Mask& mask, const std::filesystem::path& path)
{
    save_gray(to_gray(mask), path);
}

bool png_supported() noexcept
{
#ifdef QCA_HAVE_PNG
    return true;
#else
    return false;
#endif
}

}  // namespace qca
