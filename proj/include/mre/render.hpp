#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mre/mesh.hpp"

namespace mre {

struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y * width + x)]; }
    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y * width + x)];
    }
};

struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const std::size_t i = 3 * static_cast<std::size_t>(y * width + x);
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
};

/// Flat-shaded rasterization of a per-element field onto a fixed square
/// canvas, mapping [vmin, vmax] linearly to the gray ramp. The written PGM
/// carries min/max/unit annotations as header comments.
ImageGray render_field_gray(const TriMesh& mesh, const ElasticityField& values,
                            double vmin, double vmax, int size = 512);

/// Colormapped render with a legend strip (colorbar plus min/max and unit
/// annotations) inside the same fixed canvas.
ImageRGB render_field_rgb(const TriMesh& mesh, const ElasticityField& values,
                          double vmin, double vmax, const std::string& unit_label,
                          int size = 512);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Simple line chart with axes, tick labels, and a legend.
ImageRGB render_line_plot(const std::vector<PlotSeries>& series,
                          const std::string& x_label, const std::string& y_label,
                          int width = 800, int height = 600);

ImageGray to_gray(const ImageRGB& img);

/// Binary PGM (P5). `comments` lines are embedded verbatim after the magic.
void write_pgm(const ImageGray& img, const std::string& path,
               const std::vector<std::string>& comments = {});

/// 8-bit RGB PNG via zlib.
void write_png(const ImageRGB& img, const std::string& path);

}  // namespace mre
