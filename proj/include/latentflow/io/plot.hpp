#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "latentflow/fvm/field.hpp"

namespace lf::io {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Viridis, t clamped to [0, 1].
Rgb viridis(double t);

struct Image {
  std::size_t width = 0, height = 0;
  std::vector<Rgb> pixels;  // row-major, row 0 at the top
  Rgb& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  const Rgb& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

struct PlotOptions {
  bool log_values = false;  // natural log before rendering
  std::size_t scale = 8;    // pixels per cell
};

struct Heatmap {
  Image image;
  fvm::ScalarField2D plotted;  // values actually mapped to colours
  double vmin = 0.0, vmax = 0.0;
  // Pixel rectangle of the field panel.
  std::size_t map_x0 = 0, map_y0 = 0, map_w = 0, map_h = 0;
};

/// Field panel (y up) with a colorbar labelled by its min and max.
Heatmap render_heatmap(const fvm::ScalarField2D& field, const PlotOptions& options = {});
void write_png(const std::filesystem::path& path, const Image& image);

/// PNG at `png_path` plus the raw plotted grid next to it with a .csv extension.
Heatmap plot_field(const fvm::ScalarField2D& field, const std::filesystem::path& png_path,
                   const PlotOptions& options = {});

}  // namespace lf::io
