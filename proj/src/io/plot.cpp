#include "latentflow/io/plot.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "latentflow/io/csv.hpp"

namespace lf::io {

namespace {

constexpr std::array<std::array<double, 3>, 9> kViridis{{{68, 1, 84},
                                                         {71, 44, 122},
                                                         {59, 81, 139},
                                                         {44, 113, 142},
                                                         {33, 144, 141},
                                                         {39, 173, 129},
                                                         {92, 200, 99},
                                                         {170, 220, 50},
                                                         {253, 231, 37}}};

// 3x5 glyphs, one row per string, '#' = ink.
const std::map<char, std::array<const char*, 5>>& glyphs() {
  static const std::map<char, std::array<const char*, 5>> g{
      {'0', {"###", "#.#", "#.#", "#.#", "###"}}, {'1', {".#.", "##.", ".#.", ".#.", "###"}},
      {'2', {"###", "..#", "###", "#..", "###"}}, {'3', {"###", "..#", "###", "..#", "###"}},
      {'4', {"#.#", "#.#", "###", "..#", "..#"}}, {'5', {"###", "#..", "###", "..#", "###"}},
      {'6', {"###", "#..", "###", "#.#", "###"}}, {'7', {"###", "..#", "..#", "..#", "..#"}},
      {'8', {"###", "#.#", "###", "#.#", "###"}}, {'9', {"###", "#.#", "###", "..#", "###"}},
      {'.', {"...", "...", "...", "...", ".#."}}, {'-', {"...", "...", "###", "...", "..."}},
      {'+', {"...", ".#.", "###", ".#.", "..."}}, {'e', {"...", "###", "#.#", "##.", "###"}},
      {'n', {"...", "##.", "#.#", "#.#", "#.#"}}, {'a', {"...", "##.", "..#", "###", "###"}},
      {'i', {".#.", "...", ".#.", ".#.", ".#."}}, {'f', {".##", "#..", "##.", "#..", "#.."}},
  };
  return g;
}

constexpr std::size_t kGlyphScale = 2;
constexpr std::size_t kMargin = 6;
constexpr std::size_t kBarWidth = 16;

void draw_text(Image& img, std::size_t x0, std::size_t y0, const std::string& text) {
  const auto& g = glyphs();
  for (std::size_t c = 0; c < text.size(); ++c) {
    const auto it = g.find(text[c]);
    if (it == g.end()) continue;
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t k = 0; k < 3; ++k) {
        if (it->second[r][k] != '#') continue;
        for (std::size_t dy = 0; dy < kGlyphScale; ++dy)
          for (std::size_t dx = 0; dx < kGlyphScale; ++dx) {
            const std::size_t x = x0 + c * 4 * kGlyphScale + k * kGlyphScale + dx;
            const std::size_t y = y0 + r * kGlyphScale + dy;
            if (x < img.width && y < img.height) img.at(x, y) = Rgb{0, 0, 0};
          }
      }
  }
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

Rgb viridis(double t) {
  if (!(t >= 0.0)) t = 0.0;
  t = std::min(t, 1.0);
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(pos), kViridis.size() - 2);
  const double w = pos - static_cast<double>(k);
  auto ch = [&](int c) {
    return static_cast<std::uint8_t>(std::lround((1.0 - w) * kViridis[k][c] + w * kViridis[k + 1][c]));
  };
  return Rgb{ch(0), ch(1), ch(2)};
}

Heatmap render_heatmap(const fvm::ScalarField2D& field, const PlotOptions& options) {
  if (field.size() == 0) throw std::invalid_argument("plot: empty field");
  if (options.scale == 0) throw std::invalid_argument("plot: scale must be positive");
  Heatmap hm;
  hm.plotted = field;
  if (options.log_values) {
    if (!field.all_positive())
      throw std::invalid_argument("plot: ln K requested but the field has non-positive values (min " +
                                  label(field.min()) + ")");
    for (double& v : hm.plotted.values()) v = std::log(v);
  }
  if (!hm.plotted.all_finite()) throw std::invalid_argument("plot: field has non-finite values");
  hm.vmin = hm.plotted.min();
  hm.vmax = hm.plotted.max();
  const double range = hm.vmax - hm.vmin;
  auto unit = [&](double v) { return range > 0.0 ? (v - hm.vmin) / range : 0.5; };

  const std::string top = label(hm.vmax), bottom = label(hm.vmin);
  const std::size_t text_w = std::max(top.size(), bottom.size()) * 4 * kGlyphScale;
  const std::size_t text_h = 5 * kGlyphScale;
  hm.map_w = field.nx() * options.scale;
  hm.map_h = field.ny() * options.scale;
  hm.map_x0 = kMargin;
  hm.map_y0 = kMargin + text_h;
  Image& img = hm.image;
  img.width = kMargin + hm.map_w + kMargin + kBarWidth + kMargin + text_w + kMargin;
  img.height = hm.map_y0 + std::max(hm.map_h, 2 * text_h) + text_h + kMargin;
  img.pixels.assign(img.width * img.height, Rgb{255, 255, 255});

  for (std::size_t y = 0; y < hm.map_h; ++y) {
    const std::size_t j = field.ny() - 1 - y / options.scale;  // y axis points up
    for (std::size_t x = 0; x < hm.map_w; ++x)
      img.at(hm.map_x0 + x, hm.map_y0 + y) = viridis(unit(hm.plotted(x / options.scale, j)));
  }

  const std::size_t bar_x0 = hm.map_x0 + hm.map_w + kMargin;
  for (std::size_t y = 0; y < hm.map_h; ++y) {
    const double t = range > 0.0 ? 1.0 - static_cast<double>(y) / static_cast<double>(hm.map_h - 1 ? hm.map_h - 1 : 1)
                                 : 0.5;
    for (std::size_t x = 0; x < kBarWidth; ++x) img.at(bar_x0 + x, hm.map_y0 + y) = viridis(t);
  }
  const std::size_t text_x = bar_x0 + kBarWidth + kMargin;
  draw_text(img, text_x, hm.map_y0, top);
  draw_text(img, text_x, hm.map_y0 + hm.map_h - text_h, bottom);
  return hm;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw std::runtime_error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw std::runtime_error("libpng error writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(image.width * 3);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const Rgb& c = image.at(x, y);
      row[3 * x] = c.r;
      row[3 * x + 1] = c.g;
      row[3 * x + 2] = c.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Heatmap plot_field(const fvm::ScalarField2D& field, const std::filesystem::path& png_path,
                   const PlotOptions& options) {
  auto hm = render_heatmap(field, options);
  if (png_path.has_parent_path()) std::filesystem::create_directories(png_path.parent_path());
  write_png(png_path, hm.image);
  auto csv = png_path;
  csv.replace_extension(".csv");
  write_grid_csv(csv, hm.plotted);
  return hm;
}

}  // namespace lf::io
