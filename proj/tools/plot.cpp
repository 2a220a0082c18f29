#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acmri/io.hpp"

namespace acmri::tools {

namespace {

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), rgb_(static_cast<std::size_t>(w * h * 3), 255) {}

  void set(int x, int y, const std::array<unsigned char, 3>& c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    auto* p = &rgb_[static_cast<std::size_t>((y * w_ + x) * 3)];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  // Bresenham with a 2-pixel pen.
  void line(int x0, int y0, int x1, int y1, const std::array<unsigned char, 3>& c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      set(x0 + 1, y0, c);
      set(x0, y0 + 1, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void square(int x, int y, int r, const std::array<unsigned char, 3>& c) {
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b) set(x + a, y + b, c);
  }

  const std::vector<unsigned char>& data() const { return rgb_; }

 private:
  int w_, h_;
  std::vector<unsigned char> rgb_;
};

}  // namespace

const std::vector<std::array<unsigned char, 3>>& plot_palette() {
  static const std::vector<std::array<unsigned char, 3>> colors{
      {{31, 119, 180}}, {{214, 39, 40}}, {{44, 160, 44}}, {{255, 127, 14}}, {{148, 103, 189}}, {{140, 86, 75}}};
  return colors;
}

PlotRange line_plot(const std::filesystem::path& path, const std::vector<Series>& series, int width,
                    int height) {
  PlotRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      r.x_min = std::min(r.x_min, s.x[i]);
      r.x_max = std::max(r.x_max, s.x[i]);
      r.y_min = std::min(r.y_min, s.y[i]);
      r.y_max = std::max(r.y_max, s.y[i]);
    }
  }
  if (!std::isfinite(r.x_min)) r = {0.0, 1.0, 0.0, 1.0};
  if (r.x_max - r.x_min < 1e-12) {
    r.x_min -= 0.5;
    r.x_max += 0.5;
  }
  const double pad = std::max(r.y_max - r.y_min, 1e-6) * 0.08;
  r.y_min -= pad;
  r.y_max += pad;

  const int left = 40, right = width - 20, top = 20, bottom = height - 30;
  auto px = [&](double x) { return left + static_cast<int>(std::lround((x - r.x_min) / (r.x_max - r.x_min) * (right - left))); };
  auto py = [&](double y) { return bottom - static_cast<int>(std::lround((y - r.y_min) / (r.y_max - r.y_min) * (bottom - top))); };

  Canvas canvas(width, height);
  const std::array<unsigned char, 3> grid{{225, 225, 225}}, axis{{0, 0, 0}};
  for (int k = 1; k < 5; ++k) {
    const int y = top + k * (bottom - top) / 5;
    canvas.line(left, y, right, y, grid);
  }
  canvas.line(left, bottom, right, bottom, axis);
  canvas.line(left, top, left, bottom, axis);

  const auto& palette = plot_palette();
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& color = palette[s % palette.size()];
    int prev_x = 0, prev_y = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) {
        have_prev = false;
        continue;
      }
      const int x = px(series[s].x[i]), y = py(series[s].y[i]);
      if (have_prev) canvas.line(prev_x, prev_y, x, y, color);
      canvas.square(x, y, 3, color);
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
    // Legend swatch along the top edge, in series order.
    canvas.square(right - 10 - static_cast<int>(s) * 14, 8, 4, color);
  }
  write_png_rgb(path, width, height, canvas.data());
  return r;
}

}  // namespace acmri::tools
