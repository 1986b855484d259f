#include "gfdyn/render.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "gfdyn/sampling.hpp"

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;

// Cheap escape tests per kernel: each one guarantees |f(z)| exceeds the
// bailout at the next step.
struct EscapeTest {
  double threshold;
  bool operator()(const ExpKernel& k, cplx z) const { return (k.B * z).real() > threshold; }
  bool operator()(const SineKernel& k, cplx z) const { return std::abs((k.B * z + k.C).imag()) > threshold; }
  bool operator()(const ZExpKernel& k, cplx z) const { return (k.s * z).real() > threshold; }
};

double escape_threshold(const Kernel& kernel, double bailout) {
  return std::visit(
      [bailout](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          return std::log(bailout + std::abs(k.C)) - std::log(std::abs(k.A)) + 1;
        } else if constexpr (std::is_same_v<T, SineKernel>) {
          return std::log(2 * (bailout + std::abs(k.D)) / std::abs(k.A) + 1);
        } else {
          return std::log(bailout) + 1;
        }
      },
      kernel);
}

bool captured(const BasinTarget& t, cplx z) {
  if (t.sector) return t.sector->contains(z);
  return std::abs(z - t.point) < t.radius;
}

template <class K>
PixelResult classify_kernel(const K& k, const RenderJob& job, double threshold, cplx z) {
  EscapeTest escapes{threshold};
  PixelResult px;
  for (std::size_t n = 0; n <= job.max_iter; ++n) {
    if (escapes(k, z) || overflowed(z)) {
      px.cls = PixelClass::Escaped;
      px.iterations = static_cast<std::uint32_t>(n);
      return px;
    }
    for (std::size_t t = 0; t < job.targets.size(); ++t) {
      if (captured(job.targets[t], z)) {
        px.cls = PixelClass::Basin;
        px.target = static_cast<std::uint8_t>(t);
        px.iterations = static_cast<std::uint32_t>(n);
        return px;
      }
    }
    if (n < job.max_iter) z = eval_kernel(k, z);
  }
  px.iterations = static_cast<std::uint32_t>(job.max_iter);
  return px;
}

}  // namespace

cplx Viewport::pixel_center(std::size_t x, std::size_t y) const {
  const double h = pixel_size();
  const double height = h * static_cast<double>(height_px);
  double re = center.real() - width / 2 + (static_cast<double>(x) + 0.5) * h;
  double im = center.imag() + height / 2 - (static_cast<double>(y) + 0.5) * h;
  return {re, im};
}

std::vector<Tile> tile_schedule(std::size_t width, std::size_t height, std::size_t tile) {
  if (tile == 0) throw DynamicsError(ErrorKind::ConfigError, "tile size must be positive");
  std::vector<Tile> out;
  for (std::size_t y = 0; y < height; y += tile)
    for (std::size_t x = 0; x < width; x += tile)
      out.push_back({x, y, std::min(width, x + tile), std::min(height, y + tile)});
  return out;
}

PixelResult classify(const RenderJob& job, cplx z) {
  const double threshold = escape_threshold(job.map.kernel(), job.bailout);
  return std::visit([&](const auto& k) { return classify_kernel(k, job, threshold, z); }, job.map.kernel());
}

std::array<std::uint8_t, 3> class_color(const PixelResult& px) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 6> kBasin = {{
      {230, 159, 0}, {86, 180, 233}, {0, 158, 115}, {240, 228, 66}, {0, 114, 178}, {213, 94, 0},
  }};
  switch (px.cls) {
    case PixelClass::Undecided: return {0, 0, 0};
    case PixelClass::Basin: return kBasin[px.target % kBasin.size()];
    case PixelClass::Escaped: {
      // light for fast escape, darker for slow
      double s = std::min(1.0, std::log1p(static_cast<double>(px.iterations)) / std::log(64.0));
      auto c = static_cast<std::uint8_t>(255 - 175 * s);
      return {c, c, static_cast<std::uint8_t>(std::min(255, c + 20))};
    }
  }
  return {0, 0, 0};
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RenderResult render(const RenderJob& job) {
  const auto t0 = std::chrono::steady_clock::now();
  RenderResult out;
  out.width = job.viewport.width_px;
  out.height = job.viewport.height_px;
  out.pixels.resize(out.width * out.height);
  const double threshold = escape_threshold(job.map.kernel(), job.bailout);
  const auto tiles = tile_schedule(out.width, out.height, job.tile);

  parallel_for(tiles.size(), job.threads, [&](std::size_t ti) {
    const Tile& t = tiles[ti];
    std::visit(
        [&](const auto& k) {
          for (std::size_t y = t.y0; y < t.y1; ++y)
            for (std::size_t x = t.x0; x < t.x1; ++x)
              out.pixels[y * out.width + x] = classify_kernel(k, job, threshold, job.viewport.pixel_center(x, y));
        },
        job.map.kernel());
  });

  out.rgb.resize(out.pixels.size() * 3);
  out.basin_counts.assign(job.targets.size(), 0);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const auto& px = out.pixels[i];
    auto c = class_color(px);
    std::copy(c.begin(), c.end(), out.rgb.begin() + static_cast<std::ptrdiff_t>(3 * i));
    switch (px.cls) {
      case PixelClass::Escaped: ++out.escaped; break;
      case PixelClass::Undecided: ++out.undecided; break;
      case PixelClass::Basin: ++out.basin_counts[px.target]; break;
    }
  }
  out.hash = fnv1a64(out.rgb);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<BasinTarget> parabolic_targets(const EntireMap& f, double sector_radius) {
  std::vector<BasinTarget> out;
  for (cplx zeta : parabolic_points(f)) {
    ParabolicGerm g = fit_germ(f, zeta);
    for (std::size_t j = 0; j < g.attracting.size(); ++j) {
      BasinTarget t;
      t.point = zeta;
      t.radius = sector_radius;
      t.sector = attracting_sector(g, j, sector_radius, kPi / g.p);
      t.label = "petal " + std::to_string(j) + " at " + std::to_string(zeta.real()) +
                (zeta.imag() != 0 ? "+" + std::to_string(zeta.imag()) + "i" : "");
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace gfdyn
