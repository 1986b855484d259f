#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"
#include "gfdyn/parabolic.hpp"

namespace gfdyn {

struct Viewport {
  cplx center;
  double width = 4;           // extent of the real axis
  std::size_t width_px = 1024;
  std::size_t height_px = 1024;

  double pixel_size() const { return width / static_cast<double>(width_px); }
  cplx pixel_center(std::size_t x, std::size_t y) const;
};

// Orbits entering the target count as captured. Parabolic targets are
// sectors inside an attracting petal; plain targets are discs.
struct BasinTarget {
  std::string label;
  cplx point;
  double radius = 0;
  std::optional<SectorSpec> sector;
};

enum class PixelClass : std::uint8_t { Escaped = 0, Basin = 1, Undecided = 2 };

struct PixelResult {
  PixelClass cls = PixelClass::Undecided;
  std::uint8_t target = 0;
  std::uint32_t iterations = 0;
};

struct RenderJob {
  EntireMap map;
  Viewport viewport;
  std::size_t max_iter = 2000;
  double bailout = 1e6;
  std::vector<BasinTarget> targets;
  std::size_t tile = 64;
  unsigned threads = 1;
};

struct Tile {
  std::size_t x0, y0, x1, y1;
};

// Row-major tiles; the order is fixed for a given image and tile size.
std::vector<Tile> tile_schedule(std::size_t width, std::size_t height, std::size_t tile);

PixelResult classify(const RenderJob& job, cplx z);

struct RenderResult {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<PixelResult> pixels;
  std::vector<std::uint8_t> rgb;
  std::size_t escaped = 0;
  std::size_t undecided = 0;
  std::vector<std::size_t> basin_counts;  // per target
  std::uint64_t hash = 0;                 // FNV-1a of rgb
  double wall_seconds = 0;
};

RenderResult render(const RenderJob& job);

std::array<std::uint8_t, 3> class_color(const PixelResult& px);

// Sectors about each parabolic point, radius r_min / 2, opening pi / p.
std::vector<BasinTarget> parabolic_targets(const EntireMap& f, double sector_radius);

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes);

void write_png(const std::string& path, std::size_t width, std::size_t height,
               const std::vector<std::uint8_t>& rgb);

}  // namespace gfdyn
