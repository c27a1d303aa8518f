#pragma once

#include <compare>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace antplan {

struct Cell {
  int x = 0;
  int y = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

enum class Connectivity { Four, Eight };

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Static occupancy raster. Row-major, y indexes rows.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double cell_size = 1.0);

  /// Parses rows of '.' (free) and '#' (blocked).
  static OccupancyGrid from_rows(const std::vector<std::string>& rows, double cell_size = 1.0);
  std::vector<std::string> to_rows() const;

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t size() const { return blocked_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool blocked(Cell c) const { return blocked_[index(c)] != 0; }
  bool free(Cell c) const { return in_bounds(c) && !blocked(c); }
  void set_blocked(Cell c, bool value) { blocked_[index(c)] = value ? 1 : 0; }
  std::size_t free_count() const;

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  /// Throws cell-out-of-bounds or cell-blocked.
  void require_free(Cell c) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  std::vector<unsigned char> blocked_;
};

/// Single-source shortest path lengths over the free cells.
class DistanceField {
 public:
  DistanceField(Cell source, std::vector<double> dist, int width)
      : source_(source), dist_(std::move(dist)), width_(width) {}

  Cell source() const { return source_; }
  double at(Cell c) const { return dist_[static_cast<std::size_t>(c.y) * width_ + c.x]; }
  bool reachable(Cell c) const { return at(c) < kUnreachable; }
  const std::vector<double>& values() const { return dist_; }

 private:
  Cell source_;
  std::vector<double> dist_;
  int width_;
};

/// Dijkstra from `source`. Axis steps cost cell-size, diagonal steps cell-size * sqrt(2);
/// a diagonal step is only taken when both adjacent axis cells are free.
DistanceField distance_field(const OccupancyGrid& grid, Cell source,
                             Connectivity connectivity = Connectivity::Eight);

double shortest_dist(const OccupancyGrid& grid, Cell from, Cell to,
                     Connectivity connectivity = Connectivity::Eight);

/// Memo of distance fields for one static grid. Concurrent readers, single writer.
class DistanceCache {
 public:
  explicit DistanceCache(std::shared_ptr<const OccupancyGrid> grid,
                         Connectivity connectivity = Connectivity::Eight)
      : grid_(std::move(grid)), connectivity_(connectivity) {}

  std::shared_ptr<const DistanceField> field(Cell source) const;
  double dist(Cell from, Cell to) const { return field(from)->at(to); }
  const OccupancyGrid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const OccupancyGrid> grid_;
  Connectivity connectivity_;
  mutable std::shared_mutex mutex_;
  mutable std::map<Cell, std::shared_ptr<const DistanceField>> fields_;
};

}  // namespace antplan
