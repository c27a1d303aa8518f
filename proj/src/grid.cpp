#include "antplan/grid.hpp"

#include <cmath>
#include <mutex>
#include <queue>

#include "antplan/error.hpp"

namespace antplan {

OccupancyGrid::OccupancyGrid(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorKind::InvalidWorld, "grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw Error(ErrorKind::InvalidWorld, "cell-size must be positive");
  blocked_.assign(static_cast<std::size_t>(width) * height, 0);
}

OccupancyGrid OccupancyGrid::from_rows(const std::vector<std::string>& rows, double cell_size) {
  if (rows.empty()) throw Error(ErrorKind::InvalidWorld, "grid has no rows");
  OccupancyGrid grid(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()),
                     cell_size);
  for (int y = 0; y < grid.height_; ++y) {
    const std::string& row = rows[y];
    if (static_cast<int>(row.size()) != grid.width_)
      throw Error(ErrorKind::InvalidWorld, "grid row " + std::to_string(y) + " has width " +
                                               std::to_string(row.size()) + ", expected " +
                                               std::to_string(grid.width_));
    for (int x = 0; x < grid.width_; ++x) {
      if (row[x] == '#') {
        grid.set_blocked({x, y}, true);
      } else if (row[x] != '.') {
        throw Error(ErrorKind::InvalidWorld, "grid row " + std::to_string(y) +
                                                 ": unexpected character '" + row[x] + "'");
      }
    }
  }
  if (grid.free_count() == 0) throw Error(ErrorKind::InvalidWorld, "grid has no free cell");
  return grid;
}

std::vector<std::string> OccupancyGrid::to_rows() const {
  std::vector<std::string> rows(height_, std::string(width_, '.'));
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (blocked({x, y})) rows[y][x] = '#';
  return rows;
}

std::size_t OccupancyGrid::free_count() const {
  std::size_t n = 0;
  for (unsigned char b : blocked_) n += b == 0;
  return n;
}

void OccupancyGrid::require_free(Cell c) const {
  if (!in_bounds(c))
    throw Error(ErrorKind::CellOutOfBounds,
                "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
  if (blocked(c))
    throw Error(ErrorKind::CellBlocked, "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
}

DistanceField distance_field(const OccupancyGrid& grid, Cell source, Connectivity connectivity) {
  grid.require_free(source);
  std::vector<double> dist(grid.size(), kUnreachable);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const double axis = grid.cell_size();
  const double diag = grid.cell_size() * std::sqrt(2.0);

  dist[grid.index(source)] = 0.0;
  open.emplace(0.0, grid.index(source));
  while (!open.empty()) {
    auto [d, idx] = open.top();
    open.pop();
    if (d > dist[idx]) continue;
    const Cell c = grid.cell(idx);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const bool diagonal = dx != 0 && dy != 0;
        if (diagonal && connectivity == Connectivity::Four) continue;
        const Cell n{c.x + dx, c.y + dy};
        if (!grid.free(n)) continue;
        if (diagonal && (!grid.free({c.x + dx, c.y}) || !grid.free({c.x, c.y + dy}))) continue;
        const double nd = d + (diagonal ? diag : axis);
        const std::size_t nidx = grid.index(n);
        if (nd < dist[nidx]) {
          dist[nidx] = nd;
          open.emplace(nd, nidx);
        }
      }
    }
  }
  return DistanceField(source, std::move(dist), grid.width());
}

double shortest_dist(const OccupancyGrid& grid, Cell from, Cell to, Connectivity connectivity) {
  grid.require_free(to);
  return distance_field(grid, from, connectivity).at(to);
}

std::shared_ptr<const DistanceField> DistanceCache::field(Cell source) const {
  {
    std::shared_lock lock(mutex_);
    auto it = fields_.find(source);
    if (it != fields_.end()) return it->second;
  }
  auto computed = std::make_shared<const DistanceField>(distance_field(*grid_, source, connectivity_));
  std::unique_lock lock(mutex_);
  return fields_.emplace(source, std::move(computed)).first->second;
}

}  // namespace antplan
