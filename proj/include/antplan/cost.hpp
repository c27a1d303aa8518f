#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace antplan {

/// Plan and action cost, stored as an integer number of thousandths of an
/// abstract cost unit. Sums of costs are therefore exact.
class Cost {
 public:
  constexpr Cost() = default;

  static constexpr Cost from_milli(std::int64_t milli) { return Cost(milli); }
  /// Rounds to the nearest thousandth.
  static Cost from_units(double units) {
    if (!std::isfinite(units)) return infinite();
    return Cost(std::llround(units * 1000.0));
  }
  static constexpr Cost zero() { return Cost(0); }
  static constexpr Cost infinite() { return Cost(kInfinite); }

  constexpr std::int64_t milli() const { return milli_; }
  constexpr double units() const {
    return is_infinite() ? std::numeric_limits<double>::infinity()
                         : static_cast<double>(milli_) / 1000.0;
  }
  constexpr bool is_infinite() const { return milli_ >= kInfinite; }

  constexpr Cost& operator+=(Cost other) {
    milli_ = (is_infinite() || other.is_infinite()) ? kInfinite : milli_ + other.milli_;
    return *this;
  }
  friend constexpr Cost operator+(Cost a, Cost b) { return a += b; }
  friend constexpr Cost operator-(Cost a, Cost b) { return Cost(a.milli_ - b.milli_); }
  friend constexpr Cost operator*(Cost a, std::int64_t k) {
    return a.is_infinite() ? a : Cost(a.milli_ * k);
  }
  friend constexpr auto operator<=>(Cost, Cost) = default;

  /// Fixed three-decimal rendering, e.g. "12.414".
  std::string str() const;

 private:
  constexpr explicit Cost(std::int64_t milli) : milli_(milli) {}
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max() / 4;
  std::int64_t milli_ = 0;
};

inline std::string Cost::str() const {
  if (is_infinite()) return "inf";
  const std::int64_t a = milli_ < 0 ? -milli_ : milli_;
  std::string frac = std::to_string(a % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return (milli_ < 0 ? "-" : "") + std::to_string(a / 1000) + "." + frac;
}

}  // namespace antplan
