#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "acmri/types.hpp"

namespace acmri {

// Sampling grid on [-1/2, 1/2]^2. Rows index x2 (n samples), columns index
// x1 (m samples). Indices are zero-based: column i sits at u(i) = -1/2 + (i+1)/m.
class Grid {
 public:
  Grid(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  double u(int column) const { return -0.5 + static_cast<double>(column + 1) / m_; }
  double v(int row) const { return -0.5 + static_cast<double>(row + 1) / n_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  int m_;
};

// One missing k-space band, in angular-frequency units.
struct Band {
  double center;
  double half_width;
};

// Disjoint union of missing bands along k2.
class BandSet {
 public:
  BandSet() = default;
  explicit BandSet(std::vector<Band> bands);

  const std::vector<Band>& bands() const { return bands_; }
  std::size_t size() const { return bands_.size(); }
  bool empty() const { return bands_.empty(); }

  // True when the angular frequency k lies strictly inside some band.
  bool contains(double k) const;

 private:
  std::vector<Band> bands_;
};

// Index of the k-space line carrying zero frequency.
inline int center_line(int n) { return n / 2; }

// Line index j maps to angular frequency 2*pi*(j - floor(n/2)).
inline double line_frequency(int j, int n) { return 2.0 * kPi * (j - center_line(n)); }

// Half-open index range [first, last) of the centered ACS block.
std::pair<int, int> acs_range(int n, int acs);

class SamplingMask {
 public:
  SamplingMask(std::vector<bool> acquired, int acs);

  int n() const { return static_cast<int>(acquired_.size()); }
  int acs() const { return acs_; }
  bool acquired(int line) const { return acquired_[static_cast<std::size_t>(line)]; }
  const std::vector<bool>& flags() const { return acquired_; }

  int acquired_count() const;
  double scan_time() const { return static_cast<double>(acquired_count()) / n(); }
  std::vector<int> acquired_lines() const;
  std::vector<int> missing_lines() const;

  friend bool operator==(const SamplingMask&, const SamplingMask&) = default;

 private:
  std::vector<bool> acquired_;
  int acs_;
};

// ACS block plus every rate-th line counted from index 0.
SamplingMask make_accelerated_mask(int n, int rate, int acs);

// ACS block plus lines drawn uniformly without replacement from the rest,
// round(scan_time * n) lines in total.
SamplingMask make_random_mask(int n, double scan_time, int acs, std::uint64_t seed);

// Maximal runs of missing lines become bands; line j covers
// [2*pi*(j - n/2) - pi, 2*pi*(j - n/2) + pi].
BandSet mask_to_bands(const SamplingMask& mask);

// Missing-line flags of an n-line grid covered by the bands.
std::vector<bool> rasterize_bands(const BandSet& bands, int n);

}  // namespace acmri
