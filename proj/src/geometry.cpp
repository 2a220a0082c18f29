#include "acmri/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace acmri {

Grid::Grid(int n, int m) : n_(n), m_(m) {
  if (n < 2 || m < 2) {
    throw std::invalid_argument("grid needs at least 2x2 samples, got " + std::to_string(n) +
                                "x" + std::to_string(m));
  }
}

BandSet::BandSet(std::vector<Band> bands) : bands_(std::move(bands)) {
  for (const auto& b : bands_) {
    if (!(b.half_width > 0.0) || !std::isfinite(b.center)) {
      throw std::invalid_argument("band half-width must be positive and center finite");
    }
  }
  std::vector<Band> sorted = bands_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Band& a, const Band& b) { return a.center < b.center; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double prev_hi = sorted[i - 1].center + sorted[i - 1].half_width;
    const double lo = sorted[i].center - sorted[i].half_width;
    if (lo <= prev_hi) {
      throw std::invalid_argument("bands must be pairwise disjoint");
    }
  }
}

bool BandSet::contains(double k) const {
  return std::any_of(bands_.begin(), bands_.end(),
                     [k](const Band& b) { return std::abs(k - b.center) < b.half_width; });
}

std::pair<int, int> acs_range(int n, int acs) {
  const int first = center_line(n) - acs / 2;
  return {first, first + acs};
}

SamplingMask::SamplingMask(std::vector<bool> acquired, int acs)
    : acquired_(std::move(acquired)), acs_(acs) {
  const int n = static_cast<int>(acquired_.size());
  if (n < 1) {
    throw std::invalid_argument("mask must have at least one line");
  }
  if (acs < 0 || acs > n) {
    throw std::invalid_argument("acs block of " + std::to_string(acs) +
                                " lines does not fit in " + std::to_string(n));
  }
  const auto [first, last] = acs_range(n, acs);
  for (int j = first; j < last; ++j) {
    if (!acquired_[static_cast<std::size_t>(j)]) {
      throw std::invalid_argument("ACS line " + std::to_string(j) + " is not acquired");
    }
  }
  if (acquired_count() == 0) {
    throw std::invalid_argument("mask acquires no lines");
  }
}

int SamplingMask::acquired_count() const {
  return static_cast<int>(std::count(acquired_.begin(), acquired_.end(), true));
}

std::vector<int> SamplingMask::acquired_lines() const {
  std::vector<int> out;
  for (int j = 0; j < n(); ++j) {
    if (acquired(j)) out.push_back(j);
  }
  return out;
}

std::vector<int> SamplingMask::missing_lines() const {
  std::vector<int> out;
  for (int j = 0; j < n(); ++j) {
    if (!acquired(j)) out.push_back(j);
  }
  return out;
}

namespace {

std::vector<bool> acs_flags(int n, int acs) {
  if (n < 1) {
    throw std::invalid_argument("mask length must be positive");
  }
  if (acs < 0 || acs > n) {
    throw std::invalid_argument("acs=" + std::to_string(acs) + " exceeds n=" + std::to_string(n));
  }
  std::vector<bool> flags(static_cast<std::size_t>(n), false);
  const auto [first, last] = acs_range(n, acs);
  for (int j = first; j < last; ++j) flags[static_cast<std::size_t>(j)] = true;
  return flags;
}

// Unbiased draw from [0, bound) using rejection, independent of the
// standard library's distribution implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

SamplingMask make_accelerated_mask(int n, int rate, int acs) {
  if (rate < 1) {
    throw std::invalid_argument("acceleration rate must be >= 1");
  }
  auto flags = acs_flags(n, acs);
  for (int j = 0; j < n; j += rate) flags[static_cast<std::size_t>(j)] = true;
  return SamplingMask(std::move(flags), acs);
}

SamplingMask make_random_mask(int n, double scan_time, int acs, std::uint64_t seed) {
  auto flags = acs_flags(n, acs);
  if (!(scan_time <= 1.0) || scan_time * n < acs - 1e-9) {
    throw std::invalid_argument("scan time " + std::to_string(scan_time) + " must lie in [acs/n, 1] = [" +
                                std::to_string(static_cast<double>(acs) / n) + ", 1]");
  }
  const int total = std::max(acs, static_cast<int>(std::lround(scan_time * n)));
  if (total < 1) {
    throw std::invalid_argument("scan time too small: no line would be acquired");
  }
  std::vector<int> pool;
  for (int j = 0; j < n; ++j) {
    if (!flags[static_cast<std::size_t>(j)]) pool.push_back(j);
  }
  std::mt19937_64 rng(seed);
  const int extra = total - acs;
  // Partial Fisher-Yates: the first `extra` pool entries become the sample.
  for (int k = 0; k < extra; ++k) {
    const auto pick = k + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(pool.size() - k)));
    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
    flags[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])] = true;
  }
  return SamplingMask(std::move(flags), acs);
}

BandSet mask_to_bands(const SamplingMask& mask) {
  const int n = mask.n();
  std::vector<Band> bands;
  int j = 0;
  while (j < n) {
    if (mask.acquired(j)) {
      ++j;
      continue;
    }
    const int first = j;
    while (j < n && !mask.acquired(j)) ++j;
    const int last = j - 1;
    const double lo = line_frequency(first, n) - kPi;
    const double hi = line_frequency(last, n) + kPi;
    bands.push_back({0.5 * (lo + hi), 0.5 * (hi - lo)});
  }
  return BandSet(std::move(bands));
}

std::vector<bool> rasterize_bands(const BandSet& bands, int n) {
  std::vector<bool> missing(static_cast<std::size_t>(n), false);
  for (int j = 0; j < n; ++j) {
    missing[static_cast<std::size_t>(j)] = bands.contains(line_frequency(j, n));
  }
  return missing;
}

}  // namespace acmri
