#pragma once

#include <string>
#include <vector>

#include "acmri/geometry.hpp"
#include "acmri/types.hpp"

namespace acmri {

enum class StackKind { kspace, image, sensitivity };

std::string to_string(StackKind kind);
StackKind stack_kind_from_string(const std::string& name);

// K coils x p maps of complex n x m arrays. For k-space and image stacks p = 1.
class CoilStack {
 public:
  CoilStack() = default;
  CoilStack(int n, int m, int coils, int maps, StackKind kind);

  int n() const { return n_; }
  int m() const { return m_; }
  int coils() const { return coils_; }
  int maps() const { return maps_; }
  StackKind kind() const { return kind_; }
  Grid grid() const { return Grid(n_, m_); }

  CMatrix& at(int coil, int map = 0) { return data_[index(coil, map)]; }
  const CMatrix& at(int coil, int map = 0) const { return data_[index(coil, map)]; }

  // Restrict to the given coils (in order) and the first `maps` maps.
  CoilStack select(const std::vector<int>& coils, int maps) const;
  CoilStack select_maps(int maps) const;

  friend bool operator==(const CoilStack&, const CoilStack&) = default;

 private:
  std::size_t index(int coil, int map) const;

  int n_ = 0;
  int m_ = 0;
  int coils_ = 0;
  int maps_ = 0;
  StackKind kind_ = StackKind::image;
  std::vector<CMatrix> data_;
};

// Wraps a single complex image as a one-coil stack.
CoilStack single_image_stack(const CMatrix& image, StackKind kind = StackKind::image);

}  // namespace acmri
