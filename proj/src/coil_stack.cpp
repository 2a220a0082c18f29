#include "acmri/coil_stack.hpp"

#include <stdexcept>

namespace acmri {

std::string to_string(StackKind kind) {
  switch (kind) {
    case StackKind::kspace:
      return "kspace";
    case StackKind::image:
      return "image";
    case StackKind::sensitivity:
      return "sensitivity";
  }
  return "image";
}

StackKind stack_kind_from_string(const std::string& name) {
  if (name == "kspace") return StackKind::kspace;
  if (name == "image") return StackKind::image;
  if (name == "sensitivity") return StackKind::sensitivity;
  throw std::invalid_argument("unknown stack kind '" + name + "'");
}

CoilStack::CoilStack(int n, int m, int coils, int maps, StackKind kind)
    : n_(n), m_(m), coils_(coils), maps_(maps), kind_(kind) {
  if (n < 1 || m < 1 || coils < 1 || maps < 1) {
    throw std::invalid_argument("coil stack dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(coils) * static_cast<std::size_t>(maps),
               CMatrix::Zero(n, m));
}

std::size_t CoilStack::index(int coil, int map) const {
  if (coil < 0 || coil >= coils_ || map < 0 || map >= maps_) {
    throw std::out_of_range("coil/map index out of range");
  }
  return static_cast<std::size_t>(coil) * static_cast<std::size_t>(maps_) +
         static_cast<std::size_t>(map);
}

CoilStack CoilStack::select(const std::vector<int>& coils, int maps) const {
  if (coils.empty()) {
    throw std::invalid_argument("coil subset is empty");
  }
  if (maps < 1 || maps > maps_) {
    throw std::invalid_argument("requested " + std::to_string(maps) + " maps but stack has " +
                                std::to_string(maps_));
  }
  CoilStack out(n_, m_, static_cast<int>(coils.size()), maps, kind_);
  for (std::size_t j = 0; j < coils.size(); ++j) {
    for (int q = 0; q < maps; ++q) out.at(static_cast<int>(j), q) = at(coils[j], q);
  }
  return out;
}

CoilStack CoilStack::select_maps(int maps) const {
  std::vector<int> all(static_cast<std::size_t>(coils_));
  for (int j = 0; j < coils_; ++j) all[static_cast<std::size_t>(j)] = j;
  return select(all, maps);
}

CoilStack single_image_stack(const CMatrix& image, StackKind kind) {
  CoilStack out(static_cast<int>(image.rows()), static_cast<int>(image.cols()), 1, 1, kind);
  out.at(0) = image;
  return out;
}

}  // namespace acmri
