#include "acmri/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include <png.h>

namespace acmri {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_f64(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

std::runtime_error io_error(const fs::path& path, const std::string& what) {
  return std::runtime_error(path.string() + ": " + what);
}

}  // namespace

std::string encode_coil_stack(const CoilStack& stack) {
  const nlohmann::json header{{"n", stack.n()},
                              {"m", stack.m()},
                              {"coils", stack.coils()},
                              {"maps", stack.maps()},
                              {"kind", to_string(stack.kind())}};
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + 16ull * stack.coils() * stack.maps() * stack.n() * stack.m());
  for (int j = 0; j < stack.coils(); ++j) {
    for (int q = 0; q < stack.maps(); ++q) {
      const CMatrix& a = stack.at(j, q);
      for (int row = 0; row < stack.n(); ++row) {
        for (int col = 0; col < stack.m(); ++col) {
          put_f64(out, a(row, col).real());
          put_f64(out, a(row, col).imag());
        }
      }
    }
  }
  return out;
}

CoilStack decode_coil_stack(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) {
    throw std::runtime_error("coil stack: missing header line");
  }
  const auto header = nlohmann::json::parse(bytes.substr(0, newline));
  const int n = header.at("n").get<int>();
  const int m = header.at("m").get<int>();
  const int coils = header.at("coils").get<int>();
  const int maps = header.value("maps", 1);
  const StackKind kind = stack_kind_from_string(header.value("kind", std::string("image")));
  CoilStack stack(n, m, coils, maps, kind);
  const std::size_t expected = 16ull * static_cast<std::size_t>(coils) * maps * n * m;
  const auto payload = bytes.substr(newline + 1);
  if (payload.size() != expected) {
    throw std::runtime_error("coil stack: payload has " + std::to_string(payload.size()) +
                             " bytes, header implies " + std::to_string(expected));
  }
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (int j = 0; j < coils; ++j) {
    for (int q = 0; q < maps; ++q) {
      CMatrix& a = stack.at(j, q);
      for (int row = 0; row < n; ++row) {
        for (int col = 0; col < m; ++col) {
          a(row, col) = cplx(get_f64(p), get_f64(p + 8));
          p += 16;
        }
      }
    }
  }
  return stack;
}

void write_coil_stack(const fs::path& path, const CoilStack& stack) {
  write_file_atomic(path, encode_coil_stack(stack));
}

CoilStack read_coil_stack(const fs::path& path) {
  try {
    return decode_coil_stack(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path, e.what());
  } catch (const std::runtime_error& e) {
    throw io_error(path, e.what());
  }
}

nlohmann::json mask_to_json(const SamplingMask& mask) {
  return {{"n", mask.n()}, {"acs", mask.acs()}, {"acquired", mask.acquired_lines()}};
}

SamplingMask mask_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int acs = j.value("acs", 0);
  std::vector<bool> flags(static_cast<std::size_t>(n), false);
  int previous = -1;
  for (const auto& v : j.at("acquired")) {
    const int line = v.get<int>();
    if (line <= previous || line >= n) {
      throw std::invalid_argument("mask lines must be ascending indices below n");
    }
    flags[static_cast<std::size_t>(line)] = true;
    previous = line;
  }
  return SamplingMask(std::move(flags), acs);
}

void write_mask(const fs::path& path, const SamplingMask& mask) { write_json(path, mask_to_json(mask)); }

SamplingMask read_mask(const fs::path& path) { return mask_from_json(read_json(path)); }

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path, e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  thread_local std::mt19937_64 rng(std::random_device{}());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000007ull);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error(tmp, "cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw io_error(tmp, "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw io_error(path, "rename failed: " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

struct MemorySink {
  std::string data;
};

void sink_write(png_structp png, png_bytep bytes, png_size_t len) {
  auto* sink = static_cast<MemorySink*>(png_get_io_ptr(png));
  sink->data.append(reinterpret_cast<const char*>(bytes), len);
}

void sink_flush(png_structp) {}

void encode_png(const fs::path& path, int width, int height, int color_type,
                const std::vector<unsigned char>& pixels, int channels) {
  PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!w.png) throw io_error(path, "png_create_write_struct failed");
  w.info = png_create_info_struct(w.png);
  if (!w.info) throw io_error(path, "png_create_info_struct failed");
  MemorySink sink;
  if (setjmp(png_jmpbuf(w.png))) throw io_error(path, "PNG encoding failed");
  png_set_write_fn(w.png, &sink, sink_write, sink_flush);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  for (int r = 0; r < height; ++r) {
    png_write_row(w.png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(r) * width * channels));
  }
  png_write_end(w.png, nullptr);
  write_file_atomic(path, sink.data);
}

}  // namespace

void write_png(const fs::path& path, const RMatrix& image, double scale) {
  const int height = static_cast<int>(image.rows());
  const int width = static_cast<int>(image.cols());
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * height);
  const double inv = scale > 0.0 ? 1.0 / scale : 0.0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = image(r, c) * inv;
      v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
      pixels[static_cast<std::size_t>(r) * width + c] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  encode_png(path, width, height, PNG_COLOR_TYPE_GRAY, pixels, 1);
}

void write_png_rgb(const fs::path& path, int width, int height, const std::vector<unsigned char>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw std::invalid_argument("rgb buffer size does not match image dimensions");
  }
  encode_png(path, width, height, PNG_COLOR_TYPE_RGB, rgb, 3);
}

RMatrix read_png_gray(const fs::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  const std::string bytes = read_file(path);
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw io_error(path, "not a readable PNG");
  }
  img.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&img);
    throw io_error(path, "PNG decode failed");
  }
  RMatrix out(img.height, img.width);
  for (png_uint_32 r = 0; r < img.height; ++r) {
    for (png_uint_32 c = 0; c < img.width; ++c) out(r, c) = buffer[r * img.width + c] / 255.0;
  }
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace acmri
