#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef LIFTSIM_HAVE_PNG
#include <png.h>
#endif

#include "liftsim/vision/frame.hpp"

namespace liftsim::vision {

namespace fs = std::filesystem;

namespace detail {

inline void skip_pnm_space(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

}  // namespace detail

// Reads an 8-bit binary (P5) or ASCII (P2) PGM, normalizing by maxval.
inline GrayFrame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open frame " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") throw InputError(path.string() + ": not a PGM (P2/P5) file");
  int w = 0, h = 0, maxval = 0;
  detail::skip_pnm_space(in);
  in >> w;
  detail::skip_pnm_space(in);
  in >> h;
  detail::skip_pnm_space(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw InputError(path.string() + ": unsupported PGM header (8-bit grayscale only)");
  }
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  if (magic == "P5") {
    in.get();
    std::vector<unsigned char> raw(data.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw InputError(path.string() + ": truncated PGM");
    for (std::size_t i = 0; i < raw.size(); ++i) data[i] = static_cast<double>(raw[i]) / maxval;
  } else {
    for (auto& v : data) {
      int x = 0;
      if (!(in >> x) || x < 0 || x > maxval) throw InputError(path.string() + ": bad PGM sample");
      v = static_cast<double>(x) / maxval;
    }
  }
  return GrayFrame(w, h, std::move(data));
}

inline void write_pgm(const fs::path& path, const GrayFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write frame " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  for (double v : frame.intensities()) {
    const auto b = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(b));
  }
}

#ifdef LIFTSIM_HAVE_PNG
inline GrayFrame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw InputError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw InputError(path.string() + ": " + image.message);
  }
  std::vector<double> data(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) data[i] = buf[i] / 255.0;
  return GrayFrame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(data));
}
#endif

inline GrayFrame read_frame(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") return read_pgm(path);
#ifdef LIFTSIM_HAVE_PNG
  if (ext == ".png") return read_png(path);
#endif
  throw InputError(path.string() + ": unsupported frame format");
}

inline std::string frame_name(int index, const std::string& ext = ".pgm") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d", index);
  return std::string(buf) + ext;
}

// Numbered frames frame_000000.{pgm,png}, ... starting at index 0 and
// stopping at the first gap.
inline std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("frames directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (int k = 0;; ++k) {
    const fs::path pgm = dir / frame_name(k, ".pgm");
    const fs::path png = dir / frame_name(k, ".png");
    if (fs::exists(pgm)) {
      out.push_back(pgm);
    } else if (fs::exists(png)) {
      out.push_back(png);
    } else {
      break;
    }
  }
  if (out.empty()) throw InputError("no frame_%06d.pgm/png files in " + dir.string());
  return out;
}

}  // namespace liftsim::vision
