#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <csetjmp>

#include <jpeglib.h>
#include <png.h>

#include "cftrack/image.hpp"
#include "cftrack/mat.hpp"

namespace cftrack {

namespace detail {

inline double byte_to_unit(uint8_t b) { return b / 255.0; }

inline uint8_t unit_to_byte(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

inline std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string e = path.substr(dot + 1);
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e;
}

inline Image load_png(const std::string& path) {
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&im, path.c_str()))
    throw std::runtime_error("cannot read PNG: " + path + ": " + im.message);
  const bool gray = (im.format & PNG_FORMAT_FLAG_COLOR) == 0;
  im.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<uint8_t> buf(PNG_IMAGE_SIZE(im));
  if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&im);
    throw std::runtime_error("cannot decode PNG: " + path + ": " + im.message);
  }
  const int ch = gray ? 1 : 3;
  Image out(static_cast<int>(im.height), static_cast<int>(im.width), ch);
  for (size_t i = 0; i < buf.size(); ++i) out.data[i] = byte_to_unit(buf[i]);
  return out;
}

inline void save_png(const std::string& path, const Image& img) {
  if (img.empty()) throw std::invalid_argument("empty image");
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  im.width = static_cast<png_uint_32>(img.width);
  im.height = static_cast<png_uint_32>(img.height);
  im.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<uint8_t> buf(img.data.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = unit_to_byte(img.data[i]);
  if (!png_image_write_to_file(&im, path.c_str(), 0, buf.data(), 0, nullptr))
    throw std::runtime_error("cannot write PNG: " + path + ": " + im.message);
}

struct JpegErrorJmp {
  jpeg_error_mgr mgr;
  std::jmp_buf env;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_trampoline(j_common_ptr ci) {
  auto* e = reinterpret_cast<JpegErrorJmp*>(ci->err);
  (*ci->err->format_message)(ci, e->message);
  std::longjmp(e->env, 1);
}

inline Image load_jpeg(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open JPEG: " + path);

  jpeg_decompress_struct cinfo{};
  JpegErrorJmp err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_trampoline;
  jpeg_create_decompress(&cinfo);

  Image out;
  if (setjmp(err.env)) {
    jpeg_destroy_decompress(&cinfo);
    std::fclose(f);
    throw std::runtime_error("JPEG decode error in " + path + ": " + err.message);
  }

  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const int ch = cinfo.output_components;
  out = Image(h, w, ch);
  std::vector<uint8_t> row(static_cast<size_t>(w) * ch);
  JSAMPROW rows[1] = {row.data()};
  while (cinfo.output_scanline < cinfo.output_height) {
    const int r = static_cast<int>(cinfo.output_scanline);
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (size_t i = 0; i < row.size(); ++i)
      out.data[static_cast<size_t>(r) * w * ch + i] = byte_to_unit(row[i]);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  std::fclose(f);
  return out;
}

inline Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PNM: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6" && magic != "P5" && magic != "P3" && magic != "P2")
    throw std::runtime_error("unsupported PNM magic in " + path);
  auto next_int = [&]() {
    // Skips whitespace and '#' comment lines.
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = 0;
    in >> v;
    if (!in) throw std::runtime_error("truncated PNM header in " + path);
    return v;
  };
  const int w = static_cast<int>(next_int());
  const int h = static_cast<int>(next_int());
  const long maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PNM geometry in " + path);
  const int ch = (magic == "P6" || magic == "P3") ? 3 : 1;
  Image out(h, w, ch);
  const size_t n = out.data.size();
  if (magic == "P6" || magic == "P5") {
    in.get();  // single whitespace after maxval
    std::vector<uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
      throw std::runtime_error("truncated PNM payload in " + path);
    for (size_t i = 0; i < n; ++i) out.data[i] = buf[i] / double(maxval);
  } else {
    for (size_t i = 0; i < n; ++i) {
      long v;
      in >> v;
      if (!in) throw std::runtime_error("truncated PNM payload in " + path);
      out.data[i] = v / double(maxval);
    }
  }
  return out;
}

inline void save_ppm(const std::string& path, const Image& img) {
  if (img.empty()) throw std::invalid_argument("empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PNM: " + path);
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::vector<uint8_t> buf(img.data.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = unit_to_byte(img.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

}  // namespace detail

/// Loads an 8-bit PNG/JPEG/PPM/PGM file into [0,1] intensities.
inline Image load_image(const std::string& path) {
  const std::string ext = detail::lower_ext(path);
  if (ext == "png") return detail::load_png(path);
  if (ext == "jpg" || ext == "jpeg") return detail::load_jpeg(path);
  if (ext == "ppm" || ext == "pgm" || ext == "pnm") return detail::load_pnm(path);
  throw std::runtime_error("unsupported image format: " + path);
}

inline void save_image(const std::string& path, const Image& img) {
  const std::string ext = detail::lower_ext(path);
  if (ext == "png") return detail::save_png(path, img);
  if (ext == "ppm" || ext == "pgm") return detail::save_ppm(path, img);
  throw std::runtime_error("unsupported image format for writing: " + path);
}

/// Wraps a rows x cols map in [0,1] as a grayscale image (for mask dumps).
inline Image to_gray_image(const Mat2d& m) {
  Image out(m.rows, m.cols, 1);
  for (size_t i = 0; i < m.data.size(); ++i)
    out.data[i] = std::clamp(m.data[i], 0.0, 1.0);
  return out;
}

}  // namespace cftrack
