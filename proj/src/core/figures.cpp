// Copyright 2026 The OODLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/figures.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "core/error.hpp"
#include "core/io_util.hpp"

namespace oodlab {

namespace fs = std::filesystem;

namespace {

uint8_t to_byte(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

void write_pgm_bytes(const fs::path& path, const std::vector<uint8_t>& gray,
                     int size, const std::string& config_hash) {
  std::ostringstream os;
  os << "P5\n";
  if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
  os << size << " " << size << "\n255\n";
  std::string header = os.str();
  std::string payload(header);
  payload.append(reinterpret_cast<const char*>(gray.data()), gray.size());
  write_text_file(path, payload);
}

void png_chunk(std::vector<uint8_t>& out, const char type[5],
               const std::vector<uint8_t>& data) {
  auto push_u32 = [&out](uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
  };
  push_u32(static_cast<uint32_t>(data.size()));
  const size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size()));
  push_u32(static_cast<uint32_t>(crc));
}

struct PlotTransform {
  double x0, x1, y0, y1;  // data range
  double px0, px1, py0, py1;  // pixel box (py grows downward)

  double sx(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double sy(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

std::string f2(double v) { return fmt_double(v, 2); }

}  // namespace

void write_pgm(const fs::path& path, const std::vector<float>& pixels,
               int size, const std::string& config_hash) {
  std::vector<uint8_t> gray(pixels.size());
  for (size_t i = 0; i < pixels.size(); ++i) gray[i] = to_byte(pixels[i]);
  write_pgm_bytes(path, gray, size, config_hash);
}

void write_pgm(const fs::path& path, const std::vector<double>& values,
               int size, const std::string& config_hash) {
  std::vector<uint8_t> gray(values.size());
  for (size_t i = 0; i < values.size(); ++i) gray[i] = to_byte(values[i]);
  write_pgm_bytes(path, gray, size, config_hash);
}

PgmImage read_pgm(const fs::path& path) {
  const std::string content = read_text_file(path);
  require(content.size() > 2 && content[0] == 'P' && content[1] == '5',
          ErrorKind::kIo, "not a binary PGM: " + path.string());
  size_t pos = 2;
  auto next_token = [&]() -> std::string {
    while (pos < content.size()) {
      if (std::isspace(static_cast<unsigned char>(content[pos]))) {
        ++pos;
      } else if (content[pos] == '#') {
        while (pos < content.size() && content[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const size_t start = pos;
    while (pos < content.size() &&
           !std::isspace(static_cast<unsigned char>(content[pos]))) {
      ++pos;
    }
    return content.substr(start, pos - start);
  };
  PgmImage img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  require(maxval == 255, ErrorKind::kIo, "PGM maxval must be 255");
  ++pos;  // single whitespace after maxval
  const size_t n = static_cast<size_t>(img.width) * img.height;
  require(content.size() - pos == n, ErrorKind::kIo,
          "PGM payload size mismatch: " + path.string());
  img.gray.assign(content.begin() + static_cast<int64_t>(pos), content.end());
  return img;
}

std::vector<uint8_t> encode_png_gray(const std::vector<uint8_t>& gray,
                                     int width, int height) {
  require(static_cast<size_t>(width) * height == gray.size(),
          ErrorKind::kArgument, "png: pixel count mismatch");
  // raw scanlines, filter byte 0 per row
  std::vector<uint8_t> raw;
  raw.reserve(gray.size() + static_cast<size_t>(height));
  for (int r = 0; r < height; ++r) {
    raw.push_back(0);
    raw.insert(raw.end(), gray.begin() + static_cast<int64_t>(r) * width,
               gray.begin() + static_cast<int64_t>(r + 1) * width);
  }
  uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> comp(comp_cap);
  const int rc = compress2(comp.data(), &comp_cap, raw.data(),
                           static_cast<uLong>(raw.size()), 6);
  require(rc == Z_OK, ErrorKind::kInternal, "zlib compression failed");
  comp.resize(comp_cap);

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<uint8_t> ihdr(13);
  auto put_u32 = [](uint8_t* p, uint32_t v) {
    p[0] = static_cast<uint8_t>(v >> 24);
    p[1] = static_cast<uint8_t>(v >> 16);
    p[2] = static_cast<uint8_t>(v >> 8);
    p[3] = static_cast<uint8_t>(v);
  };
  put_u32(ihdr.data(), static_cast<uint32_t>(width));
  put_u32(ihdr.data() + 4, static_cast<uint32_t>(height));
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", comp);
  png_chunk(out, "IEND", {});
  return out;
}

std::string svg_scatter(const std::string& title,
                        const std::vector<ScatterGroup>& groups,
                        const std::string& config_hash) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const ScatterGroup& g : groups) {
    for (const Point2& p : g.points) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    if (g.ellipse) {
      const double r = std::max(g.ellipse->rx, g.ellipse->ry);
      x0 = std::min(x0, g.ellipse->cx - r);
      x1 = std::max(x1, g.ellipse->cx + r);
      y0 = std::min(y0, g.ellipse->cy - r);
      y1 = std::max(y1, g.ellipse->cy + r);
    }
  }
  if (x0 > x1) {
    x0 = y0 = -1.0;
    x1 = y1 = 1.0;
  }
  const double padx = std::max(1e-9, 0.08 * (x1 - x0));
  const double pady = std::max(1e-9, 0.08 * (y1 - y0));
  PlotTransform tr{x0 - padx, x1 + padx, y0 - pady, y1 + pady,
                   70.0, 610.0, 50.0, 430.0};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"480\" viewBox=\"0 0 800 480\">\n";
  svg << "<!-- config_hash=" << config_hash << " -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"480\" fill=\"white\"/>\n";
  svg << "<text x=\"340\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  svg << "<rect x=\"70\" y=\"50\" width=\"540\" height=\"380\" fill=\"none\" "
         "stroke=\"#333333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = tr.x0 + (tr.x1 - tr.x0) * i / 4.0;
    const double fy = tr.y0 + (tr.y1 - tr.y0) * i / 4.0;
    svg << "<text x=\"" << f2(tr.sx(fx)) << "\" y=\"446\" "
        << "text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << f2(fx) << "</text>\n";
    svg << "<text x=\"64\" y=\"" << f2(tr.sy(fy) + 3.0) << "\" "
        << "text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << f2(fy) << "</text>\n";
  }
  svg << "<text x=\"340\" y=\"470\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">PC1</text>\n";
  svg << "<text x=\"20\" y=\"240\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90,20,240)\">PC2</text>\n";

  for (const ScatterGroup& g : groups) {
    if (g.ellipse) {
      const Ellipse2Std& e = *g.ellipse;
      svg << "<ellipse cx=\"0\" cy=\"0\" rx=\""
          << f2(e.rx / (tr.x1 - tr.x0) * (tr.px1 - tr.px0)) << "\" ry=\""
          << f2(e.ry / (tr.y1 - tr.y0) * (tr.py1 - tr.py0))
          << "\" fill=\"none\" stroke=\"" << g.color
          << "\" stroke-dasharray=\"4 3\" transform=\"translate("
          << f2(tr.sx(e.cx)) << "," << f2(tr.sy(e.cy)) << ") rotate("
          << f2(-e.angle_rad * 180.0 / 3.14159265358979323846) << ")\"/>\n";
    }
    for (const Point2& p : g.points) {
      const double cx = tr.sx(p.x), cy = tr.sy(p.y);
      if (g.marker == 'x') {
        svg << "<path d=\"M" << f2(cx - 3) << " " << f2(cy - 3) << " L"
            << f2(cx + 3) << " " << f2(cy + 3) << " M" << f2(cx - 3) << " "
            << f2(cy + 3) << " L" << f2(cx + 3) << " " << f2(cy - 3)
            << "\" stroke=\"" << g.color << "\" stroke-width=\"1.2\"/>\n";
      } else {
        svg << "<circle cx=\"" << f2(cx) << "\" cy=\"" << f2(cy)
            << "\" r=\"2.6\" fill=\"none\" stroke=\"" << g.color
            << "\" stroke-width=\"1.2\"/>\n";
      }
    }
  }

  double ly = 60.0;
  for (const ScatterGroup& g : groups) {
    svg << "<text x=\"636\" y=\"" << f2(ly + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << g.color
        << "\">" << (g.marker == 'x' ? "x " : "o ") << g.name << "</text>\n";
    ly += 18.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_saliency_grid(const std::string& title, int tile_size,
                              const std::vector<SaliencyRow>& rows,
                              const std::string& config_hash) {
  constexpr int kTilePx = 96;
  constexpr int kGap = 8;
  constexpr int kLabelW = 120;
  constexpr int kTop = 46;
  size_t max_tiles = 0;
  for (const SaliencyRow& r : rows) max_tiles = std::max(max_tiles, r.tiles.size());
  const int width = kLabelW + static_cast<int>(max_tiles) * (2 * kTilePx + 3 * kGap);
  const int height = kTop + static_cast<int>(rows.size()) * (kTilePx + 24) + 10;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<!-- config_hash=" << config_hash << " -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

  int y = kTop;
  for (const SaliencyRow& row : rows) {
    svg << "<text x=\"8\" y=\"" << y + kTilePx / 2
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << row.label
        << "</text>\n";
    int x = kLabelW;
    for (const auto& [image, map] : row.tiles) {
      for (const std::vector<uint8_t>* gray : {&image, &map}) {
        const std::vector<uint8_t> png =
            encode_png_gray(*gray, tile_size, tile_size);
        svg << "<image x=\"" << x << "\" y=\"" << y << "\" width=\"" << kTilePx
            << "\" height=\"" << kTilePx
            << "\" style=\"image-rendering:pixelated\" "
               "href=\"data:image/png;base64,"
            << base64_encode(png) << "\"/>\n";
        x += kTilePx + kGap;
      }
      x += kGap;
    }
    y += kTilePx + 24;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace oodlab
