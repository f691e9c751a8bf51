#include "hubmm/image.hpp"

#include "hubmm/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace hubmm {

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width * height)
    throw DimensionMismatch("image buffer holds " + std::to_string(pixels_.size()) +
                            " samples, expected " + std::to_string(width * height));
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n')
        ;
      if (!tok.empty())
        break;
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty())
        break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty())
    throw FormatError("PGM: truncated header");
  return tok;
}

std::size_t header_number(std::istream& in, const char* field) {
  const std::string tok = header_token(in);
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || tok.empty())
    throw FormatError(std::string("PGM: bad ") + field + " '" + tok + "'");
  return v;
}

} // namespace

GrayImage read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2")
    throw FormatError("PGM: unsupported magic '" + magic + "' (expected P5 or P2)");
  const std::size_t width = header_number(in, "width");
  const std::size_t height = header_number(in, "height");
  const std::size_t maxval = header_number(in, "maxval");
  if (width == 0 || height == 0)
    throw FormatError("PGM: empty image");
  if (maxval == 0 || maxval > 65535)
    throw FormatError("PGM: maxval " + std::to_string(maxval) + " out of range");

  GrayImage img(width, height);
  const double scale = 1.0 / static_cast<double>(maxval);
  auto& px = img.pixels();
  if (magic == "P5") {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(px.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw FormatError("PGM: pixel data truncated");
    for (std::size_t i = 0; i < px.size(); ++i) {
      const std::size_t v = bytes == 1 ? raw[i] : (std::size_t{raw[2 * i]} << 8) | raw[2 * i + 1];
      if (v > maxval)
        throw FormatError("PGM: sample exceeds maxval");
      px[i] = static_cast<double>(v) * scale;
    }
  } else {
    for (auto& p : px) {
      long v = -1;
      if (!(in >> v) || v < 0 || static_cast<std::size_t>(v) > maxval)
        throw FormatError("PGM: bad or missing ASCII sample");
      p = static_cast<double>(v) * scale;
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open '" + path.string() + "' for reading");
  try {
    return read_pgm(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raw(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), raw.begin(), [](double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError("cannot open '" + path.string() + "' for writing");
  write_pgm(out, img);
  if (!out)
    throw FormatError("write to '" + path.string() + "' failed");
}

GrayImage add_impulsive_noise(const GrayImage& img, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::domain_error("impulsive noise probability must lie in [0, 1]");
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution corrupt(eps);
  std::bernoulli_distribution coin(0.5);
  GrayImage out = img;
  for (auto& p : out.pixels())
    if (corrupt(gen))
      p = coin(gen) ? 1.0 : 0.0;
  return out;
}

GrayImage add_gaussian_noise(const GrayImage& img, double sd, std::uint64_t seed) {
  if (!(sd >= 0.0) || !std::isfinite(sd))
    throw std::domain_error("gaussian noise level must be finite and nonnegative");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GrayImage out = img;
  for (auto& p : out.pixels())
    p = std::clamp(p + sd * normal(gen), 0.0, 1.0);
  return out;
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionMismatch("psnr: image sizes differ");
  if (a.size() == 0)
    throw DimensionMismatch("psnr: empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0)
    return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

} // namespace hubmm
