#ifndef HUBMM_IMAGE_HPP
#define HUBMM_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace hubmm {

// Grayscale raster with intensities in [0, 1], stored row-major.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

  const std::vector<double>& pixels() const { return pixels_; }
  std::vector<double>& pixels() { return pixels_; }

  bool operator==(const GrayImage&) const = default;

private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

// Reads binary (P5) or ASCII (P2) PGM. Samples are divided by maxval.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);

// Writes binary P5 with maxval 255; samples are clamped to [0, 1] and
// rounded to the nearest level.
void write_pgm(std::ostream& out, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

// Salt-and-pepper noise: each pixel independently becomes 0 or 1 (fair
// coin) with probability eps. Deterministic in seed.
GrayImage add_impulsive_noise(const GrayImage& img, double eps, std::uint64_t seed);

// Additive N(0, sd^2) noise, clamped to [0, 1].
GrayImage add_gaussian_noise(const GrayImage& img, double sd, std::uint64_t seed);

// Reported instead of +inf for identical images, and used as an upper clamp.
inline constexpr double kPsnrCapDb = 99.0;

// 10 log10(1 / MSE) for images with peak value 1.
double psnr(const GrayImage& a, const GrayImage& b);

} // namespace hubmm

#endif // HUBMM_IMAGE_HPP
