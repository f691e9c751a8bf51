#ifndef HUBMM_ERRORS_HPP
#define HUBMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hubmm {

// Operand sizes do not agree (vector lengths, matrix shapes, image sizes).
class DimensionMismatch : public std::invalid_argument {
public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// The design matrix does not have full numerical column rank.
class RankDeficient : public std::runtime_error {
public:
  explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

// ||psi(r / sigma)|| vanished, so the scale update is undefined (perfect fit).
class DegenerateScale : public std::runtime_error {
public:
  explicit DegenerateScale(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (PGM, dictionary, CSV).
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hubmm

#endif // HUBMM_ERRORS_HPP
