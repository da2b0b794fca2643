#pragma once

#include <stdexcept>
#include <string>

namespace isophasal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// No orthogonal conjugator exists: the two j-maps have different spectra at Z.
class SpectraMismatch : public Error {
 public:
  using Error::Error;
};

/// Polar frame requested too close to an axis r_p = 0.
class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class ConventionMismatch : public Error {
 public:
  using Error::Error;
};

class AllZeroSamples : public Error {
 public:
  using Error::Error;
};

class ThetaDependenceDetected : public Error {
 public:
  using Error::Error;
};

class DegenerateNodes : public Error {
 public:
  using Error::Error;
};

class FitIllConditioned : public Error {
 public:
  using Error::Error;
};

}  // namespace isophasal
