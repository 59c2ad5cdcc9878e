#pragma once

#include "doctest.h"

// Relative comparison (exact zeros still match). doctest::Approx adds an absolute floor of
// epsilon * 1, which hides errors in small rates and spectra.
inline doctest::Approx rel(double value) {
  return doctest::Approx(value).scale(1e-300);
}
