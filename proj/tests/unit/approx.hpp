#pragma once

#include <doctest.h>

// Purely relative comparison; doctest's default scale of 1 would make small
// values compare with an absolute margin.
inline doctest::Approx rel_approx(double value, double eps = 1e-12) {
  return doctest::Approx(value).epsilon(eps).scale(0.0);
}
