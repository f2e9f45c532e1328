#pragma once

#include "doctest.h"

/// Purely relative comparison (doctest's default adds an absolute scale of 1).
inline doctest::Approx rel(double v) { return doctest::Approx(v).scale(0.0); }
