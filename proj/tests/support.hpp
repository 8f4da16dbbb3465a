// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <doctest.h>

// Purely relative comparison; doctest's default adds an absolute floor of
// epsilon, which hides errors in small quantities. Chain .scale(1.0) to
// compare against zero.
inline doctest::Approx Approx(double value) { return doctest::Approx(value).scale(0.0); }
