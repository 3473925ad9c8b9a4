// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_TESTS_UNIT_DOCTEST_TORCH_H_
#define TLE_TESTS_UNIT_DOCTEST_TORCH_H_

// libtorch defines a CHECK macro of its own; doctest's takes precedence in tests.
#include <torch/torch.h>
#undef CHECK

#include <doctest.h>

#endif  // TLE_TESTS_UNIT_DOCTEST_TORCH_H_
