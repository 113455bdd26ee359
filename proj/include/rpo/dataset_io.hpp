// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "rpo/rom_fit.hpp"

namespace rpo {

/// CSV with header `position_m,<parameter names...>,output,value_mm` and one
/// row per dataset row. Reals are written in shortest round-trip form.
void write_dataset_csv(std::ostream& out, const TrainingDataset& data);

/// Inverse of write_dataset_csv. Output names are collected in order of first
/// appearance. FormatError with the line number on malformed input.
TrainingDataset read_dataset_csv(std::istream& in);

}  // namespace rpo
