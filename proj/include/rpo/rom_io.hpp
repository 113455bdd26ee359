// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rpo/rom.hpp"

namespace rpo {

/// JSON document:
///
///     {"format_version": 1, "line_length_m": ...,
///      "parameters": [{"name", "role", "lower", "upper", "unit"}, ...],
///      "outputs": {"dx1": [{"weight": w, "factors": [{"input", "grid", "values"}, ...]}, ...]},
///      "metadata": {"gauged_geometry": {"x0_1", "y0_1", "x0_2", "y0_2"}}}
///
/// Reals are written in shortest round-trip form, so load(save(m)) == m bit for bit.
std::string rom_to_string(const RomModel& model);
/// Throws FormatError with a line/column (syntax) or field path (schema) diagnostic.
RomModel rom_from_string(std::string_view text);

void save_rom(const RomModel& model, const std::filesystem::path& path);
RomModel load_rom(const std::filesystem::path& path);

}  // namespace rpo
