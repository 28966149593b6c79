#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fleetgrid/lp_model.hpp"

namespace fleetgrid {

// Fixed-format MPS requires names of at most 8 characters, so every column
// and row name is mangled deterministically (X<index> / R<index>, objective
// row "COST") and the original names are written to a sidecar file
// "<destination>.names" with one "col|row <mangled> <original>" line each.
std::string mangled_column_name(std::size_t index);
std::string mangled_row_name(std::size_t index);

/// Writes `model` as fixed-format MPS with deterministic ordering.
/// Emits the sidecar name map next to the destination file.
void export_mps(const LpModel& model, const std::filesystem::path& destination);

/// Parses a fixed-format MPS file written by export_mps (RANGES unsupported).
/// If the sidecar name map exists, original names are restored.
LpModel import_mps(const std::filesystem::path& source);

}  // namespace fleetgrid
