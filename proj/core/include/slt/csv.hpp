#pragma once

#include <string>

#include "slt/types.hpp"

namespace slt {

/// Dataset from CSV: one observation per row, p columns, optional header row
/// (detected by non-numeric cells), UTF-8, '.' decimal separator.
Dataset read_dataset_csv(const std::string& path);

}  // namespace slt
