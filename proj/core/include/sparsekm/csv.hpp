#pragma once

#include <string>

#include "sparsekm/model.hpp"

namespace sparsekm {

// Dataset CSV: header "x1,..,xp[,label]", one observation per row, doubles
// printed with 17 significant digits so a round trip is bit-exact.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// One "label" header line, then one cluster id per row.
void write_labels_csv(const Assignment& a, const std::string& path);

// Plain numeric grid, no header (used for covariance matrices).
Matrix read_matrix_csv(const std::string& path);

std::string format_double(double v);

}  // namespace sparsekm
