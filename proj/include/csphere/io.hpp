#pragma once
#include <string>
#include <vector>

#include "csphere/angular.hpp"

namespace csphere::io {

/// 17-significant-digit decimal rendering, exact at double precision.
std::string fmt17(double v);
std::string fmt17(angular::Complex v);

/// Writes a CSV file with a header row; rows are pre-rendered cells.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Writes a string to a file.
void write_text(const std::string& path, const std::string& text);

} // namespace csphere::io

#include "csphere/angular.hpp"
#include "csphere/coupling.hpp"

namespace csphere::io {

/// Gram/coupling block as (row_label, col_label, re, im) rows.
void write_gram_csv(const std::string& path, const coupling::GramMatrix& g);

/// VSH coefficient table as (family, ell, m, coeff_re, coeff_im) rows.
void write_vsh_coefficients_csv(const std::string& path,
                                const angular::VshDecomposition& dec);

} // namespace csphere::io
