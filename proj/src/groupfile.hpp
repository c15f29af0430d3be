#pragma once

#include "schottky.hpp"

#include <string>

namespace escapelab {

// Group description file, one "key = value" per line, '#' comments:
//   n = 1
//   rank = 2
//   generator.1 = a b c d      SL(2,R) matrix, row-major
//   minus.1 = cx cy r          Euclidean centre and radius
//   plus.1 = cx cy r
//   basepoint = x y            optional
// Generator k maps the exterior of minus.k onto the interior of plus.k.
SchottkyGroup parse_group(const std::string& text);
SchottkyGroup load_group_file(const std::string& path);
// Exact (%.17g) serialisation accepted by parse_group.
std::string format_group(const SchottkyGroup& grp);

}  // namespace escapelab
