#pragma once

#include <istream>
#include <string>

#include "kemeny/multivar.hpp"

namespace kemeny {

/// Header row then numeric rows, comma separated. "inf", "+inf" and "-inf"
/// (any case) map to infinities; NaN is rejected with its row number.
DataMatrix load_csv(const std::string& path);
DataMatrix parse_csv(std::istream& in, const std::string& source = "<stream>");

}  // namespace kemeny
