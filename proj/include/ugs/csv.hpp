#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ugs::csv {

// Splits one RFC 4180 record. Quoted fields may contain commas and doubled
// quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace ugs::csv
