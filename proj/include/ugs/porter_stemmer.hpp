#pragma once

#include <string>
#include <string_view>

namespace ugs {

// Porter suffix-stripping stemmer for lowercase ASCII words. Rule set is the
// classic algorithm with the widely deployed refinements documented in
// docs/stemmer.md (y->i only after a consonant, short-word passthrough, a
// small irregular-form table). Thread-safe; no state.
std::string porter_stem(std::string_view word);

}  // namespace ugs
