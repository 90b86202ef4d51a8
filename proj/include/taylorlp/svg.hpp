#pragma once

#include <string>

#include "taylorlp/localproj.hpp"

namespace tlp::svg {

// One panel per label: 90% band, response line, point markers, zero rule.
// Pure function of the table and title; identical input gives identical
// bytes. A label with a single horizon degenerates to a marked vertical
// segment. Non-finite values are rejected naming the offending point.
std::string render_irf_svg(const lp::IrfTable& table, const std::string& title);

}  // namespace tlp::svg
