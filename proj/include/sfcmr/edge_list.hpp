#pragma once

#include <string>

#include "sfcmr/graph.hpp"

namespace sfcmr {

struct ParseError {
    enum Kind { kSyntax, kSelfLoop, kDuplicateEdge, kOutOfRange } kind = kSyntax;
    int line = 0;
    std::string message;
};

/// Edge-list format: '#' lines are comments, first data line "n m", then m
/// lines "u v" with 0 <= u,v < n and u != v. n = 0 is rejected here.
Graph parse_edge_list(const std::string& text);

std::string to_edge_list(const Graph& g);

} // namespace sfcmr
