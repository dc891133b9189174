#include "sfcmr/edge_list.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sfcmr {

Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int n = -1, m = -1;
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;

    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        std::istringstream ls(line);
        long a, b;
        if (!(ls >> a >> b)) throw ParseError{ParseError::kSyntax, lineno, "expected two integers"};
        std::string rest;
        if (ls >> rest) throw ParseError{ParseError::kSyntax, lineno, "trailing tokens"};
        if (n < 0) {
            if (a <= 0) throw ParseError{ParseError::kSyntax, lineno, "vertex count must be >= 1"};
            if (b < 0) throw ParseError{ParseError::kSyntax, lineno, "edge count must be >= 0"};
            n = static_cast<int>(a);
            m = static_cast<int>(b);
            continue;
        }
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw ParseError{ParseError::kOutOfRange, lineno, "endpoint outside 0..n-1"};
        if (a == b) throw ParseError{ParseError::kSelfLoop, lineno, "self-loop"};
        const int u = static_cast<int>(std::min(a, b));
        const int v = static_cast<int>(std::max(a, b));
        if (!seen.insert({u, v}).second)
            throw ParseError{ParseError::kDuplicateEdge, lineno, "duplicate edge"};
        edges.emplace_back(u, v);
    }
    if (n < 0) throw ParseError{ParseError::kSyntax, lineno, "missing header line"};
    if (static_cast<int>(edges.size()) != m)
        throw ParseError{ParseError::kSyntax, lineno, "edge count mismatch"};
    return Graph(n, edges);
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.n() << " " << g.m() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
    return out.str();
}

} // namespace sfcmr
